#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "secd/datagen.hpp"

namespace secd {

/// ReLU multilayer perceptron with two output logits (y1 = "unsafe",
/// y2 = "safe"). Inputs are mapped through `(x - input_offset) *
/// input_scale` before the first layer, so the stored model consumes raw
/// physical units.
struct MlpModel {
    std::vector<Eigen::MatrixXd> weights;  // weights[k]: widths[k+1] x widths[k]
    std::vector<Eigen::VectorXd> biases;
    Eigen::VectorXd input_offset;
    Eigen::VectorXd input_scale;

    std::vector<int> widths() const;
    std::size_t input_size() const { return weights.empty() ? 0 : static_cast<std::size_t>(weights.front().cols()); }
    std::size_t hidden_layers() const { return weights.empty() ? 0 : weights.size() - 1; }

    /// Throws InvalidArgument when layer shapes do not chain or the output
    /// width is not 2.
    void validate() const;

    /// Same network with the input normalization folded into the first
    /// layer and identity normalization.
    MlpModel with_normalization_folded() const;

    /// Glorot-uniform weights, zero biases, identity normalization.
    static MlpModel random(const std::vector<int>& widths, std::uint64_t seed);
};

struct ForwardTrace {
    std::vector<Eigen::VectorXd> pre_activations;  // z^k, k = 1..K
    std::vector<Eigen::VectorXd> activations;      // h^k, k = 1..K
    Eigen::Vector2d output;

    bool unsafe() const { return output[0] > output[1]; }
};

ForwardTrace forward(const MlpModel& model, const Eigen::VectorXd& x);
inline ForwardTrace forward(const MlpModel& model, const OperationVector& x) {
    return forward(model, x.features());
}
bool classify_unsafe(const MlpModel& model, const Eigen::VectorXd& x);

struct Hyperparams {
    int epochs = 200;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    double decay_factor = 0.5;
    int decay_every = 50;
};

struct Confusion {
    std::size_t true_unsafe = 0;   // unsafe predicted unsafe
    std::size_t false_safe = 0;    // unsafe predicted safe
    std::size_t true_safe = 0;
    std::size_t false_unsafe = 0;  // safe predicted unsafe

    std::size_t total() const { return true_unsafe + false_safe + true_safe + false_unsafe; }
};

struct TrainReport {
    std::vector<double> epoch_loss;           // mean training cross-entropy
    std::vector<double> epoch_test_accuracy;  // empty without a held-out set
    double accuracy = 0.0;
    Confusion confusion;
    double false_safe_rate = 0.0;  // false_safe / (true_unsafe + false_safe)
};

class TrainingError : public Error {
public:
    using Error::Error;
};

/// Mini-batch SGD with momentum on softmax cross-entropy. The
/// normalization is fit on `train` only. Deterministic for a given seed.
/// Throws TrainingError when the loss becomes non-finite.
std::pair<MlpModel, TrainReport> train_mlp(const Dataset& train, const std::vector<int>& widths,
                                           const Hyperparams& hyper, std::uint64_t seed,
                                           const Dataset* held_out = nullptr);

TrainReport evaluate(const MlpModel& model, const Dataset& test);

/// Mean cross-entropy over a batch and its gradient with respect to every
/// weight and bias (normalization is treated as fixed).
struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};
double batch_loss(const MlpModel& model, const Eigen::MatrixXd& inputs, const std::vector<int>& classes,
                  Gradients* grads = nullptr);

struct GradientCheckResult {
    double max_relative_deviation = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_at_kink = 0;
};

/// Compares backprop against central differences (step 1e-5) for every
/// parameter. A parameter is skipped when the +/- perturbation flips any
/// ReLU in the batch. Deviation is |a - n| / max(|a| + |n|, 1e-4).
/// `classes[i]` is 0 for unsafe, 1 for safe.
GradientCheckResult gradient_check(const MlpModel& model, const Eigen::MatrixXd& inputs,
                                   const std::vector<int>& classes, double step = 1e-5);

/// Affine loss model l = weights . x + bias in raw units.
struct LrModel {
    Eigen::VectorXd weights;
    double bias = 0.0;

    double predict(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
};

/// Ordinary least squares via the normal equations; falls back to a
/// ridge term of 1e-8 when the Gram matrix is singular.
LrModel fit_lr(const Dataset& train);
LrModel fit_lr(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets);

void save_mlp(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_mlp(const std::filesystem::path& path);
void save_lr(const LrModel& model, const std::filesystem::path& path);
LrModel load_lr(const std::filesystem::path& path);
std::string mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const std::string& text);

/// Dataset as a feature matrix (one column per sample) with classes
/// 0 = unsafe, 1 = safe.
Eigen::MatrixXd feature_matrix(const Dataset& data);
std::vector<int> class_vector(const Dataset& data);

}  // namespace secd
