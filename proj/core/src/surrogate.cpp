#include "secd/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/core.h>

#include "json.hpp"

namespace secd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> MlpModel::widths() const {
    std::vector<int> w;
    if (weights.empty()) return w;
    w.push_back(static_cast<int>(weights.front().cols()));
    for (const auto& m : weights) w.push_back(static_cast<int>(m.rows()));
    return w;
}

void MlpModel::validate() const {
    if (weights.empty() || weights.size() != biases.size())
        throw InvalidArgument("mlp: need matching weight and bias lists");
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k].rows() != biases[k].size())
            throw InvalidArgument(fmt::format("mlp: layer {} bias has wrong size", k + 1));
        if (k > 0 && weights[k].cols() != weights[k - 1].rows())
            throw InvalidArgument(fmt::format("mlp: layer {} does not chain", k + 1));
        if (!weights[k].allFinite() || !biases[k].allFinite())
            throw InvalidArgument(fmt::format("mlp: layer {} has non-finite parameters", k + 1));
    }
    if (weights.back().rows() != 2) throw InvalidArgument("mlp: output width must be 2");
    if (input_offset.size() != weights.front().cols() || input_scale.size() != weights.front().cols())
        throw InvalidArgument("mlp: normalization does not match the input width");
}

MlpModel MlpModel::with_normalization_folded() const {
    MlpModel m = *this;
    // W (x - o) * s + b  =  (W diag(s)) x + (b - W diag(s) o)
    MatrixXd scaled = weights.front() * input_scale.asDiagonal();
    m.biases.front() = biases.front() - scaled * input_offset;
    m.weights.front() = scaled;
    m.input_offset = VectorXd::Zero(input_offset.size());
    m.input_scale = VectorXd::Ones(input_scale.size());
    return m;
}

MlpModel MlpModel::random(const std::vector<int>& widths, std::uint64_t seed) {
    if (widths.size() < 2 || widths.back() != 2)
        throw InvalidArgument("mlp: widths must have at least two entries and end with 2");
    MlpModel m;
    SplitMix64 rng(sample_seed(seed, 0x1417u));
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        const int in = widths[k], out = widths[k + 1];
        if (in <= 0 || out <= 0) throw InvalidArgument("mlp: widths must be positive");
        const double limit = std::sqrt(6.0 / (in + out));
        MatrixXd w(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) w(r, c) = rng.uniform(-limit, limit);
        m.weights.push_back(std::move(w));
        m.biases.push_back(VectorXd::Zero(out));
    }
    m.input_offset = VectorXd::Zero(widths.front());
    m.input_scale = VectorXd::Ones(widths.front());
    return m;
}

ForwardTrace forward(const MlpModel& model, const VectorXd& x) {
    if (x.size() != static_cast<Eigen::Index>(model.input_size()))
        throw InvalidArgument(fmt::format("mlp: input has {} features, model expects {}", x.size(),
                                          model.input_size()));
    ForwardTrace tr;
    VectorXd h = (x - model.input_offset).cwiseProduct(model.input_scale);
    for (std::size_t k = 0; k + 1 < model.weights.size(); ++k) {
        VectorXd z = model.weights[k] * h + model.biases[k];
        h = z.cwiseMax(0.0);
        tr.pre_activations.push_back(std::move(z));
        tr.activations.push_back(h);
    }
    tr.output = model.weights.back() * h + model.biases.back();
    return tr;
}

bool classify_unsafe(const MlpModel& model, const VectorXd& x) { return forward(model, x).unsafe(); }

MatrixXd feature_matrix(const Dataset& data) {
    MatrixXd X(data.feature_count(), data.size());
    for (std::size_t j = 0; j < data.size(); ++j) X.col(static_cast<Eigen::Index>(j)) = data.samples[j].x.features();
    return X;
}

std::vector<int> class_vector(const Dataset& data) {
    std::vector<int> c(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) c[j] = data.samples[j].label == SecurityLabel::Unsafe ? 0 : 1;
    return c;
}

namespace {

struct BatchPass {
    std::vector<MatrixXd> z;  // pre-activations per hidden layer
    std::vector<MatrixXd> h;  // h[0] = normalized input
    MatrixXd y;
};

BatchPass run_batch(const MlpModel& model, const MatrixXd& inputs) {
    BatchPass p;
    p.h.push_back((inputs.colwise() - model.input_offset).array().colwise() * model.input_scale.array());
    for (std::size_t k = 0; k + 1 < model.weights.size(); ++k) {
        MatrixXd z = (model.weights[k] * p.h.back()).colwise() + model.biases[k];
        p.h.push_back(z.cwiseMax(0.0));
        p.z.push_back(std::move(z));
    }
    p.y = (model.weights.back() * p.h.back()).colwise() + model.biases.back();
    return p;
}

}  // namespace

double batch_loss(const MlpModel& model, const MatrixXd& inputs, const std::vector<int>& classes,
                  Gradients* grads) {
    const Eigen::Index b = inputs.cols();
    if (b == 0 || static_cast<std::size_t>(b) != classes.size())
        throw InvalidArgument("batch_loss: empty batch or class count mismatch");
    BatchPass p = run_batch(model, inputs);

    double loss = 0.0;
    MatrixXd dy(p.y.rows(), b);
    for (Eigen::Index j = 0; j < b; ++j) {
        const double m = p.y.col(j).maxCoeff();
        VectorXd e = (p.y.col(j).array() - m).exp();
        const double s = e.sum();
        loss += m + std::log(s) - p.y(classes[j], j);
        dy.col(j) = e / s;
        dy(classes[j], j) -= 1.0;
    }
    loss /= static_cast<double>(b);
    if (!grads) return loss;

    dy /= static_cast<double>(b);
    const std::size_t layers = model.weights.size();
    grads->weights.assign(layers, MatrixXd());
    grads->biases.assign(layers, VectorXd());
    MatrixXd delta = std::move(dy);
    for (std::size_t k = layers; k-- > 0;) {
        grads->weights[k] = delta * p.h[k].transpose();
        grads->biases[k] = delta.rowwise().sum();
        if (k == 0) break;
        MatrixXd back = model.weights[k].transpose() * delta;
        delta = back.cwiseProduct((p.z[k - 1].array() > 0.0).cast<double>().matrix());
    }
    return loss;
}

TrainReport evaluate(const MlpModel& model, const Dataset& test) {
    TrainReport rep;
    for (const LabeledSample& s : test.samples) {
        const bool predicted_unsafe = classify_unsafe(model, s.x.features());
        if (s.label == SecurityLabel::Unsafe)
            (predicted_unsafe ? rep.confusion.true_unsafe : rep.confusion.false_safe)++;
        else
            (predicted_unsafe ? rep.confusion.false_unsafe : rep.confusion.true_safe)++;
    }
    const Confusion& c = rep.confusion;
    if (c.total() > 0)
        rep.accuracy = static_cast<double>(c.true_unsafe + c.true_safe) / static_cast<double>(c.total());
    const std::size_t unsafe = c.true_unsafe + c.false_safe;
    if (unsafe > 0) rep.false_safe_rate = static_cast<double>(c.false_safe) / static_cast<double>(unsafe);
    return rep;
}

std::pair<MlpModel, TrainReport> train_mlp(const Dataset& train, const std::vector<int>& widths,
                                           const Hyperparams& hyper, std::uint64_t seed,
                                           const Dataset* held_out) {
    if (train.size() == 0) throw InvalidArgument("train_mlp: empty training set");
    if (widths.empty() || widths.front() != static_cast<int>(train.feature_count()))
        throw InvalidArgument(fmt::format("train_mlp: input width must equal the {} features",
                                          train.feature_count()));
    if (hyper.epochs <= 0 || hyper.batch_size <= 0 || !(hyper.learning_rate > 0.0))
        throw InvalidArgument("train_mlp: invalid hyperparameters");

    MlpModel model = MlpModel::random(widths, seed);
    const MatrixXd X = feature_matrix(train);
    const std::vector<int> classes = class_vector(train);

    VectorXd lo = X.rowwise().minCoeff(), hi = X.rowwise().maxCoeff();
    model.input_offset = lo;
    model.input_scale = VectorXd::Ones(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (hi[i] - lo[i] > 0.0) model.input_scale[i] = 1.0 / (hi[i] - lo[i]);

    std::vector<MatrixXd> vel_w;
    std::vector<VectorXd> vel_b;
    for (std::size_t k = 0; k < model.weights.size(); ++k) {
        vel_w.push_back(MatrixXd::Zero(model.weights[k].rows(), model.weights[k].cols()));
        vel_b.push_back(VectorXd::Zero(model.biases[k].size()));
    }

    SplitMix64 rng(sample_seed(seed, 0x7e41u));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    TrainReport report;
    Gradients g;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        const double lr =
            hyper.learning_rate * std::pow(hyper.decay_factor, hyper.decay_every > 0 ? epoch / hyper.decay_every : 0);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.next() % i)]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
            MatrixXd xb(X.rows(), static_cast<Eigen::Index>(end - start));
            std::vector<int> cb(end - start);
            for (std::size_t j = start; j < end; ++j) {
                xb.col(static_cast<Eigen::Index>(j - start)) = X.col(static_cast<Eigen::Index>(order[j]));
                cb[j - start] = classes[order[j]];
            }
            const double l = batch_loss(model, xb, cb, &g);
            if (!std::isfinite(l))
                throw TrainingError(fmt::format("training diverged at epoch {} (loss {}); lr {}", epoch, l, lr));
            epoch_loss += l * static_cast<double>(end - start);
            for (std::size_t k = 0; k < model.weights.size(); ++k) {
                vel_w[k] = hyper.momentum * vel_w[k] - lr * g.weights[k];
                vel_b[k] = hyper.momentum * vel_b[k] - lr * g.biases[k];
                model.weights[k] += vel_w[k];
                model.biases[k] += vel_b[k];
            }
        }
        report.epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
        if (held_out) report.epoch_test_accuracy.push_back(evaluate(model, *held_out).accuracy);
    }

    if (held_out) {
        TrainReport final_eval = evaluate(model, *held_out);
        report.accuracy = final_eval.accuracy;
        report.confusion = final_eval.confusion;
        report.false_safe_rate = final_eval.false_safe_rate;
    }
    return {std::move(model), std::move(report)};
}

GradientCheckResult gradient_check(const MlpModel& model, const MatrixXd& inputs,
                                   const std::vector<int>& classes, double step) {
    Gradients analytic;
    batch_loss(model, inputs, classes, &analytic);
    MlpModel probe = model;
    GradientCheckResult res;

    auto pattern = [&](const MlpModel& m) {
        std::vector<bool> bits;
        for (const MatrixXd& z : run_batch(m, inputs).z)
            for (Eigen::Index i = 0; i < z.size(); ++i) bits.push_back(z.data()[i] > 0.0);
        return bits;
    };
    auto check = [&](double& param, double grad) {
        const double saved = param;
        param = saved + step;
        const double up = batch_loss(probe, inputs, classes);
        auto p_up = pattern(probe);
        param = saved - step;
        const double down = batch_loss(probe, inputs, classes);
        auto p_down = pattern(probe);
        param = saved;
        if (p_up != p_down) {
            ++res.skipped_at_kink;
            return;
        }
        const double numeric = (up - down) / (2.0 * step);
        const double dev = std::abs(grad - numeric) / std::max(std::abs(grad) + std::abs(numeric), 1e-4);
        res.max_relative_deviation = std::max(res.max_relative_deviation, dev);
        ++res.checked;
    };
    for (std::size_t k = 0; k < probe.weights.size(); ++k) {
        for (Eigen::Index i = 0; i < probe.weights[k].size(); ++i)
            check(probe.weights[k].data()[i], analytic.weights[k].data()[i]);
        for (Eigen::Index i = 0; i < probe.biases[k].size(); ++i)
            check(probe.biases[k][i], analytic.biases[k][i]);
    }
    return res;
}

LrModel fit_lr(const MatrixXd& features, const VectorXd& targets) {
    const Eigen::Index d = features.rows(), n = features.cols();
    if (n != targets.size()) throw InvalidArgument("fit_lr: feature/target count mismatch");
    if (n < d + 1) throw InvalidArgument(fmt::format("fit_lr: need at least {} samples, got {}", d + 1, n));

    MatrixXd a(n, d + 1);
    a.leftCols(d) = features.transpose();
    a.col(d).setOnes();
    MatrixXd gram = a.transpose() * a;
    VectorXd rhs = a.transpose() * targets;

    Eigen::LLT<MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13)) {
        gram.diagonal().array() += 1e-8;
        llt.compute(gram);
        if (llt.info() != Eigen::Success) throw InvalidArgument("fit_lr: degenerate design matrix");
    }
    VectorXd sol = llt.solve(rhs);
    if (!sol.allFinite()) throw InvalidArgument("fit_lr: degenerate design matrix");
    return {sol.head(d), sol[d]};
}

LrModel fit_lr(const Dataset& train) {
    VectorXd y(static_cast<Eigen::Index>(train.size()));
    for (std::size_t j = 0; j < train.size(); ++j) y[static_cast<Eigen::Index>(j)] = train.samples[j].loss;
    return fit_lr(feature_matrix(train), y);
}

namespace {

using nlohmann::json;

std::vector<double> to_vec(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd from_vec(const json& j) {
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    out << text;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

constexpr int kSchemaVersion = 1;

}  // namespace

std::string mlp_to_json(const MlpModel& model) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "mlp";
    doc["widths"] = model.widths();
    json layers = json::array();
    for (std::size_t k = 0; k < model.weights.size(); ++k) {
        const MatrixXd& w = model.weights[k];
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
        layers.push_back({{"rows", w.rows()}, {"cols", w.cols()}, {"weights", flat}, {"bias", to_vec(model.biases[k])}});
    }
    doc["layers"] = std::move(layers);
    doc["normalization"] = {{"offset", to_vec(model.input_offset)}, {"scale", to_vec(model.input_scale)}};
    return doc.dump(1) + "\n";
}

MlpModel mlp_from_json(const std::string& text) {
    MlpModel m;
    try {
        json doc = json::parse(text);
        if (doc.at("kind").get<std::string>() != "mlp") throw ParseError("model file is not an mlp");
        if (doc.at("schema_version").get<int>() != kSchemaVersion) throw ParseError("unsupported mlp schema version");
        for (const auto& layer : doc.at("layers")) {
            const auto rows = layer.at("rows").get<Eigen::Index>(), cols = layer.at("cols").get<Eigen::Index>();
            auto flat = layer.at("weights").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(flat.size()) != rows * cols) throw ParseError("mlp layer has wrong weight count");
            MatrixXd w(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
            m.weights.push_back(std::move(w));
            m.biases.push_back(from_vec(layer.at("bias")));
        }
        m.input_offset = from_vec(doc.at("normalization").at("offset"));
        m.input_scale = from_vec(doc.at("normalization").at("scale"));
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("mlp json: {}", e.what()));
    }
    m.validate();
    return m;
}

void save_mlp(const MlpModel& model, const std::filesystem::path& path) { write_text(path, mlp_to_json(model)); }

MlpModel load_mlp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return mlp_from_json(buf.str());
}

void save_lr(const LrModel& model, const std::filesystem::path& path) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "lr";
    doc["weights"] = to_vec(model.weights);
    doc["bias"] = model.bias;
    write_text(path, doc.dump(1) + "\n");
}

LrModel load_lr(const std::filesystem::path& path) {
    json doc = read_json(path);
    try {
        if (doc.at("kind").get<std::string>() != "lr") throw ParseError("model file is not an lr model");
        if (doc.at("schema_version").get<int>() != kSchemaVersion) throw ParseError("unsupported lr schema version");
        return {from_vec(doc.at("weights")), doc.at("bias").get<double>()};
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("lr json: {}", e.what()));
    }
}

}  // namespace secd
