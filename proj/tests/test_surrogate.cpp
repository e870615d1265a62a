#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "secd/surrogate.hpp"

using namespace secd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// One-bus samples: unsafe when active + 0.5 * pv exceeds 1.
Dataset toy_dataset(std::size_t n, std::uint64_t seed) {
    Dataset d;
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        LabeledSample s;
        s.x = OperationVector::zeros(1);
        s.x.active[0] = rng.uniform(0.0, 2.0);
        s.x.reactive[0] = rng.uniform(0.0, 1.0);
        s.x.pv[0] = rng.uniform(0.0, 1.0);
        s.label = s.x.active[0] + 0.5 * s.x.pv[0] > 1.0 ? SecurityLabel::Unsafe : SecurityLabel::Safe;
        s.loss = 0.3 * s.x.active[0] - 0.1 * s.x.reactive[0] + 0.05 * s.x.pv[0] + 0.02;
        d.samples.push_back(s);
    }
    return d;
}

}  // namespace

TEST_CASE("backprop agrees with central differences") {
    MlpModel m = MlpModel::random({6, 8, 8, 2}, 3);
    for (auto& b : m.biases) b.setConstant(0.05);
    SplitMix64 rng(4);
    MatrixXd x(6, 16);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
    std::vector<int> cls(16);
    for (int i = 0; i < 16; ++i) cls[i] = i % 2;
    const GradientCheckResult r = gradient_check(m, x, cls);
    CHECK(r.checked > 100);
    CHECK(r.max_relative_deviation <= 1e-4);
}

TEST_CASE("single-layer gradient has the softmax closed form") {
    MlpModel m = MlpModel::random({3, 2}, 8);
    m.biases[0] << 0.1, -0.2;
    VectorXd x(3);
    x << 0.5, -1.0, 2.0;
    MatrixXd xb = x;
    Gradients g;
    const double loss = batch_loss(m, xb, {1}, &g);
    const VectorXd z = m.weights[0] * x + m.biases[0];
    const double p0 = std::exp(z[0]) / (std::exp(z[0]) + std::exp(z[1]));
    CHECK(loss == doctest::Approx(-std::log(1.0 - p0)));
    const VectorXd delta = (VectorXd(2) << p0, -p0).finished();
    CHECK((g.biases[0] - delta).norm() <= 1e-12);
    CHECK((g.weights[0] - delta * x.transpose()).norm() <= 1e-12);
}

TEST_CASE("folding the normalization keeps every output") {
    MlpModel m = MlpModel::random({5, 4, 2}, 1);
    m.input_offset = VectorXd::LinSpaced(5, 0.1, 0.9);
    m.input_scale = VectorXd::LinSpaced(5, 2.0, 0.5);
    const MlpModel f = m.with_normalization_folded();
    CHECK(f.input_offset.isZero());
    CHECK(f.input_scale.isOnes());
    SplitMix64 rng(2);
    for (int k = 0; k < 50; ++k) {
        VectorXd x(5);
        for (int i = 0; i < 5; ++i) x[i] = rng.uniform(-3.0, 3.0);
        CHECK((forward(m, x).output - forward(f, x).output).norm() <= 1e-12);
    }
}

TEST_CASE("training separates a toy boundary deterministically") {
    const Dataset train = toy_dataset(600, 10), test = toy_dataset(300, 11);
    Hyperparams h;
    h.epochs = 120;
    h.learning_rate = 0.05;
    h.decay_every = 40;
    const auto [model, report] = train_mlp(train, {3, 8, 8, 2}, h, 5, &test);
    CHECK(report.accuracy >= 0.95);
    CHECK(report.epoch_loss.size() == 120u);
    CHECK(report.epoch_test_accuracy.size() == 120u);
    CHECK(report.epoch_loss.back() < report.epoch_loss.front());
    CHECK(report.confusion.total() == 300u);
    const auto again = train_mlp(train, {3, 8, 8, 2}, h, 5);
    CHECK(again.first.weights[1] == model.weights[1]);
    CHECK_THROWS_AS(train_mlp(train, {4, 8, 2}, h, 5), InvalidArgument);
}

TEST_CASE("confusion counts and false-safe rate") {
    // Always-safe model: last layer zero with biases (0, 1).
    MlpModel m = MlpModel::random({3, 2, 2}, 1);
    m.weights[1].setZero();
    m.biases[1] << 0.0, 1.0;
    const Dataset d = toy_dataset(200, 3);
    const TrainReport r = evaluate(m, d);
    const std::size_t unsafe = d.count(SecurityLabel::Unsafe);
    CHECK(r.confusion.false_safe == unsafe);
    CHECK(r.confusion.true_safe == d.size() - unsafe);
    CHECK(r.false_safe_rate == doctest::Approx(1.0));
    CHECK(r.accuracy == doctest::Approx(double(d.size() - unsafe) / d.size()));
}

TEST_CASE("least squares recovers an affine law exactly") {
    const Dataset d = toy_dataset(50, 6);
    const LrModel lr = fit_lr(d);
    CHECK(lr.weights[0] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(lr.weights[1] == doctest::Approx(-0.1).epsilon(1e-9));
    CHECK(lr.weights[2] == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(lr.bias == doctest::Approx(0.02).epsilon(1e-9));
    // A constant column makes the Gram matrix singular.
    MatrixXd x = MatrixXd::Ones(2, 10);
    x.row(0) = VectorXd::LinSpaced(10, 0.0, 1.0).transpose();
    const VectorXd y = 2.0 * x.row(0).transpose() + VectorXd::Constant(10, 1.0);
    const LrModel r = fit_lr(x, y);
    for (int i = 0; i < 10; ++i) CHECK(r.predict(x.col(i)) == doctest::Approx(y[i]).epsilon(1e-6));
}

TEST_CASE("model files round trip") {
    std::filesystem::create_directories(SECD_TEST_TMP);
    const auto dir = std::filesystem::path(SECD_TEST_TMP);
    MlpModel m = MlpModel::random({4, 3, 2}, 9);
    m.input_offset = VectorXd::Constant(4, 0.25);
    m.input_scale = VectorXd::Constant(4, 1.0 / 3.0);
    save_mlp(m, dir / "m.json");
    const MlpModel back = load_mlp(dir / "m.json");
    CHECK(back.weights[0] == m.weights[0]);
    CHECK(back.biases[1] == m.biases[1]);
    CHECK(back.input_scale == m.input_scale);
    LrModel lr{VectorXd::LinSpaced(3, -1.0, 1.0 / 7.0), 0.1};
    save_lr(lr, dir / "lr.json");
    const LrModel lb = load_lr(dir / "lr.json");
    CHECK(lb.weights == lr.weights);
    CHECK(lb.bias == lr.bias);
    CHECK_THROWS(mlp_from_json("{\"weights\": 3}"));
    MlpModel bad = m;
    bad.biases[0].resize(5);
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
