#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "imbgan/classifier.hpp"
#include "imbgan/nnet.hpp"
#include "imbgan/serialize.hpp"

using namespace imbgan;

namespace {

Matrix random_matrix(Index r, Index c, Rng& rng, double scale = 1.0) {
    Matrix m(r, c);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
    return m;
}

Matrix random_targets(Index r, Rng& rng) {
    Matrix t(r, 1);
    for (Index i = 0; i < r; ++i) t(i, 0) = static_cast<double>(rng.uniform_index(2));
    return t;
}

double act(Activation a, double z) {
    switch (a) {
        case Activation::relu: return z > 0 ? z : 0;
        case Activation::leaky_relu: return z > 0 ? z : 0.2 * z;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::linear: return z;
    }
    return z;
}

// Triple loops, no Eigen products.
Matrix hand_forward(const DenseNet& net, const Matrix& x) {
    Matrix a = x;
    for (const auto& l : net.layers()) {
        Matrix out(a.rows(), l.fan_out());
        for (Index r = 0; r < a.rows(); ++r)
            for (Index o = 0; o < l.fan_out(); ++o) {
                double z = l.bias(o);
                for (Index i = 0; i < l.fan_in(); ++i) z += a(r, i) * l.weights(i, o);
                out(r, o) = act(l.activation, z);
            }
        a = out;
    }
    return a;
}

Dataset xor_data() {
    Dataset ds;
    ds.features.resize(4, 2);
    ds.features << 0, 0, 0, 1, 1, 0, 1, 1;
    ds.labels.resize(4);
    ds.labels << 0, 1, 1, 0;
    ds.feature_names = default_feature_names(2);
    return ds;
}

Dataset blobs(Index n, std::uint64_t seed, double gap) {
    Rng rng(seed);
    Dataset ds;
    ds.features.resize(n, 2);
    ds.labels.resize(n);
    for (Index i = 0; i < n; ++i) {
        const bool pos = i % 3 == 0;
        ds.features(i, 0) = (pos ? 0.5 + gap : 0.5 - gap) + 0.05 * rng.normal();
        ds.features(i, 1) = 0.5 + 0.1 * rng.normal();
        ds.labels(i) = pos ? 1 : 0;
    }
    ds.feature_names = default_feature_names(2);
    return ds;
}

}  // namespace

TEST_CASE("zero net with sigmoid head outputs one half") {
    DenseNet net({{3, 4, Activation::relu}, {4, 1, Activation::sigmoid}}, 1);
    for (auto& l : net.layers()) {
        l.weights.setZero();
        l.bias.setZero();
    }
    Rng rng(1);
    const Matrix out = net.predict(random_matrix(5, 3, rng));
    CHECK((out.array() == 0.5).all());
}

TEST_CASE("identity linear layer passes input through") {
    DenseLayer<double> l;
    l.weights = Matrix::Identity(3, 3);
    l.bias = Vector::Zero(3);
    l.activation = Activation::linear;
    const auto net = DenseNet::from_layers({l});
    Rng rng(2);
    const Matrix x = random_matrix(4, 3, rng);
    CHECK(net.predict(x) == x);
    CHECK(net.forward(x).output == x);
}

TEST_CASE("forward matches a hand-rolled oracle") {
    Rng rng(3);
    for (Activation hidden : {Activation::relu, Activation::leaky_relu, Activation::sigmoid, Activation::linear}) {
        const auto net = DenseNet::mlp(5, {7, 6}, hidden, 2, Activation::sigmoid, 10);
        const Matrix x = random_matrix(9, 5, rng);
        CHECK((net.forward(x).output - hand_forward(net, x)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((net.predict(x) - hand_forward(net, x)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("construction and shape errors") {
    const auto net = DenseNet::mlp(3, {4}, Activation::relu, 1, Activation::sigmoid, 1);
    try {
        net.forward(Matrix::Zero(2, 4));
        FAIL("expected error");
    } catch (const ParameterError& e) {
        CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
    }
    CHECK_THROWS_AS(DenseNet({{3, 4, Activation::relu}, {5, 1, Activation::sigmoid}}, 1), ParameterError);
    CHECK_THROWS_AS(DenseNet({{0, 4, Activation::relu}}, 1), ParameterError);
    CHECK_THROWS_AS(DenseNet(std::vector<LayerSpec>{}, 1), ParameterError);
    CHECK(net.parameter_count() == 3 * 4 + 4 + 4 + 1);
}

TEST_CASE("initialisation: He for rectifiers, Xavier otherwise, deterministic") {
    const auto a = DenseNet::mlp(100, {200}, Activation::relu, 50, Activation::sigmoid, 4);
    const auto b = DenseNet::mlp(100, {200}, Activation::relu, 50, Activation::sigmoid, 4);
    CHECK(a.checksum() == b.checksum());
    CHECK(a.layers()[0].weights.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 100));
    CHECK(a.layers()[0].weights.cwiseAbs().maxCoeff() > 0.95 * std::sqrt(6.0 / 100));
    CHECK(a.layers()[1].weights.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 250));
    CHECK(a.layers()[1].weights.cwiseAbs().maxCoeff() > 0.95 * std::sqrt(6.0 / 250));
    CHECK(a.layers()[0].bias.isZero());
}

TEST_CASE("bce examples") {
    Vector p(3), t(3);
    t << 1, 0, 1;
    p = t;
    CHECK(bce_loss(p, t) <= -std::log(1 - 1e-7) + 1e-15);
    CHECK(bce_loss(p, t) >= 0.0);
    p.setConstant(0.5);
    CHECK(bce_loss(p, t) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    Vector wrong(3);
    wrong << 0, 1, 0;
    CHECK(std::isfinite(bce_loss(wrong, t)));
    CHECK(bce_loss(wrong, t) == doctest::Approx(-std::log(1e-7)));
    CHECK_THROWS_AS(bce_loss(Vector::Zero(2), t), ParameterError);
}

TEST_CASE("bce matches termwise evaluation") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        Vector p(17), t(17);
        double oracle = 0;
        for (Index i = 0; i < 17; ++i) {
            p(i) = rng.uniform01();
            t(i) = static_cast<double>(rng.uniform_index(2));
            const double q = std::min(std::max(p(i), 1e-7), 1 - 1e-7);
            oracle += -(t(i) * std::log(q) + (1 - t(i)) * std::log(1 - q));
        }
        CHECK(std::abs(bce_loss(p, t) - oracle / 17) < 1e-12);
    }
}

TEST_CASE("bce head gradient vanishes at the optimum") {
    auto net = DenseNet::mlp(2, {3}, Activation::leaky_relu, 1, Activation::sigmoid, 2);
    Rng rng(5);
    const Matrix x = random_matrix(4, 2, rng);
    const auto cache = net.forward(x);
    const auto g = net.backward_bce(cache, cache.output);
    for (const auto& w : g.weights) CHECK(w.cwiseAbs().maxCoeff() <= 1e-7);
    for (const auto& b : g.bias) CHECK(b.cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("single linear layer, squared loss, one sample: closed form gradient") {
    DenseLayer<double> l;
    l.weights = Matrix(3, 1);
    l.weights << 0.5, -1.0, 2.0;
    l.bias = Vector::Constant(1, 0.25);
    l.activation = Activation::linear;
    auto net = DenseNet::from_layers({l});
    Matrix x(1, 3);
    x << 1.0, 2.0, -0.5;
    const double target = 0.75;
    const auto cache = net.forward(x);
    const double r = cache.output(0, 0) - target;
    const auto g = net.backward(cache, Matrix::Constant(1, 1, 2 * r));
    for (Index i = 0; i < 3; ++i) CHECK(g.weights[0](i, 0) == doctest::Approx(2 * r * x(0, i)).epsilon(1e-15));
    CHECK(g.bias[0](0) == doctest::Approx(2 * r));
    CHECK(g.input(0, 1) == doctest::Approx(2 * r * -1.0));
}

TEST_CASE("backward without a matching cache is a usage error") {
    const auto net = DenseNet::mlp(2, {3}, Activation::relu, 1, Activation::sigmoid, 1);
    CHECK_THROWS_AS(net.backward(ForwardCache<double>{}, Matrix::Zero(1, 1)), UsageError);
    const auto other = DenseNet::mlp(2, {3, 3}, Activation::relu, 1, Activation::sigmoid, 1);
    const auto cache = other.forward(Matrix::Zero(1, 2));
    CHECK_THROWS_AS(net.backward_bce(cache, Matrix::Zero(1, 1)), UsageError);
}

TEST_CASE("grad_check: linear net under squared loss is essentially exact") {
    auto net = DenseNet::mlp(4, {5}, Activation::linear, 2, Activation::linear, 3);
    Rng rng(6);
    const auto r = grad_check(net, random_matrix(6, 4, rng), random_matrix(6, 2, rng), HeadLoss::squared, 1e-4);
    CHECK(r.max_relative_error < 1e-8);
    CHECK(r.checked == net.parameter_count());
}

TEST_CASE("grad_check: random rectifier and sigmoid nets") {
    Rng rng(7);
    for (Activation hidden : {Activation::relu, Activation::leaky_relu, Activation::sigmoid}) {
        for (int trial = 0; trial < 5; ++trial) {
            auto net = DenseNet::mlp(4, {8, 6}, hidden, 1, Activation::sigmoid, 20 + trial);
            const auto r = grad_check(net, random_matrix(7, 4, rng), random_targets(7, rng), HeadLoss::bce, 1e-4);
            CHECK(r.max_relative_error < 1e-4);
            CHECK(r.checked > 0);
        }
        auto wide = DenseNet::mlp(3, {6}, hidden, 2, Activation::linear, 40);
        const auto r = grad_check(wide, random_matrix(5, 3, rng), random_matrix(5, 2, rng), HeadLoss::squared, 1e-4);
        CHECK(r.max_relative_error < 1e-4);
    }
}

TEST_CASE("grad_check: saturated sigmoid head with clamped bce") {
    Rng rng(8);
    auto net = DenseNet::mlp(3, {5}, Activation::leaky_relu, 1, Activation::sigmoid, 9);
    const auto r = grad_check(net, random_matrix(6, 3, rng, 6.0), random_targets(6, rng), HeadLoss::bce, 1e-4);
    CHECK(r.max_relative_error < 1e-3);
}

TEST_CASE("grad_check: coordinate sampling probes the requested count") {
    Rng rng(9);
    auto net = DenseNet::mlp(6, {40, 30}, Activation::relu, 1, Activation::sigmoid, 3);
    const auto r = grad_check(net, random_matrix(4, 6, rng), random_targets(4, rng), HeadLoss::bce, 1e-5, 10, 1);
    CHECK(r.checked + r.skipped == 10 * 5 + 1);  // 5 tensors above 10 entries, one 1-element bias
    CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("adam first step moves every parameter by lr against the gradient sign") {
    auto net = DenseNet::mlp(3, {4}, Activation::relu, 1, Activation::sigmoid, 5);
    const auto before = net;
    Rng rng(10);
    const auto cache = net.forward(random_matrix(8, 3, rng));
    const auto g = net.backward_bce(cache, random_targets(8, rng));
    net.adam_step(g, 0.01);
    for (std::size_t i = 0; i < net.layers().size(); ++i)
        for (Index k = 0; k < g.weights[i].size(); ++k) {
            const double gk = g.weights[i].data()[k];
            const double expect = -0.01 * gk / (std::abs(gk) + 1e-8);
            CHECK(net.layers()[i].weights.data()[k] - before.layers()[i].weights.data()[k] ==
                  doctest::Approx(expect).epsilon(1e-9));
        }
    CHECK(net.optimizer().step == 1);
}

TEST_CASE("adam with a zero gradient leaves parameters unchanged") {
    auto net = DenseNet::mlp(3, {4}, Activation::relu, 1, Activation::sigmoid, 5);
    const auto sum = net.checksum();
    Gradients<double> zero;
    for (const auto& l : net.layers()) {
        zero.weights.push_back(Matrix::Zero(l.fan_in(), l.fan_out()));
        zero.bias.push_back(Vector::Zero(l.fan_out()));
    }
    net.adam_step(zero, 0.1);
    CHECK(net.checksum() == sum);
}

TEST_CASE("adam on (w - 3)^2 follows the scalar recurrence") {
    DenseLayer<double> l;
    l.weights = Matrix::Zero(1, 1);
    l.bias = Vector::Zero(1);
    auto net = DenseNet::from_layers({l});
    double w = 0, m = 0, v = 0;
    for (int t = 1; t <= 200; ++t) {
        const double g = 2 * (w - 3);
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        w -= 0.1 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);

        Gradients<double> grads;
        grads.weights.push_back(Matrix::Constant(1, 1, 2 * (net.layers()[0].weights(0, 0) - 3)));
        grads.bias.push_back(Vector::Zero(1));
        net.adam_step(grads, 0.1);
    }
    CHECK(std::abs(net.layers()[0].weights(0, 0) - w) < 1e-12);
    CHECK(std::abs(w - 3) < 0.1);
}

TEST_CASE("adam rejects non-finite gradients without touching parameters") {
    auto net = DenseNet::mlp(2, {2}, Activation::relu, 1, Activation::sigmoid, 5);
    const auto sum = net.checksum();
    Gradients<double> g;
    for (const auto& l : net.layers()) {
        g.weights.push_back(Matrix::Zero(l.fan_in(), l.fan_out()));
        g.bias.push_back(Vector::Zero(l.fan_out()));
    }
    g.weights[0](0, 0) = std::nan("");
    CHECK_THROWS_AS(net.adam_step(g, 0.1), TrainingError);
    CHECK(net.checksum() == sum);
    CHECK(net.optimizer().step == 0);
}

TEST_CASE("xor is learned by a 2-16-1 net") {
    for (std::uint64_t seed : {1, 2, 3}) {
        auto net = DenseNet::mlp(2, {16}, Activation::leaky_relu, 1, Activation::sigmoid, seed);
        TrainConfig cfg;
        cfg.epochs = 500;
        cfg.learning_rate = 0.01;
        cfg.seed = seed;
        const auto report = train_supervised(net, xor_data(), cfg);
        CHECK(report.final_train_accuracy == 1.0);
        CHECK(report.stopped_epoch == 500);
    }
}

TEST_CASE("separable blobs reach full accuracy within 50 epochs") {
    const Dataset ds = blobs(150, 4, 0.25);
    auto net = make_classifier(2, {}, 7);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.learning_rate = 0.01;
    cfg.seed = 3;
    CHECK(train_supervised(net, ds, cfg).final_train_accuracy == 1.0);
}

TEST_CASE("zero epochs return an empty report and leave the net alone") {
    auto net = make_classifier(2, {}, 7);
    const auto sum = net.checksum();
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto report = train_supervised(net, xor_data(), cfg);
    CHECK(report.loss_per_epoch.empty());
    CHECK(report.stopped_epoch == 0);
    CHECK(net.checksum() == sum);
}

TEST_CASE("training is bitwise deterministic") {
    const Dataset ds = blobs(90, 2, 0.05);
    const Dataset val = blobs(30, 3, 0.05);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = 11;
    auto a = make_classifier(2, {}, 5);
    auto b = make_classifier(2, {}, 5);
    const auto ra = train_supervised(a, ds, cfg, &val);
    const auto rb = train_supervised(b, ds, cfg, &val);
    CHECK(ra.loss_per_epoch == rb.loss_per_epoch);
    CHECK(ra.validation_loss_per_epoch == rb.validation_loss_per_epoch);
    CHECK(a.checksum() == b.checksum());
}

TEST_CASE("early stopping bounds and patience") {
    const Dataset ds = blobs(90, 2, 0.02);
    const Dataset val = blobs(60, 9, 0.02);
    TrainConfig cfg;
    cfg.epochs = 300;
    cfg.learning_rate = 0.01;
    cfg.early_stop_patience = 3;
    auto net = make_classifier(2, {}, 5);
    const auto r = train_supervised(net, ds, cfg, &val);
    CHECK(r.stopped_epoch <= 300);
    CHECK(static_cast<int>(r.loss_per_epoch.size()) == r.stopped_epoch);
    CHECK(r.best_epoch <= r.stopped_epoch);
    // Best weights are restored.
    CHECK(bce_loss(net.predict(val.features), val.labels.cast<double>()) ==
          doctest::Approx(r.validation_loss_per_epoch[static_cast<std::size_t>(r.best_epoch - 1)]));

    cfg.early_stop_patience = 0;
    cfg.epochs = 40;
    auto again = make_classifier(2, {}, 5);
    CHECK(train_supervised(again, ds, cfg, &val).stopped_epoch == 40);
}

TEST_CASE("grid over the stated lists has 60 candidates, all evaluated") {
    const auto grid = expand_grid(GridSpace{});
    CHECK(grid.size() == 60);
    const Dataset ds = blobs(40, 5, 0.2);
    const auto result = grid_search(ds, grid, {{8}, Activation::leaky_relu}, 3);
    CHECK(result.evaluations.size() == 60);
}

TEST_CASE("grid search: single candidate returned unchanged") {
    TrainConfig only;
    only.batch_size = 64;
    only.epochs = 7;
    only.learning_rate = 3e-3;
    const auto r = grid_search(blobs(30, 1, 0.2), {only}, {}, 1);
    CHECK(r.best.batch_size == 64);
    CHECK(r.best.epochs == 7);
    CHECK(r.best.learning_rate == 3e-3);
}

TEST_CASE("grid search: a sabotaged learning rate loses") {
    TrainConfig sane, wild;
    sane.epochs = wild.epochs = 60;
    sane.learning_rate = 1e-2;
    wild.learning_rate = 1e10;
    const auto r = grid_search(blobs(90, 1, 0.25), {wild, sane}, {}, 2);
    CHECK(r.best.learning_rate == 1e-2);
}

TEST_CASE("network json round trip") {
    const auto net = DenseNet::mlp(3, {5, 4}, Activation::leaky_relu, 2, Activation::sigmoid, 17);
    const auto back = densenet_from_json(densenet_to_json(net));
    CHECK(back.checksum() == net.checksum());
    CHECK(back.init_seed() == 17);
    Rng rng(1);
    const Matrix x = random_matrix(4, 3, rng);
    CHECK(back.predict(x) == net.predict(x));

    const auto path = std::filesystem::temp_directory_path() / "imbgan_net.json";
    save_densenet(path.string(), net);
    CHECK(load_densenet(path.string()).checksum() == net.checksum());
    std::filesystem::remove(path);

    auto j = densenet_to_json(net);
    j["version"] = 99;
    CHECK_THROWS_AS(densenet_from_json(j), ConfigError);
    j = densenet_to_json(net);
    j["layers"][0]["weights"].erase(0);
    CHECK_THROWS_AS(densenet_from_json(j), ConfigError);
}

TEST_CASE("train report json") {
    auto net = make_classifier(2, {}, 7);
    TrainConfig cfg;
    cfg.epochs = 3;
    const auto r = train_supervised(net, xor_data(), cfg);
    const auto j = train_report_to_json(r);
    CHECK(j.at("stopped_epoch") == 3);
    CHECK(j.at("loss_per_epoch").size() == 3);
}
