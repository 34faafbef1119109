#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "imbgan/core.hpp"
#include "imbgan/errors.hpp"
#include "imbgan/rng.hpp"

namespace imbgan {

enum class Activation { relu, leaky_relu, sigmoid, linear };

inline constexpr double kLeakySlope = 0.2;
inline constexpr double kBceEpsilon = 1e-7;

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct LayerSpec {
    Index fan_in = 1;
    Index fan_out = 1;
    Activation activation = Activation::linear;
};

template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One fully connected layer: out = act(in * weights + bias^T), batch in rows.
template <typename Scalar>
struct DenseLayer {
    MatrixT<Scalar> weights;  // fan_in x fan_out
    VectorT<Scalar> bias;     // fan_out
    Activation activation = Activation::linear;

    Index fan_in() const { return weights.rows(); }
    Index fan_out() const { return weights.cols(); }
};

/// Per-layer values kept by forward() for backward().
template <typename Scalar>
struct ForwardCache {
    std::vector<MatrixT<Scalar>> inputs;  // inputs[i] feeds layer i
    std::vector<MatrixT<Scalar>> pre;     // pre-activations of layer i
    MatrixT<Scalar> output;
};

template <typename Scalar>
struct Gradients {
    std::vector<MatrixT<Scalar>> weights;
    std::vector<VectorT<Scalar>> bias;
    /// d loss / d network input.
    MatrixT<Scalar> input;

    bool all_finite() const {
        for (const auto& w : weights)
            if (!w.allFinite()) return false;
        for (const auto& b : bias)
            if (!b.allFinite()) return false;
        return true;
    }
};

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
    std::vector<MatrixT<Scalar>> m_weights, v_weights;
    std::vector<VectorT<Scalar>> m_bias, v_bias;
    std::int64_t step = 0;
    AdamHyper hyper;
};

namespace detail {

template <typename Scalar>
inline Scalar activate(Activation a, Scalar z) {
    switch (a) {
        case Activation::relu: return z > Scalar(0) ? z : Scalar(0);
        case Activation::leaky_relu: return z > Scalar(0) ? z : Scalar(kLeakySlope) * z;
        case Activation::sigmoid:
            return z >= Scalar(0) ? Scalar(1) / (Scalar(1) + std::exp(-z))
                                  : std::exp(z) / (Scalar(1) + std::exp(z));
        case Activation::linear: return z;
    }
    return z;
}

/// d act / d z, expressed through z and a = act(z).
template <typename Scalar>
inline Scalar activate_grad(Activation act, Scalar z, Scalar a) {
    switch (act) {
        case Activation::relu: return z > Scalar(0) ? Scalar(1) : Scalar(0);
        case Activation::leaky_relu: return z > Scalar(0) ? Scalar(1) : Scalar(kLeakySlope);
        case Activation::sigmoid: return a * (Scalar(1) - a);
        case Activation::linear: return Scalar(1);
    }
    return Scalar(1);
}

}  // namespace detail

/// Dense feed-forward network with its Adam optimiser state.
template <typename Scalar>
class BasicDenseNet {
public:
    using Mat = MatrixT<Scalar>;
    using Vec = VectorT<Scalar>;

    BasicDenseNet() = default;

    /// He-uniform init for relu/leaky-relu layers, Xavier-uniform otherwise,
    /// zero biases, drawn in layer order from `init_seed`.
    BasicDenseNet(const std::vector<LayerSpec>& specs, std::uint64_t init_seed) : init_seed_(init_seed) {
        if (specs.empty()) throw ParameterError("network needs at least one layer");
        Rng rng(init_seed);
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const auto& s = specs[i];
            if (s.fan_in < 1 || s.fan_out < 1)
                throw ParameterError("layer " + std::to_string(i) + ": fan_in and fan_out must be >= 1");
            if (i > 0 && specs[i - 1].fan_out != s.fan_in)
                throw ParameterError("layer " + std::to_string(i) + ": fan_in " + std::to_string(s.fan_in) +
                                     " does not chain with previous fan_out " +
                                     std::to_string(specs[i - 1].fan_out));
            const bool rectifier = s.activation == Activation::relu || s.activation == Activation::leaky_relu;
            const double limit = rectifier ? std::sqrt(6.0 / static_cast<double>(s.fan_in))
                                           : std::sqrt(6.0 / static_cast<double>(s.fan_in + s.fan_out));
            DenseLayer<Scalar> layer;
            layer.activation = s.activation;
            layer.weights.resize(s.fan_in, s.fan_out);
            for (Index r = 0; r < s.fan_in; ++r)
                for (Index c = 0; c < s.fan_out; ++c)
                    layer.weights(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
            layer.bias = Vec::Zero(s.fan_out);
            layers_.push_back(std::move(layer));
        }
        reset_optimizer();
    }

    /// Input -> hidden... -> output with one activation for all hidden layers.
    static BasicDenseNet mlp(Index input_width, const std::vector<Index>& hidden, Activation hidden_activation,
                             Index output_width, Activation head, std::uint64_t init_seed) {
        std::vector<LayerSpec> specs;
        Index fan_in = input_width;
        for (Index h : hidden) {
            specs.push_back({fan_in, h, hidden_activation});
            fan_in = h;
        }
        specs.push_back({fan_in, output_width, head});
        return BasicDenseNet(specs, init_seed);
    }

    /// Build from explicit parameters (deserialisation, test fixtures).
    static BasicDenseNet from_layers(std::vector<DenseLayer<Scalar>> layers, std::uint64_t init_seed = 0) {
        BasicDenseNet net;
        net.init_seed_ = init_seed;
        for (std::size_t i = 1; i < layers.size(); ++i)
            if (layers[i - 1].fan_out() != layers[i].fan_in())
                throw ParameterError("layer " + std::to_string(i) + ": shapes do not chain");
        for (std::size_t i = 0; i < layers.size(); ++i)
            if (layers[i].bias.size() != layers[i].fan_out())
                throw ParameterError("layer " + std::to_string(i) + ": bias length does not match fan_out");
        net.layers_ = std::move(layers);
        net.reset_optimizer();
        return net;
    }

    const std::vector<DenseLayer<Scalar>>& layers() const { return layers_; }
    std::vector<DenseLayer<Scalar>>& layers() { return layers_; }
    Index input_width() const { return layers_.empty() ? 0 : layers_.front().fan_in(); }
    Index output_width() const { return layers_.empty() ? 0 : layers_.back().fan_out(); }
    std::uint64_t init_seed() const { return init_seed_; }
    const AdamState<Scalar>& optimizer() const { return adam_; }

    Index parameter_count() const {
        Index n = 0;
        for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
        return n;
    }

    std::vector<LayerSpec> specs() const {
        std::vector<LayerSpec> out;
        for (const auto& l : layers_) out.push_back({l.fan_in(), l.fan_out(), l.activation});
        return out;
    }

    void reset_optimizer(AdamHyper hyper = {}) {
        adam_ = AdamState<Scalar>{};
        adam_.hyper = hyper;
        for (const auto& l : layers_) {
            adam_.m_weights.push_back(Mat::Zero(l.fan_in(), l.fan_out()));
            adam_.v_weights.push_back(Mat::Zero(l.fan_in(), l.fan_out()));
            adam_.m_bias.push_back(Vec::Zero(l.fan_out()));
            adam_.v_bias.push_back(Vec::Zero(l.fan_out()));
        }
    }

    template <typename Derived>
    ForwardCache<Scalar> forward(const Eigen::MatrixBase<Derived>& batch) const {
        if (batch.cols() != input_width())
            throw ParameterError("layer 0: input has " + std::to_string(batch.cols()) + " columns, expected " +
                                 std::to_string(input_width()));
        ForwardCache<Scalar> cache;
        cache.inputs.reserve(layers_.size());
        cache.pre.reserve(layers_.size());
        Mat a = batch;
        for (const auto& layer : layers_) {
            Mat z = a * layer.weights;
            z.rowwise() += layer.bias.transpose();
            cache.inputs.push_back(std::move(a));
            a = z.unaryExpr([act = layer.activation](Scalar v) { return detail::activate(act, v); });
            cache.pre.push_back(std::move(z));
        }
        cache.output = std::move(a);
        return cache;
    }

    /// Forward pass without keeping intermediates.
    template <typename Derived>
    Mat predict(const Eigen::MatrixBase<Derived>& batch) const {
        if (batch.cols() != input_width())
            throw ParameterError("layer 0: input has " + std::to_string(batch.cols()) + " columns, expected " +
                                 std::to_string(input_width()));
        Mat a = batch;
        for (const auto& layer : layers_) {
            Mat z = a * layer.weights;
            z.rowwise() += layer.bias.transpose();
            a = z.unaryExpr([act = layer.activation](Scalar v) { return detail::activate(act, v); });
        }
        return a;
    }

    /// Backpropagate an upstream gradient d loss / d output.
    Gradients<Scalar> backward(const ForwardCache<Scalar>& cache, const Mat& grad_output) const {
        check_cache(cache);
        if (grad_output.rows() != cache.output.rows() || grad_output.cols() != cache.output.cols())
            throw ParameterError("upstream gradient shape does not match network output");
        const auto& last = layers_.back();
        Mat grad_pre = grad_output.cwiseProduct(cache.pre.back().binaryExpr(
            cache.output, [act = last.activation](Scalar z, Scalar a) { return detail::activate_grad(act, z, a); }));
        return backward_from_pre(cache, std::move(grad_pre));
    }

    /// Backpropagate mean binary cross-entropy against `targets` (one column
    /// per output). With a sigmoid head the head gradient is (p - t) / n,
    /// which stays informative when p saturates.
    Gradients<Scalar> backward_bce(const ForwardCache<Scalar>& cache, const Mat& targets) const {
        check_cache(cache);
        if (targets.rows() != cache.output.rows() || targets.cols() != cache.output.cols())
            throw ParameterError("target shape does not match network output");
        const Scalar n = static_cast<Scalar>(cache.output.rows());
        if (layers_.back().activation == Activation::sigmoid)
            return backward_from_pre(cache, (cache.output - targets) / n);
        const Scalar eps = static_cast<Scalar>(kBceEpsilon);
        Mat grad = cache.output.binaryExpr(targets, [eps, n](Scalar p, Scalar t) {
            const Scalar q = std::clamp(p, eps, Scalar(1) - eps);
            return (q - t) / (q * (Scalar(1) - q)) / n;
        });
        return backward(cache, grad);
    }

    /// Start backpropagation from d loss / d (pre-activation of the last layer).
    Gradients<Scalar> backward_from_pre(const ForwardCache<Scalar>& cache, Mat grad_pre) const {
        check_cache(cache);
        const std::size_t L = layers_.size();
        Gradients<Scalar> g;
        g.weights.resize(L);
        g.bias.resize(L);
        for (std::size_t i = L; i-- > 0;) {
            const auto& layer = layers_[i];
            g.weights[i].noalias() = cache.inputs[i].transpose() * grad_pre;
            g.bias[i] = grad_pre.colwise().sum().transpose();
            Mat grad_in = grad_pre * layer.weights.transpose();
            if (i == 0) {
                g.input = std::move(grad_in);
                break;
            }
            const auto& below = layers_[i - 1];
            grad_pre = grad_in.cwiseProduct(cache.pre[i - 1].binaryExpr(
                cache.inputs[i], [act = below.activation](Scalar z, Scalar a) { return detail::activate_grad(act, z, a); }));
        }
        return g;
    }

    /// Bias-corrected Adam update. Throws TrainingError on non-finite gradients
    /// and leaves the parameters untouched in that case.
    void adam_step(const Gradients<Scalar>& grads, double learning_rate) {
        if (grads.weights.size() != layers_.size() || grads.bias.size() != layers_.size())
            throw ParameterError("gradient layer count does not match network");
        if (!grads.all_finite()) throw TrainingError("non-finite gradient passed to adam_step");
        auto& s = adam_;
        ++s.step;
        const Scalar b1 = static_cast<Scalar>(s.hyper.beta1);
        const Scalar b2 = static_cast<Scalar>(s.hyper.beta2);
        const Scalar eps = static_cast<Scalar>(s.hyper.epsilon);
        const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(s.step));
        const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(s.step));
        const Scalar lr = static_cast<Scalar>(learning_rate);
        auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
            m = b1 * m + (Scalar(1) - b1) * g;
            v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
            param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
        };
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            update(layers_[i].weights, s.m_weights[i], s.v_weights[i], grads.weights[i]);
            update(layers_[i].bias, s.m_bias[i], s.v_bias[i], grads.bias[i]);
        }
    }

    bool parameters_finite() const {
        for (const auto& l : layers_)
            if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
        return true;
    }

    /// Order-sensitive digest of every parameter bit pattern.
    std::uint64_t checksum() const {
        std::uint64_t h = 0x84222325CBF29CE4ULL;
        auto mix = [&h](Scalar v) {
            std::uint64_t bits = 0;
            const double d = static_cast<double>(v);
            std::memcpy(&bits, &d, sizeof bits);
            h = splitmix64(h ^ bits);
        };
        for (const auto& l : layers_) {
            for (Index k = 0; k < l.weights.size(); ++k) mix(l.weights.data()[k]);
            for (Index k = 0; k < l.bias.size(); ++k) mix(l.bias.data()[k]);
        }
        return h;
    }

private:
    void check_cache(const ForwardCache<Scalar>& cache) const {
        if (cache.inputs.size() != layers_.size() || cache.pre.size() != layers_.size())
            throw UsageError("backward called without a matching forward cache");
    }

    std::vector<DenseLayer<Scalar>> layers_;
    AdamState<Scalar> adam_;
    std::uint64_t init_seed_ = 0;
};

using DenseNet = BasicDenseNet<double>;

/// Mean of -[t log p + (1-t) log(1-p)] with p clamped to [eps, 1-eps].
template <typename DerivedP, typename DerivedT>
double bce_loss(const Eigen::MatrixBase<DerivedP>& predictions, const Eigen::MatrixBase<DerivedT>& targets) {
    if (predictions.size() != targets.size())
        throw ParameterError("bce_loss: " + std::to_string(predictions.size()) + " predictions vs " +
                             std::to_string(targets.size()) + " targets");
    if (predictions.size() == 0) return 0.0;
    double total = 0.0;
    const auto p = predictions.reshaped();
    const auto t = targets.reshaped();
    for (Index i = 0; i < p.size(); ++i) {
        const double q = std::clamp(static_cast<double>(p(i)), kBceEpsilon, 1.0 - kBceEpsilon);
        const double y = static_cast<double>(t(i));
        total -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
    }
    return total / static_cast<double>(p.size());
}

/// Mean over rows of the summed squared error.
template <typename DerivedP, typename DerivedT>
double squared_loss(const Eigen::MatrixBase<DerivedP>& predictions, const Eigen::MatrixBase<DerivedT>& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw ParameterError("squared_loss: shape mismatch");
    return (predictions - targets).squaredNorm() / static_cast<double>(std::max<Index>(1, predictions.rows()));
}

/// Sign pattern of every rectifier pre-activation; two evaluations with the
/// same pattern lie on the same linear piece of the network.
template <typename Scalar>
std::vector<std::uint8_t> rectifier_pattern(const BasicDenseNet<Scalar>& net, const ForwardCache<Scalar>& cache) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const auto act = net.layers()[i].activation;
        if (act != Activation::relu && act != Activation::leaky_relu) continue;
        const auto& z = cache.pre[i];
        for (Index k = 0; k < z.size(); ++k) out.push_back(z.data()[k] > Scalar(0) ? 1 : 0);
    }
    return out;
}

struct GradCheckResult {
    double max_relative_error = 0.0;
    Index checked = 0;
    /// Coordinates skipped because +h / -h crossed a rectifier kink.
    Index skipped = 0;
};

/// Compare `analytic` with central differences of `loss_fn` over the
/// parameters of `net`. `loss_fn()` returns the loss and the rectifier
/// pattern of the evaluation; coordinates whose perturbation changes the
/// pattern are skipped. With `max_per_tensor` > 0 only that many seeded
/// coordinates per weight matrix / bias vector are probed.
/// Relative error = |a - fd| / (|a| + |fd| + 1e-12).
template <typename Scalar, typename LossFn>
GradCheckResult grad_check_against(BasicDenseNet<Scalar>& net, const Gradients<Scalar>& analytic, LossFn&& loss_fn,
                                   double h = 1e-4, Index max_per_tensor = 0, std::uint64_t seed = 0) {
    GradCheckResult result;
    Rng rng(seed);
    const auto base_pattern = loss_fn().second;
    auto probe = [&](Scalar* param, Index size, const Scalar* grad) {
        std::vector<Index> coords(static_cast<std::size_t>(size));
        std::iota(coords.begin(), coords.end(), Index{0});
        if (max_per_tensor > 0 && size > max_per_tensor) {
            shuffle(coords, rng);
            coords.resize(static_cast<std::size_t>(max_per_tensor));
        }
        for (Index k : coords) {
            const Scalar saved = param[k];
            param[k] = saved + static_cast<Scalar>(h);
            const auto [plus, plus_pattern] = loss_fn();
            param[k] = saved - static_cast<Scalar>(h);
            const auto [minus, minus_pattern] = loss_fn();
            param[k] = saved;
            if (plus_pattern != base_pattern || minus_pattern != base_pattern) {
                ++result.skipped;
                continue;
            }
            const double fd = (static_cast<double>(plus) - static_cast<double>(minus)) / (2.0 * h);
            const double a = static_cast<double>(grad[k]);
            const double rel = std::abs(a - fd) / (std::abs(a) + std::abs(fd) + 1e-12);
            result.max_relative_error = std::max(result.max_relative_error, rel);
            ++result.checked;
        }
    };
    auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        probe(layers[i].weights.data(), layers[i].weights.size(), analytic.weights[i].data());
        probe(layers[i].bias.data(), layers[i].bias.size(), analytic.bias[i].data());
    }
    return result;
}

enum class HeadLoss { bce, squared };

/// Gradient check of `net` on (batch, targets) under a loss at the head.
template <typename Scalar>
GradCheckResult grad_check(BasicDenseNet<Scalar>& net, const MatrixT<Scalar>& batch, const MatrixT<Scalar>& targets,
                           HeadLoss loss = HeadLoss::bce, double h = 1e-4, Index max_per_tensor = 0,
                           std::uint64_t seed = 0) {
    const auto cache = net.forward(batch);
    const Scalar n = static_cast<Scalar>(batch.rows());
    const auto analytic = loss == HeadLoss::bce
                              ? net.backward_bce(cache, targets)
                              : net.backward(cache, MatrixT<Scalar>(Scalar(2) * (cache.output - targets) / n));
    auto loss_fn = [&]() {
        const auto c = net.forward(batch);
        const double value = loss == HeadLoss::bce ? bce_loss(c.output, targets) : squared_loss(c.output, targets);
        return std::make_pair(value, rectifier_pattern(net, c));
    };
    return grad_check_against(net, analytic, loss_fn, h, max_per_tensor, seed);
}

struct TrainConfig {
    Index batch_size = 32;
    int epochs = 100;
    double learning_rate = 1e-3;
    /// Epochs without validation improvement before stopping; <= 0 disables.
    int early_stop_patience = 10;
    double min_delta = 1e-4;
    std::uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> loss_per_epoch;
    std::vector<double> validation_loss_per_epoch;
    int stopped_epoch = 0;
    /// Epoch whose weights were kept (validation runs restore the best one).
    int best_epoch = 0;
    double final_train_accuracy = 0.0;
};

/// Rows with sigmoid output >= 0.5 are predicted as class 1.
template <typename Scalar>
Labels predict_labels(const BasicDenseNet<Scalar>& net, const Matrix& features) {
    const auto out = net.predict(features.cast<Scalar>());
    Labels labels(out.rows());
    for (Index i = 0; i < out.rows(); ++i) labels(i) = out(i, 0) >= Scalar(0.5) ? 1 : 0;
    return labels;
}

inline double accuracy_of(const Labels& predicted, const Labels& truth) {
    if (truth.size() == 0) return 0.0;
    return static_cast<double>((predicted.array() == truth.array()).count()) / static_cast<double>(truth.size());
}

/// Minibatch Adam on mean BCE. Rows are reshuffled each epoch from cfg.seed.
/// With a validation set, training stops once validation loss has not
/// improved by min_delta for `early_stop_patience` epochs and the best
/// weights are restored.
template <typename Scalar>
TrainReport train_supervised(BasicDenseNet<Scalar>& net, const Dataset& train, const TrainConfig& cfg,
                             const Dataset* validation = nullptr) {
    if (cfg.epochs < 0) throw ParameterError("epochs must be non-negative");
    if (cfg.batch_size < 1) throw ParameterError("batch_size must be positive");
    if (!(cfg.learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
    if (net.output_width() != 1) throw ParameterError("supervised training expects a single output");
    train.validate();

    using Mat = MatrixT<Scalar>;
    const Mat x = train.features.cast<Scalar>();
    const Mat y = train.labels.cast<Scalar>();
    std::optional<Mat> vx, vy;
    if (validation && validation->n_samples() > 0) {
        vx = validation->features.cast<Scalar>();
        vy = validation->labels.cast<Scalar>();
    }

    TrainReport report;
    Rng rng(cfg.seed);
    const Index n = x.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    std::optional<BasicDenseNet<Scalar>> best_net;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle(order, rng);
        double weighted = 0.0;
        for (Index start = 0; start < n; start += cfg.batch_size) {
            const Index stop = std::min(n, start + cfg.batch_size);
            Mat bx(stop - start, x.cols());
            Mat by(stop - start, 1);
            for (Index r = start; r < stop; ++r) {
                bx.row(r - start) = x.row(order[static_cast<std::size_t>(r)]);
                by(r - start, 0) = y(order[static_cast<std::size_t>(r)], 0);
            }
            const auto cache = net.forward(bx);
            const double loss = bce_loss(cache.output, by);
            if (!std::isfinite(loss))
                throw TrainingError("loss became non-finite at epoch " + std::to_string(epoch) +
                                    " (learning_rate " + std::to_string(cfg.learning_rate) + ")");
            weighted += loss * static_cast<double>(stop - start);
            net.adam_step(net.backward_bce(cache, by), cfg.learning_rate);
        }
        if (!net.parameters_finite())
            throw TrainingError("parameters became non-finite at epoch " + std::to_string(epoch) +
                                " (learning_rate " + std::to_string(cfg.learning_rate) + ")");
        report.loss_per_epoch.push_back(n > 0 ? weighted / static_cast<double>(n) : 0.0);
        report.stopped_epoch = epoch;
        report.best_epoch = epoch;

        if (vx) {
            const double val = bce_loss(net.predict(*vx), *vy);
            report.validation_loss_per_epoch.push_back(val);
            if (val < best_val - cfg.min_delta) {
                best_val = val;
                since_best = 0;
                best_net = net;
                report.best_epoch = epoch;
            } else {
                ++since_best;
                report.best_epoch = epoch - since_best;
                if (cfg.early_stop_patience > 0 && since_best >= cfg.early_stop_patience) break;
            }
        }
    }
    if (best_net) net = std::move(*best_net);
    if (report.stopped_epoch == 0) report.best_epoch = 0;
    report.final_train_accuracy = n > 0 ? accuracy_of(predict_labels(net, train.features), train.labels) : 0.0;
    return report;
}

}  // namespace imbgan
