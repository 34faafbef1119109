#include "imbgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>

namespace imbgan {

namespace {

constexpr Index kGenerateChunk = 1024;

double clamped_log(double p) { return std::log(std::clamp(p, kBceEpsilon, 1.0 - kBceEpsilon)); }

Matrix rows_of(const Matrix& m, const std::vector<Index>& rows) { return m(rows, Eigen::all); }

/// Pass-through weights: each hidden layer embeds its input in its first
/// columns, so non-negative inputs survive the relus unchanged.
DenseNet identity_generator(Index width, const GanConfig& cfg) {
    std::vector<DenseLayer<double>> layers;
    Index fan_in = width;
    auto embed = [&](Index fan_out, Activation act) {
        if (fan_out < width)
            throw ParameterError("identity generator needs hidden layers at least as wide as the input");
        DenseLayer<double> l;
        l.activation = act;
        l.weights = Matrix::Zero(fan_in, fan_out);
        l.weights.topLeftCorner(width, width).setIdentity();
        l.bias = Vector::Zero(fan_out);
        layers.push_back(std::move(l));
        fan_in = fan_out;
    };
    for (Index h : cfg.generator_hidden) embed(h, Activation::relu);
    embed(width, cfg.generator_head);
    return DenseNet::from_layers(std::move(layers));
}

}  // namespace

const char* to_string(SeedSource s) {
    return s == SeedSource::gaussian_noise ? "gaussian_noise" : "svm_smote_output";
}

SeedSampler SeedSampler::noise(Index latent_dim) {
    if (latent_dim < 1) throw ParameterError("latent_dim must be positive");
    SeedSampler s;
    s.source_ = SeedSource::gaussian_noise;
    s.latent_dim_ = latent_dim;
    return s;
}

SeedSampler SeedSampler::pool(Matrix rows) {
    if (rows.rows() < 1) throw DegenerateDataError("seed pool is empty");
    SeedSampler s;
    s.source_ = SeedSource::svm_smote_output;
    s.pool_ = std::move(rows);
    return s;
}

SeedBatch SeedSampler::draw(Index n, Rng& rng) const {
    SeedBatch batch;
    batch.source = source_;
    if (source_ == SeedSource::gaussian_noise) {
        batch.data.resize(n, latent_dim_);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < latent_dim_; ++j) batch.data(i, j) = rng.normal();
        return batch;
    }
    batch.pool_rows.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        batch.pool_rows.push_back(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(pool_.rows()))));
    batch.data = rows_of(pool_, batch.pool_rows);
    return batch;
}

double discriminator_loss(const Vector& d_real, const Vector& d_fake) {
    double real = 0.0;
    for (Index i = 0; i < d_real.size(); ++i) real += clamped_log(d_real(i));
    double fake = 0.0;
    for (Index i = 0; i < d_fake.size(); ++i) fake += clamped_log(1.0 - d_fake(i));
    const double mean_real = d_real.size() ? real / static_cast<double>(d_real.size()) : 0.0;
    const double mean_fake = d_fake.size() ? fake / static_cast<double>(d_fake.size()) : 0.0;
    return -(mean_real + mean_fake);
}

double generator_loss(const Vector& d_fake) {
    if (d_fake.size() == 0) return 0.0;
    double total = 0.0;
    for (Index i = 0; i < d_fake.size(); ++i) total += clamped_log(d_fake(i));
    return -total / static_cast<double>(d_fake.size());
}

DenseNet make_generator(Index input_width, Index n_features, const GanConfig& cfg, std::uint64_t init_seed) {
    if (cfg.identity_generator) {
        if (input_width != n_features) throw ParameterError("identity generator needs input width == n_features");
        return identity_generator(n_features, cfg);
    }
    return DenseNet::mlp(input_width, cfg.generator_hidden, Activation::relu, n_features, cfg.generator_head,
                         init_seed);
}

DenseNet make_discriminator(Index n_features, const GanConfig& cfg, std::uint64_t init_seed) {
    return DenseNet::mlp(n_features, cfg.discriminator_hidden, Activation::leaky_relu, 1, Activation::sigmoid,
                         init_seed);
}

double discriminator_step(DenseNet& discriminator, const DenseNet& generator, const Matrix& real,
                          const Matrix& seeds, double learning_rate) {
    const Matrix fake = generator.predict(seeds);
    const Index n_real = real.rows();
    const Index n_fake = fake.rows();
    Matrix batch(n_real + n_fake, real.cols());
    batch.topRows(n_real) = real;
    batch.bottomRows(n_fake) = fake;

    const auto cache = discriminator.forward(batch);
    const Vector p = cache.output.col(0);
    const double loss = discriminator_loss(p.head(n_real), p.tail(n_fake));
    if (!std::isfinite(loss)) throw TrainingError("discriminator loss is non-finite");

    // Each half is averaged separately, matching the two expectations.
    Matrix grad_pre(n_real + n_fake, 1);
    grad_pre.topRows(n_real) = (p.head(n_real).array() - 1.0) / static_cast<double>(n_real);
    grad_pre.bottomRows(n_fake) = p.tail(n_fake).array() / static_cast<double>(n_fake);
    discriminator.adam_step(discriminator.backward_from_pre(cache, std::move(grad_pre)), learning_rate);
    return loss;
}

Gradients<double> generator_gradients(const DenseNet& generator, const DenseNet& discriminator,
                                      const Matrix& seeds, double* loss) {
    const auto g_cache = generator.forward(seeds);
    const auto d_cache = discriminator.forward(g_cache.output);
    const Vector p = d_cache.output.col(0);
    if (loss) *loss = generator_loss(p);
    const Matrix grad_pre = (p.array() - 1.0).matrix() / static_cast<double>(p.size());
    const auto d_grads = discriminator.backward_from_pre(d_cache, grad_pre);
    return generator.backward(g_cache, d_grads.input);
}

double generator_step(DenseNet& generator, const DenseNet& discriminator, const Matrix& seeds,
                      double learning_rate) {
    double loss = 0.0;
    const auto grads = generator_gradients(generator, discriminator, seeds, &loss);
    if (!std::isfinite(loss)) throw TrainingError("generator loss is non-finite");
    generator.adam_step(grads, learning_rate);
    return loss;
}

GanModel train_gan(const Matrix& real, const GanConfig& cfg, const SeedSampler& seeds) {
    if (real.rows() < 1) throw DegenerateDataError("train_gan: no real rows");
    if (cfg.batch_size < 2) throw ParameterError("train_gan: batch_size must be at least 2");
    if (cfg.epochs < 0) throw ParameterError("train_gan: epochs must be non-negative");
    if (cfg.d_steps_per_g_step < 1) throw ParameterError("train_gan: d_steps_per_g_step must be >= 1");
    if (!real.allFinite()) throw ConfigError("train_gan: real rows contain non-finite values");

    const Index n_features = real.cols();
    const Rng root(cfg.seed);
    GanModel model;
    model.seed_mode = seeds.source();
    model.generator = make_generator(seeds.width(), n_features, cfg, derive_seed(cfg.seed, 0));
    model.discriminator = make_discriminator(n_features, cfg, derive_seed(cfg.seed, 1));

    Rng rng = root.child(2);
    const Index half = cfg.batch_size / 2;
    const Index n = real.rows();
    const bool with_replacement = n < cfg.batch_size;
    const Index iterations = std::max<Index>(1, (n + half - 1) / half);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const double ln2 = std::numbers::ln2;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (!with_replacement) shuffle(order, rng);
        double d_total = 0.0;
        double g_total = 0.0;
        Index cursor = 0;
        for (Index it = 0; it < iterations; ++it) {
            double d_loss = 0.0;
            for (int s = 0; s < cfg.d_steps_per_g_step; ++s) {
                std::vector<Index> rows;
                if (with_replacement) {
                    for (Index r = 0; r < half; ++r)
                        rows.push_back(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));
                } else {
                    if (cursor >= n) {
                        shuffle(order, rng);
                        cursor = 0;
                    }
                    const Index stop = std::min(n, cursor + half);
                    rows.assign(order.begin() + cursor, order.begin() + stop);
                    cursor = stop;
                }
                const Matrix real_batch = rows_of(real, rows);
                const auto fake_seeds = seeds.draw(static_cast<Index>(rows.size()), rng);
                d_loss += discriminator_step(model.discriminator, model.generator, real_batch, fake_seeds.data,
                                             cfg.learning_rate);
            }
            const auto g_seeds = seeds.draw(cfg.batch_size, rng);
            const double g_loss = generator_step(model.generator, model.discriminator, g_seeds.data, cfg.learning_rate);
            d_total += d_loss / cfg.d_steps_per_g_step;
            g_total += g_loss;
        }
        const EpochLoss loss{d_total / static_cast<double>(iterations), g_total / static_cast<double>(iterations)};
        if (!std::isfinite(loss.d_loss) || !std::isfinite(loss.g_loss) || !model.generator.parameters_finite() ||
            !model.discriminator.parameters_finite())
            throw TrainingError("GAN training produced non-finite values at epoch " + std::to_string(epoch));
        model.loss_history.push_back(loss);
        model.stopped_epoch = epoch;

        const int w = cfg.stability_window;
        if (cfg.stability_tol > 0.0 && w > 0 && epoch >= cfg.min_epochs && epoch >= 2 * w) {
            auto window_mean = [&](int end) {
                double s = 0.0;
                for (int e = end - w; e < end; ++e)
                    s += std::abs(model.loss_history[static_cast<std::size_t>(e)].d_loss - ln2);
                return s / w;
            };
            if (std::abs(window_mean(epoch) - window_mean(epoch - w)) < cfg.stability_tol) {
                model.early_stopped = true;
                break;
            }
        }
    }
    return model;
}

Matrix generate(const DenseNet& generator, const Matrix& seeds) {
    Matrix out(seeds.rows(), generator.output_width());
    for (Index start = 0; start < seeds.rows(); start += kGenerateChunk) {
        const Index len = std::min(kGenerateChunk, seeds.rows() - start);
        out.middleRows(start, len) = generator.predict(seeds.middleRows(start, len));
    }
    return out;
}

bool mode_collapsed(const Matrix& generated) {
    if (generated.rows() < 2) return false;
    const RowVector mean = generated.colwise().mean();
    const RowVector var = (generated.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(generated.rows() - 1);
    return (var.array().sqrt() < 1e-6).all();
}

namespace {

/// Clamp into [0,1] and return whether each row was touched.
std::vector<bool> clamp_unit_box(Matrix& m) {
    std::vector<bool> touched(static_cast<std::size_t>(m.rows()), false);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            const double c = std::clamp(v, 0.0, 1.0);
            if (c != v) {
                m(i, j) = c;
                touched[static_cast<std::size_t>(i)] = true;
            }
        }
    }
    return touched;
}

void note_collapse(GanOversampleResult& result) {
    if (mode_collapsed(result.batch.samples))
        result.warnings.push_back("mode collapse: generated samples have near-zero variance in every feature");
}

}  // namespace

GanOversampleResult gbo_oversample(const Dataset& train, Index n_synthetic, const GanConfig& cfg) {
    train.validate();
    if (n_synthetic < 0) throw ParameterError("gbo: n_synthetic must be non-negative");
    const Matrix minority = minority_features(train);
    if (minority.rows() < 2)
        throw DegenerateDataError("gbo needs at least 2 minority rows, found " + std::to_string(minority.rows()));

    GanOversampleResult result;
    const auto sampler = SeedSampler::noise(cfg.latent_dim);
    result.model = train_gan(minority, cfg, sampler);

    Rng emit = Rng(cfg.seed).child(3);
    const auto seeds = sampler.draw(n_synthetic, emit);
    result.batch.samples = generate(result.model.generator, seeds.data);
    const auto clamped = clamp_unit_box(result.batch.samples);
    for (Index i = 0; i < n_synthetic; ++i)
        result.batch.provenance.push_back(
            {kNoRow, kNoRow, 0.0, SynthesisMode::gbo, std::nullopt, clamped[static_cast<std::size_t>(i)]});
    note_collapse(result);
    return result;
}

GanOversampleResult ssg_oversample(const Dataset& train, Index n_synthetic, const GanConfig& cfg,
                                   const SsgParams& params) {
    train.validate();
    if (n_synthetic < 0) throw ParameterError("ssg: n_synthetic must be non-negative");
    const Matrix minority = minority_features(train);
    if (minority.rows() < 2)
        throw DegenerateDataError("ssg needs at least 2 minority rows, found " + std::to_string(minority.rows()));

    SvmParams svm_params = params.svm;
    svm_params.seed = derive_seed(cfg.seed, 10);
    const SvmModel svm = train_linear_svm(train, svm_params);

    const Index pool_size = params.pool_size > 0 ? params.pool_size
                                                 : std::max({n_synthetic, minority.rows(), cfg.batch_size});
    OversampleRequest pool_req{pool_size, params.k, params.m, derive_seed(cfg.seed, 11), Range{0.0, 1.0}};
    const SyntheticBatch pool = svm_smote(train, svm, pool_req);

    GanOversampleResult result;
    result.warnings = pool.warnings;
    result.model = train_gan(minority, cfg, SeedSampler::pool(pool.samples));

    OversampleRequest emit_req{n_synthetic, params.k, params.m, derive_seed(cfg.seed, 12), Range{0.0, 1.0}};
    const SyntheticBatch parents = svm_smote(train, svm, emit_req);
    result.batch.samples = generate(result.model.generator, parents.samples);
    const auto clamped = clamp_unit_box(result.batch.samples);
    for (Index i = 0; i < n_synthetic; ++i) {
        const auto& parent = parents.provenance[static_cast<std::size_t>(i)];
        result.batch.provenance.push_back({parent.base_index, parent.neighbor_index, parent.delta, SynthesisMode::ssg,
                                           parent.mode, clamped[static_cast<std::size_t>(i)]});
    }
    note_collapse(result);
    return result;
}

void write_loss_history_csv(std::ostream& out, const GanModel& model) {
    out << "epoch,d_loss,g_loss\n";
    char buf[96];
    for (std::size_t e = 0; e < model.loss_history.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e + 1, model.loss_history[e].d_loss,
                      model.loss_history[e].g_loss);
        out << buf;
    }
}

void write_loss_history_csv(const std::string& path, const GanModel& model) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_loss_history_csv(out, model);
}

}  // namespace imbgan
