#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "imbgan/core.hpp"
#include "imbgan/nnet.hpp"
#include "imbgan/oversample.hpp"
#include "imbgan/svm.hpp"

namespace imbgan {

struct GanConfig {
    /// Generator input width for noise-seeded training.
    Index latent_dim = 32;
    std::vector<Index> generator_hidden{128, 256, 512, 1024};
    std::vector<Index> discriminator_hidden{512, 256, 128};
    Index batch_size = 32;
    double learning_rate = 1e-5;
    /// Epoch cap.
    int epochs = 500;
    int d_steps_per_g_step = 1;
    std::uint64_t seed = 0;

    /// Early stop: once at least `min_epochs` have run, stop when the mean of
    /// |d_loss - ln 2| over the last `stability_window` epochs differs from the
    /// mean over the window before it by less than `stability_tol`.
    /// stability_tol <= 0 disables the rule.
    int stability_window = 20;
    int min_epochs = 100;
    double stability_tol = 1e-3;

    Activation generator_head = Activation::sigmoid;
    /// Test hook: pass-through generator (requires input width == output
    /// width and a linear head).
    bool identity_generator = false;
};

enum class SeedSource { gaussian_noise, svm_smote_output };

const char* to_string(SeedSource s);

struct SeedBatch {
    SeedSource source = SeedSource::gaussian_noise;
    Matrix data;
    /// Pool rows drawn (svm_smote_output only).
    std::vector<Index> pool_rows;
};

/// Supplies generator inputs: N(0,1) noise of a fixed width, or rows drawn
/// uniformly with replacement from a pool of SVM-SMOTE samples.
class SeedSampler {
public:
    static SeedSampler noise(Index latent_dim);
    static SeedSampler pool(Matrix rows);

    SeedSource source() const { return source_; }
    Index width() const { return source_ == SeedSource::gaussian_noise ? latent_dim_ : pool_.cols(); }
    const Matrix& pool_rows() const { return pool_; }

    SeedBatch draw(Index n, Rng& rng) const;

private:
    SeedSource source_ = SeedSource::gaussian_noise;
    Index latent_dim_ = 0;
    Matrix pool_;
};

struct EpochLoss {
    double d_loss = 0.0;
    double g_loss = 0.0;
};

struct GanModel {
    DenseNet generator;
    DenseNet discriminator;
    std::vector<EpochLoss> loss_history;
    SeedSource seed_mode = SeedSource::gaussian_noise;
    int stopped_epoch = 0;
    bool early_stopped = false;
};

/// -[mean log D(x) + mean log(1 - D(G(z)))], predictions clamped to
/// [1e-7, 1 - 1e-7].
double discriminator_loss(const Vector& d_real, const Vector& d_fake);

/// Non-saturating generator objective -mean log D(G(z)).
double generator_loss(const Vector& d_fake);

DenseNet make_generator(Index input_width, Index n_features, const GanConfig& cfg, std::uint64_t init_seed);
DenseNet make_discriminator(Index n_features, const GanConfig& cfg, std::uint64_t init_seed);

/// One discriminator update on real rows (target 1) and generated rows
/// (target 0). The generator is not modified. Returns the loss before the
/// update.
double discriminator_step(DenseNet& discriminator, const DenseNet& generator, const Matrix& real,
                          const Matrix& seeds, double learning_rate);

/// Generator loss and its gradient through the (unchanged) discriminator.
Gradients<double> generator_gradients(const DenseNet& generator, const DenseNet& discriminator,
                                      const Matrix& seeds, double* loss = nullptr);

/// One generator update through the frozen discriminator. Returns the loss
/// before the update.
double generator_step(DenseNet& generator, const DenseNet& discriminator, const Matrix& seeds,
                      double learning_rate);

/// Adversarial training on `real` rows (scaled to [0,1]). Each iteration
/// makes d_steps_per_g_step discriminator updates on a real half-batch plus
/// a generated half-batch, then one generator update on a full batch of
/// seeds. An epoch is ceil(rows / half-batch) iterations; real rows are
/// drawn without replacement, or with replacement when there are fewer
/// than batch_size of them.
GanModel train_gan(const Matrix& real, const GanConfig& cfg, const SeedSampler& seeds);

/// Generator output for every seed row, evaluated in chunks.
Matrix generate(const DenseNet& generator, const Matrix& seeds);

/// True when every output column has standard deviation below 1e-6.
bool mode_collapsed(const Matrix& generated);

struct GanOversampleResult {
    SyntheticBatch batch;
    GanModel model;
    std::vector<std::string> warnings;
};

/// GAN trained on the minority rows of a [0,1]-scaled training set with
/// Gaussian noise inputs; emits n_synthetic samples clamped to [0,1].
GanOversampleResult gbo_oversample(const Dataset& train, Index n_synthetic, const GanConfig& cfg);

struct SsgParams {
    SvmParams svm;
    Index k = 5;
    Index m = 10;
    /// SVM-SMOTE rows generated as the training seed pool; 0 picks
    /// max(n_synthetic, minority count, batch_size).
    Index pool_size = 0;
};

/// SVM-SMOTE samples feed the generator instead of noise. The generator is
/// trained on a pool of SVM-SMOTE rows, then applied to freshly drawn
/// SVM-SMOTE rows to produce the output, clamped to [0,1].
GanOversampleResult ssg_oversample(const Dataset& train, Index n_synthetic, const GanConfig& cfg,
                                   const SsgParams& params = {});

/// "epoch,d_loss,g_loss" with 1-based epochs.
void write_loss_history_csv(std::ostream& out, const GanModel& model);
void write_loss_history_csv(const std::string& path, const GanModel& model);

}  // namespace imbgan
