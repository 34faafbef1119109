#include "imbgan/gradcheck.hpp"

#include "imbgan/classifier.hpp"
#include "imbgan/gan.hpp"

namespace imbgan {

namespace {

Matrix uniform_matrix(Index rows, Index cols, Rng& rng, double lo, double hi) {
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

Matrix normal_matrix(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

Matrix binary_targets(Index rows, Rng& rng) {
    Matrix t(rows, 1);
    for (Index i = 0; i < rows; ++i) t(i, 0) = static_cast<double>(i % 2 == 0 ? 1 : rng.uniform_index(2));
    return t;
}

void merge(GradCheckCase& c, const GradCheckResult& r) {
    c.worst.max_relative_error = std::max(c.worst.max_relative_error, r.max_relative_error);
    c.worst.checked += r.checked;
    c.worst.skipped += r.skipped;
    ++c.batches;
}

}  // namespace

std::vector<GradCheckCase> run_gradcheck_suite(const GradCheckOptions& o) {
    std::vector<GradCheckCase> cases{{"classifier", {}, 0}, {"generator", {}, 0}, {"discriminator", {}, 0},
                                     {"generator_through_discriminator", {}, 0}};
    const GanConfig gan;
    for (int b = 0; b < o.batches; ++b) {
        const std::uint64_t s = derive_seed(o.seed, static_cast<std::uint64_t>(b));
        Rng rng(derive_seed(s, 0));

        DenseNet clf = make_classifier(o.n_features, ClassifierSpec{}, derive_seed(s, 1));
        merge(cases[0], grad_check(clf, uniform_matrix(o.batch_rows, o.n_features, rng, 0.0, 1.0),
                                   binary_targets(o.batch_rows, rng), HeadLoss::bce, o.h, o.max_per_tensor,
                                   derive_seed(s, 2)));

        DenseNet gen = make_generator(gan.latent_dim, o.n_features, gan, derive_seed(s, 3));
        const Matrix noise = normal_matrix(o.batch_rows, gan.latent_dim, rng);
        merge(cases[1], grad_check(gen, noise, uniform_matrix(o.batch_rows, o.n_features, rng, 0.0, 1.0),
                                   HeadLoss::squared, o.h, o.max_per_tensor, derive_seed(s, 4)));

        DenseNet disc = make_discriminator(o.n_features, gan, derive_seed(s, 5));
        merge(cases[2], grad_check(disc, uniform_matrix(o.batch_rows, o.n_features, rng, 0.0, 1.0),
                                   binary_targets(o.batch_rows, rng), HeadLoss::bce, o.h, o.max_per_tensor,
                                   derive_seed(s, 6)));

        const auto analytic = generator_gradients(gen, disc, noise);
        auto composite = [&]() {
            const auto gc = gen.forward(noise);
            const auto dc = disc.forward(gc.output);
            auto pattern = rectifier_pattern(gen, gc);
            const auto dp = rectifier_pattern(disc, dc);
            pattern.insert(pattern.end(), dp.begin(), dp.end());
            return std::make_pair(generator_loss(dc.output.col(0)), std::move(pattern));
        };
        merge(cases[3], grad_check_against(gen, analytic, composite, o.h, o.max_per_tensor, derive_seed(s, 7)));
    }
    return cases;
}

}  // namespace imbgan
