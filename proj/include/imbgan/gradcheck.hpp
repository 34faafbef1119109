#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imbgan/nnet.hpp"

namespace imbgan {

struct GradCheckOptions {
    int batches = 20;
    Index batch_rows = 8;
    Index n_features = 8;
    /// Coordinates probed per weight matrix / bias vector; 0 probes all.
    Index max_per_tensor = 16;
    double h = 1e-5;
    std::uint64_t seed = 0;
};

struct GradCheckCase {
    std::string name;
    GradCheckResult worst;  // max error, summed checked/skipped counts
    int batches = 0;
};

/// Finite-difference check of the classifier, generator, discriminator and
/// the generator-through-discriminator composite, each on `batches` random
/// batches with freshly initialised default-sized networks.
std::vector<GradCheckCase> run_gradcheck_suite(const GradCheckOptions& options);

}  // namespace imbgan
