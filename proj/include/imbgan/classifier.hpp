#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imbgan/nnet.hpp"

namespace imbgan {

/// Architecture of the binary classifier used by the benchmark.
struct ClassifierSpec {
    std::vector<Index> hidden{64, 32};
    Activation hidden_activation = Activation::leaky_relu;
};

DenseNet make_classifier(Index n_features, const ClassifierSpec& spec, std::uint64_t init_seed);

/// Candidate lists used for the grid search over training settings.
struct GridSpace {
    std::vector<Index> batch_sizes{32, 64, 128};
    std::vector<int> epochs{40, 50, 100, 200, 500};
    std::vector<double> learning_rates{1e-5, 1e-4, 1e-3, 1e-2};
};

/// Every (batch, epochs, lr) combination, batch-major, with `base` supplying
/// the remaining fields.
std::vector<TrainConfig> expand_grid(const GridSpace& space, const TrainConfig& base = {});

struct GridEvaluation {
    TrainConfig config;
    double validation_accuracy = 0.0;
    bool failed = false;
    std::string error;
};

struct GridSearchResult {
    TrainConfig best;
    std::vector<GridEvaluation> evaluations;
};

/// Train one classifier per candidate on a seeded stratified 80% of `train`
/// and score it on the remaining 20%. The highest validation accuracy wins;
/// ties go to the lower learning rate, then the smaller batch, then the
/// earlier candidate. Candidates that fail to train are logged and skipped.
GridSearchResult grid_search(const Dataset& train, const std::vector<TrainConfig>& candidates,
                             const ClassifierSpec& spec, std::uint64_t seed);

}  // namespace imbgan
