#include "imbgan/classifier.hpp"

namespace imbgan {

DenseNet make_classifier(Index n_features, const ClassifierSpec& spec, std::uint64_t init_seed) {
    return DenseNet::mlp(n_features, spec.hidden, spec.hidden_activation, 1, Activation::sigmoid, init_seed);
}

std::vector<TrainConfig> expand_grid(const GridSpace& space, const TrainConfig& base) {
    std::vector<TrainConfig> out;
    for (Index batch : space.batch_sizes)
        for (int epochs : space.epochs)
            for (double lr : space.learning_rates) {
                TrainConfig cfg = base;
                cfg.batch_size = batch;
                cfg.epochs = epochs;
                cfg.learning_rate = lr;
                out.push_back(cfg);
            }
    return out;
}

GridSearchResult grid_search(const Dataset& train, const std::vector<TrainConfig>& candidates,
                             const ClassifierSpec& spec, std::uint64_t seed) {
    if (candidates.empty()) throw ParameterError("grid_search needs at least one candidate");
    GridSearchResult result;
    if (candidates.size() == 1) {
        result.best = candidates.front();
        result.evaluations.push_back({candidates.front(), 0.0, false, {}});
        return result;
    }

    const Split split = train_test_split(train, {0.8, derive_seed(seed, 0), true});
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        GridEvaluation eval{candidates[i], 0.0, false, {}};
        try {
            DenseNet net = make_classifier(train.n_features(), spec, derive_seed(seed, 1));
            train_supervised(net, split.train, candidates[i], &split.test);
            eval.validation_accuracy = accuracy_of(predict_labels(net, split.test.features), split.test.labels);
        } catch (const Error& e) {
            eval.failed = true;
            eval.error = e.what();
        }
        result.evaluations.push_back(eval);
        if (eval.failed) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& cur = result.evaluations[*best];
        const bool better =
            eval.validation_accuracy > cur.validation_accuracy ||
            (eval.validation_accuracy == cur.validation_accuracy &&
             (eval.config.learning_rate < cur.config.learning_rate ||
              (eval.config.learning_rate == cur.config.learning_rate &&
               eval.config.batch_size < cur.config.batch_size)));
        if (better) best = i;
    }
    if (!best) throw TrainingError("grid_search: every candidate failed to train");
    result.best = result.evaluations[*best].config;
    return result;
}

}  // namespace imbgan
