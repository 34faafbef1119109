#include "imbgan/balance.hpp"

#include <iostream>

namespace imbgan {

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::none: return "none";
        case Strategy::smote: return "smote";
        case Strategy::svm_smote: return "svm_smote";
        case Strategy::gbo: return "gbo";
        case Strategy::ssg: return "ssg";
    }
    return "none";
}

Strategy strategy_from_string(const std::string& name) {
    for (auto s : {Strategy::none, Strategy::smote, Strategy::svm_smote, Strategy::gbo, Strategy::ssg})
        if (name == to_string(s)) return s;
    throw UsageError("unknown strategy '" + name + "' (expected none, smote, svm_smote, gbo, ssg)");
}

Index parity_deficit(const Dataset& ds) {
    const Index deficit = ds.count(kMajority) - ds.count(kMinority);
    if (deficit < 0) throw ConfigError("minority class is larger than the majority class");
    return deficit;
}

BalanceResult balance_to_parity(const Dataset& train, Strategy strategy, std::uint64_t seed,
                                const BalanceOptions& options) {
    train.validate();
    const Index n_synthetic = parity_deficit(train);

    BalanceResult result;
    result.scaler = minmax_fit(train);
    result.synthetic.samples.resize(0, train.n_features());
    if (strategy == Strategy::none || n_synthetic == 0) {
        result.balanced = train;
        return result;
    }

    const Dataset scaled = minmax_apply(train, result.scaler);
    const OversampleRequest req{n_synthetic, options.k, options.m, seed, Range{0.0, 1.0}};
    switch (strategy) {
        case Strategy::smote: result.synthetic = smote(scaled, req); break;
        case Strategy::svm_smote: {
            SvmParams svm = options.svm;
            svm.seed = derive_seed(seed, 1);
            result.synthetic = svm_smote(scaled, train_linear_svm(scaled, svm), req);
            break;
        }
        case Strategy::gbo:
        case Strategy::ssg: {
            GanConfig gan = options.gan;
            gan.seed = seed;
            auto out = strategy == Strategy::gbo
                           ? gbo_oversample(scaled, n_synthetic, gan)
                           : ssg_oversample(scaled, n_synthetic, gan, SsgParams{options.svm, options.k, options.m, 0});
            result.synthetic = std::move(out.batch);
            result.gan = std::move(out.model);
            result.warnings = std::move(out.warnings);
            break;
        }
        case Strategy::none: break;
    }
    result.warnings.insert(result.warnings.begin(), result.synthetic.warnings.begin(), result.synthetic.warnings.end());
    for (const auto& w : result.warnings) std::clog << "warning: " << w << '\n';

    Dataset extra{minmax_invert(result.synthetic.samples, result.scaler), Labels::Constant(n_synthetic, kMinority),
                  train.feature_names};
    result.balanced = train.concat(extra);
    return result;
}

}  // namespace imbgan
