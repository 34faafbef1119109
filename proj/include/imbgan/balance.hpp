#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imbgan/gan.hpp"
#include "imbgan/oversample.hpp"

namespace imbgan {

enum class Strategy { none, smote, svm_smote, gbo, ssg };

const char* to_string(Strategy s);
/// Throws UsageError for unknown names.
Strategy strategy_from_string(const std::string& name);

struct BalanceOptions {
    Index k = 5;
    Index m = 10;
    SvmParams svm;
    GanConfig gan;
};

struct BalanceResult {
    /// Original rows verbatim, then synthetic rows (label 1) in raw units.
    Dataset balanced;
    /// Synthetic rows in the [0,1] space the samplers work in.
    SyntheticBatch synthetic;
    ScalerParams scaler;
    std::optional<GanModel> gan;
    std::vector<std::string> warnings;
};

/// Rows the minority class needs to reach the majority count.
Index parity_deficit(const Dataset& ds);

/// Add count(0) - count(1) synthetic minority rows. The samplers run on a
/// min-max [0,1] scaling fitted to `train`; their output is mapped back to
/// raw units before being appended. `seed` drives every random choice
/// (it replaces the seeds inside `options`).
BalanceResult balance_to_parity(const Dataset& train, Strategy strategy, std::uint64_t seed,
                                const BalanceOptions& options = {});

}  // namespace imbgan
