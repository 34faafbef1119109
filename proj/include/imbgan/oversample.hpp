#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "imbgan/core.hpp"
#include "imbgan/svm.hpp"

namespace imbgan {

enum class SynthesisMode { smote, interpolation, extrapolation, gbo, ssg };

const char* to_string(SynthesisMode m);

inline constexpr Index kNoRow = -1;

/// How one synthetic row was made. Row ids index the training dataset the
/// sampler was given. For ssg rows the fields describe the SVM-SMOTE parent
/// the generator was fed.
struct Provenance {
    Index base_index = kNoRow;
    Index neighbor_index = kNoRow;
    double delta = 0.0;
    SynthesisMode mode = SynthesisMode::smote;
    /// Parent interpolation mode (ssg rows only).
    std::optional<SynthesisMode> parent_mode;
    /// At least one coordinate was clamped into the feature box.
    bool clamped = false;
};

struct SyntheticBatch {
    Matrix samples;
    std::vector<Provenance> provenance;
    std::vector<std::string> warnings;

    Index size() const { return samples.rows(); }
    /// All rows labelled minority.
    Dataset as_dataset(const std::vector<std::string>& feature_names) const;
};

struct OversampleRequest {
    Index n_synthetic = 0;
    /// Neighbours used for synthesis.
    Index k = 5;
    /// Neighbours used to choose interpolation vs extrapolation.
    Index m = 10;
    std::uint64_t seed = 0;
    /// Box extrapolated samples are clamped into; none disables clamping.
    std::optional<Range> clamp_box = Range{0.0, 1.0};
};

/// T = round(N / 100 * minority_count) for a sampling level of N percent.
Index sampling_level_count(double percent, Index minority_count);

/// Count each support vector receives when T is spread over n of them:
/// floor(T / n), plus one for the first T mod n.
std::vector<Index> distribute_evenly(Index total, Index n_support);

/// Classic SMOTE: base row uniform over the minority, neighbour uniform over
/// its k nearest minority rows, x + delta * (x_nn - x), delta ~ U[0,1).
/// k shrinks to minority_count - 1 when needed.
SyntheticBatch smote(const Dataset& train, const OversampleRequest& req);

/// SVM-SMOTE around the positive support vectors of `model`. Each support
/// vector looks at its m nearest rows in the full training set: strictly
/// more than m/2 majority rows -> interpolation toward a minority
/// neighbour, otherwise extrapolation away from it.
SyntheticBatch svm_smote(const Dataset& train, const SvmModel& model, const OversampleRequest& req);

/// Interpolate/extrapolate decision for one support vector given how many
/// of its m neighbours are majority rows.
inline SynthesisMode svm_smote_mode(Index majority_neighbors, Index m) {
    return 2 * majority_neighbors > m ? SynthesisMode::interpolation : SynthesisMode::extrapolation;
}

}  // namespace imbgan
