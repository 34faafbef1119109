#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imbgan/core.hpp"

namespace imbgan {

/// Class counts and width of a benchmark dataset.
struct DatasetShape {
    std::string name;
    Index minority = 0;
    Index majority = 0;
    Index n_features = 0;
};

/// The eight UCI benchmark shapes (page-blocks, ecoli, winequality, abalone,
/// ionosphere, spambase, shuttle, yeast).
const std::vector<DatasetShape>& benchmark_shapes();

/// Benchmark shapes plus "blobs500" (450 majority / 50 minority, 4 features).
std::optional<DatasetShape> find_shape(const std::string& name);

/// Synthetic stand-in with the given class counts: two overlapping Gaussian
/// classes whose features have different offsets and scales, rows shuffled.
Dataset make_shape_fixture(const DatasetShape& shape, std::uint64_t seed);

}  // namespace imbgan
