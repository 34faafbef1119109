#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "imbgan/nnet.hpp"

namespace imbgan {

inline constexpr const char* kNetFormat = "imbgan-densenet";
inline constexpr int kNetFormatVersion = 1;

/// {"format", "version", "init_seed", "layers": [{fan_in, fan_out,
/// activation, weights (row-major, fan_in x fan_out), bias}]}.
/// Optimiser state is not stored.
nlohmann::json densenet_to_json(const DenseNet& net);
DenseNet densenet_from_json(const nlohmann::json& j);

void save_densenet(const std::string& path, const DenseNet& net);
DenseNet load_densenet(const std::string& path);

nlohmann::json train_report_to_json(const TrainReport& report);

}  // namespace imbgan
