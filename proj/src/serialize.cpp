#include "imbgan/serialize.hpp"

#include <fstream>

namespace imbgan {

const char* to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::leaky_relu: return "leaky_relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::linear: return "linear";
    }
    return "linear";
}

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "leaky_relu") return Activation::leaky_relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "linear") return Activation::linear;
    throw ConfigError("unknown activation '" + name + "'");
}

nlohmann::json densenet_to_json(const DenseNet& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(l.weights.size()));
        for (Index r = 0; r < l.fan_in(); ++r)
            for (Index c = 0; c < l.fan_out(); ++c) w.push_back(l.weights(r, c));
        layers.push_back({{"fan_in", l.fan_in()},
                          {"fan_out", l.fan_out()},
                          {"activation", to_string(l.activation)},
                          {"weights", w},
                          {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    }
    return {{"format", kNetFormat}, {"version", kNetFormatVersion}, {"init_seed", net.init_seed()}, {"layers", layers}};
}

DenseNet densenet_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kNetFormat) throw ConfigError("not an imbgan network file");
        const int version = j.at("version").get<int>();
        if (version != kNetFormatVersion)
            throw ConfigError("unsupported network format version " + std::to_string(version));
        std::vector<DenseLayer<double>> layers;
        for (const auto& jl : j.at("layers")) {
            DenseLayer<double> l;
            const auto fan_in = jl.at("fan_in").get<Index>();
            const auto fan_out = jl.at("fan_out").get<Index>();
            const auto w = jl.at("weights").get<std::vector<double>>();
            const auto b = jl.at("bias").get<std::vector<double>>();
            if (static_cast<Index>(w.size()) != fan_in * fan_out || static_cast<Index>(b.size()) != fan_out)
                throw ConfigError("layer parameter count does not match its shape");
            l.activation = activation_from_string(jl.at("activation").get<std::string>());
            l.weights.resize(fan_in, fan_out);
            for (Index r = 0; r < fan_in; ++r)
                for (Index c = 0; c < fan_out; ++c) l.weights(r, c) = w[static_cast<std::size_t>(r * fan_out + c)];
            l.bias = Eigen::Map<const Vector>(b.data(), fan_out);
            layers.push_back(std::move(l));
        }
        return DenseNet::from_layers(std::move(layers), j.value("init_seed", std::uint64_t{0}));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed network file: ") + e.what());
    }
}

void save_densenet(const std::string& path, const DenseNet& net) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << densenet_to_json(net).dump() << '\n';
}

DenseNet load_densenet(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return densenet_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed network file: ") + e.what());
    }
}

nlohmann::json train_report_to_json(const TrainReport& report) {
    return {{"loss_per_epoch", report.loss_per_epoch},
            {"validation_loss_per_epoch", report.validation_loss_per_epoch},
            {"stopped_epoch", report.stopped_epoch},
            {"best_epoch", report.best_epoch},
            {"final_train_accuracy", report.final_train_accuracy}};
}

}  // namespace imbgan
