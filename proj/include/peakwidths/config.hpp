#pragma once

#include "peakwidths/core_params.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace peakwidths {

/// The config file is missing, unreadable or not JSON.
struct ConfigReadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The document parses but a field is missing, mistyped or out of range.
struct ConfigSchemaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Parameter document with top-level keys problem, weight_g, weight_v, cusp. Slowly varying
/// factors are arrays of [depth, exponent] pairs.
struct ModelConfig {
    ProblemParams problem;
    WeightSpec g;
    WeightSpec v;
    CuspProfile cusp;
    nlohmann::json document; // the parsed input, echoed into manifests
};

[[nodiscard]] ModelConfig parse_model_config(const nlohmann::json& doc);
[[nodiscard]] ModelConfig load_model_config(const std::string& path);

} // namespace peakwidths
