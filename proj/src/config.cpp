#include "peakwidths/config.hpp"

#include <fstream>
#include <optional>
#include <sstream>

namespace peakwidths {

namespace {

using nlohmann::json;

const json& section(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc.at(key).is_object())
        throw ConfigSchemaError(std::string("missing object '") + key + "'");
    return doc.at(key);
}

double number(const json& obj, const std::string& where, const char* key, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigSchemaError(where + "." + key + " is required");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigSchemaError(where + "." + key + " must be a number");
    return v.get<double>();
}

int integer(const json& obj, const std::string& where, const char* key, std::optional<int> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigSchemaError(where + "." + key + " is required");
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigSchemaError(where + "." + key + " must be an integer");
    return v.get<int>();
}

SlowlyVaryingFn slowly_varying(const json& obj, const std::string& where, const char* key) {
    SlowlyVaryingFn sv;
    if (!obj.contains(key)) return sv;
    const json& arr = obj.at(key);
    if (!arr.is_array()) throw ConfigSchemaError(where + "." + key + " must be an array of [depth, exponent] pairs");
    for (const json& pair : arr) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number())
            throw ConfigSchemaError(where + "." + key + " entries must be [depth, exponent]");
        const int depth = pair[0].get<int>();
        if (depth < 1) throw ConfigSchemaError(where + "." + key + ": depth must be >= 1");
        sv.factors.push_back({depth, pair[1].get<double>()});
    }
    sv.domainFloor = number(obj, where, (std::string(key) + "_floor").c_str(), 0.0);
    sv.scale = number(obj, where, (std::string(key) + "_scale").c_str(), 1.0);
    if (!(sv.scale > 0.0)) throw ConfigSchemaError(where + "." + key + "_scale must be positive");
    return sv;
}

WeightSpec weight(const json& doc, const char* key) {
    const json& w = section(doc, key);
    WeightSpec spec;
    spec.beta = number(w, key, "beta");
    spec.alphaExp = number(w, key, "alpha", 0.0);
    spec.sv = slowly_varying(w, key, "sv");
    return spec;
}

} // namespace

ModelConfig parse_model_config(const json& doc) {
    if (!doc.is_object()) throw ConfigSchemaError("config root must be an object");
    ModelConfig cfg;
    cfg.document = doc;
    const json& pr = section(doc, "problem");
    cfg.problem.p = number(pr, "problem", "p");
    cfg.problem.q = number(pr, "problem", "q");
    cfg.problem.r = integer(pr, "problem", "r");
    cfg.problem.d = integer(pr, "problem", "d", 2);
    if (pr.contains("kind")) {
        if (!pr.at("kind").is_string()) throw ConfigSchemaError("problem.kind must be a string");
        try {
            cfg.problem.kind = width_kind_from_string(pr.at("kind").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigSchemaError(std::string("problem.kind: ") + e.what());
        }
    }
    try {
        cfg.problem.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigSchemaError(std::string("problem: ") + e.what());
    }
    cfg.g = weight(doc, "weight_g");
    cfg.v = weight(doc, "weight_v");
    const json& cu = section(doc, "cusp");
    cfg.cusp.sigma = number(cu, "cusp", "sigma");
    cfg.cusp.theta = number(cu, "cusp", "theta", 0.0);
    cfg.cusp.omega = slowly_varying(cu, "cusp", "omega");
    cfg.cusp.zMax = number(cu, "cusp", "z_max", 0.5);
    if (!(cfg.cusp.zMax > 0.0) || cfg.cusp.zMax > 0.5) throw ConfigSchemaError("cusp.z_max must lie in (0, 1/2]");
    return cfg;
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigReadError("cannot open config '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigReadError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_model_config(doc);
}

} // namespace peakwidths
