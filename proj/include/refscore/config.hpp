#pragma once
// Run configuration: a plain key=value file with ${VAR} environment
// interpolation so secrets stay out of the file. A seed is mandatory;
// nothing in a run may depend on the wall clock.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "refscore/client.hpp"
#include "refscore/protocol.hpp"

namespace refscore {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    std::string corpus_path;
    std::string proxy_scores_path;
    std::map<MainPanel, std::string> template_paths;
    std::string output_dir;
    double filter_fraction = 0.10;
    size_t bootstrap_samples = 1000;
    double bootstrap_alpha = 0.05;
    uint64_t seed = 0;
    double extraction_failure_threshold = 0.0;
    std::string structure_specs_path;
    ModelConfig model;
    bool mock = false;
    double mock_agreement = 0.957;
};

namespace detail {

inline std::string interpolate_env(const std::string& value, const std::string& key) {
    std::string out;
    size_t i = 0;
    while (i < value.size()) {
        if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
            size_t end = value.find('}', i + 2);
            if (end == std::string::npos)
                throw ConfigError("unterminated ${ in value of '" + key + "'");
            std::string var = value.substr(i + 2, end - i - 2);
            const char* v = std::getenv(var.c_str());
            out += v ? v : "";
            i = end + 1;
        } else {
            out += value[i++];
        }
    }
    return out;
}

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline std::map<std::string, std::string> parse_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        kv[key] = detail::interpolate_env(value, key);
    }
    return kv;
}

inline RunConfig load_run_config(const std::string& path) {
    auto kv = parse_key_values(path);
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end() || it->second.empty())
            return std::nullopt;
        return it->second;
    };
    auto require = [&](const std::string& key) -> std::string {
        auto v = get(key);
        if (!v)
            throw ConfigError("config missing required key '" + key + "'");
        return *v;
    };

    RunConfig cfg;
    cfg.corpus_path = require("corpus");
    cfg.proxy_scores_path = require("proxy_scores");
    cfg.output_dir = require("output_dir");
    cfg.seed = std::stoull(require("seed"));
    for (MainPanel p : kAllPanels) {
        std::string key = std::string("template.") + panel_letter(p);
        cfg.template_paths[p] = require(key);
    }
    if (auto v = get("filter_fraction"))
        cfg.filter_fraction = std::stod(*v);
    if (auto v = get("bootstrap_samples"))
        cfg.bootstrap_samples = std::stoull(*v);
    if (auto v = get("bootstrap_alpha"))
        cfg.bootstrap_alpha = std::stod(*v);
    if (auto v = get("extraction_failure_threshold"))
        cfg.extraction_failure_threshold = std::stod(*v);
    if (auto v = get("structure_specs"))
        cfg.structure_specs_path = *v;
    if (auto v = get("mock"))
        cfg.mock = (*v == "true" || *v == "1");
    if (auto v = get("mock_agreement"))
        cfg.mock_agreement = std::stod(*v);

    if (auto v = get("endpoint_url"))
        cfg.model.endpoint_url = *v;
    if (auto v = get("model"))
        cfg.model.model_name = *v;
    if (auto v = get("temperature"))
        cfg.model.temperature = std::stod(*v);
    if (auto v = get("max_output_tokens"))
        cfg.model.max_output_tokens = std::stoi(*v);
    if (auto v = get("repetitions"))
        cfg.model.repetitions = std::stoi(*v);
    if (auto v = get("parallelism"))
        cfg.model.parallelism = std::stoi(*v);
    if (auto v = get("timeout_seconds"))
        cfg.model.timeout_seconds = std::stoi(*v);
    if (auto v = get("retry_limit"))
        cfg.model.retry_limit = std::stoi(*v);
    if (auto v = get("api_key_env")) {
        const char* key = std::getenv(v->c_str());
        if (key)
            cfg.model.api_key = key;
    }

    if (cfg.model.repetitions < 1)
        throw ConfigError("repetitions must be >= 1");
    if (cfg.model.parallelism < 1)
        throw ConfigError("parallelism must be >= 1");
    if (cfg.filter_fraction < 0.0 || cfg.filter_fraction >= 1.0)
        throw ConfigError("filter_fraction must be in [0,1)");
    return cfg;
}

// Referenced input paths must resolve before any stage runs.
inline void validate_input_paths(const RunConfig& cfg) {
    auto check = [](const std::string& what, const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw ConfigError(what + " file not found: " + path);
    };
    check("corpus", cfg.corpus_path);
    check("proxy-score", cfg.proxy_scores_path);
    for (const auto& [panel, path] : cfg.template_paths)
        check(std::string("panel ") + panel_letter(panel) + " template", path);
    if (!cfg.structure_specs_path.empty())
        check("structure spec", cfg.structure_specs_path);
}

} // namespace refscore
