#include "squeezecav/errors.hpp"
#include "squeezecav/scenario.hpp"

#include <cmath>
#include <string>

namespace squeezecav {

using nlohmann::json;

std::string_view to_string(RunMode mode) {
    switch (mode) {
    case RunMode::Evolve: return "evolve";
    case RunMode::Steady: return "steady";
    case RunMode::Threshold: return "threshold";
    case RunMode::OracleCompare: return "oracle-compare";
    case RunMode::Figures: return "figures";
    }
    return "unknown";
}

std::optional<RunMode> parse_mode(std::string_view name) {
    for (auto m : {RunMode::Evolve, RunMode::Steady, RunMode::Threshold, RunMode::OracleCompare, RunMode::Figures})
        if (to_string(m) == name)
            return m;
    return std::nullopt;
}

const std::vector<std::pair<std::string, std::string>> &config_schema() {
    static const std::vector<std::pair<std::string, std::string>> schema = {
        {"mode", "string, required: evolve | steady | threshold | oracle-compare | figures"},
        {"g_values", "array of pump-to-loss ratios >= 0 (> 0 for threshold); required except in figures mode"},
        {"tau_end", "final dimensionless time Gamma*t > 0 (defaults: evolve 20, threshold 20, "
                    "oracle-compare 5; in figures mode overrides the weak/critical horizon of 20)"},
        {"dtau", "RK4 step in dimensionless time, > 0 (default 1e-3)"},
        {"sample_every", "integer >= 1, output decimation in steps (default 10)"},
        {"delta_values", "array of threshold fractions > 0; required for threshold mode"},
        {"fock_dim", "integer >= 2, initial Fock truncation of the oracle (default 64)"},
        {"fock_dim_max", "integer >= fock_dim, cap for automatic basis doubling (default 512)"},
        {"output_dir", "string, directory for CSV files and manifest.json (default \"out\")"},
        {"initial_state", "object {\"u\", \"phi\", \"n_th\"} for evolve/oracle-compare (default vacuum)"},
    };
    return schema;
}

namespace {

double finite_number(const json &value, const std::string &key) {
    if (!value.is_number())
        throw ConfigError(key, "expected a number");
    const double x = value.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(key, "must be finite");
    return x;
}

int integer(const json &value, const std::string &key) {
    if (!value.is_number_integer())
        throw ConfigError(key, "expected an integer");
    return value.get<int>();
}

std::vector<double> number_list(const json &value, const std::string &key) {
    if (!value.is_array())
        throw ConfigError(key, "expected an array of numbers");
    if (value.empty())
        throw ConfigError(key, "must not be empty");
    std::vector<double> out;
    for (const auto &v : value)
        out.push_back(finite_number(v, key));
    return out;
}

bool known_key(const std::string &key) {
    for (const auto &[name, _] : config_schema())
        if (name == key)
            return true;
    return false;
}

} // namespace

RunConfig config_from_json(const json &doc) {
    if (!doc.is_object())
        throw ConfigError("<root>", "configuration must be a JSON object");
    for (const auto &item : doc.items())
        if (!known_key(item.key()))
            throw ConfigError(item.key(), "unknown key");

    RunConfig cfg;
    if (!doc.contains("mode"))
        throw ConfigError("mode", "missing required key");
    if (!doc["mode"].is_string())
        throw ConfigError("mode", "expected a string");
    const auto mode = parse_mode(doc["mode"].get<std::string>());
    if (!mode)
        throw ConfigError("mode", "unknown mode '" + doc["mode"].get<std::string>() + "'");
    cfg.mode = *mode;

    if (doc.contains("g_values")) {
        cfg.g_values = number_list(doc["g_values"], "g_values");
        for (double g : cfg.g_values) {
            if (g < 0.0)
                throw ConfigError("g_values", "pump ratios must be >= 0");
            if (cfg.mode == RunMode::Threshold && g <= 0.0)
                throw ConfigError("g_values", "threshold mode needs pump ratios > 0");
        }
    } else if (cfg.mode != RunMode::Figures) {
        throw ConfigError("g_values", "missing required key for mode '" + std::string(to_string(cfg.mode)) + "'");
    }

    if (doc.contains("delta_values")) {
        cfg.delta_values = number_list(doc["delta_values"], "delta_values");
        for (double d : cfg.delta_values)
            if (d <= 0.0)
                throw ConfigError("delta_values", "threshold fractions must be > 0");
    } else if (cfg.mode == RunMode::Threshold) {
        throw ConfigError("delta_values", "missing required key for mode 'threshold'");
    }

    if (doc.contains("tau_end")) {
        cfg.tau_end = finite_number(doc["tau_end"], "tau_end");
        if (*cfg.tau_end <= 0.0)
            throw ConfigError("tau_end", "must be > 0");
    }
    if (doc.contains("dtau")) {
        cfg.dtau = finite_number(doc["dtau"], "dtau");
        if (cfg.dtau <= 0.0)
            throw ConfigError("dtau", "must be > 0");
    }
    if (doc.contains("sample_every")) {
        cfg.sample_every = integer(doc["sample_every"], "sample_every");
        if (cfg.sample_every < 1)
            throw ConfigError("sample_every", "must be >= 1");
    }
    if (doc.contains("fock_dim")) {
        cfg.fock_dim = integer(doc["fock_dim"], "fock_dim");
        if (cfg.fock_dim < 2)
            throw ConfigError("fock_dim", "must be >= 2");
    }
    if (doc.contains("fock_dim_max")) {
        cfg.fock_dim_max = integer(doc["fock_dim_max"], "fock_dim_max");
    }
    if (cfg.fock_dim_max < cfg.fock_dim)
        throw ConfigError("fock_dim_max", "must be >= fock_dim");
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string() || doc["output_dir"].get<std::string>().empty())
            throw ConfigError("output_dir", "expected a non-empty string");
        cfg.output_dir = doc["output_dir"].get<std::string>();
    }
    if (doc.contains("initial_state")) {
        const auto &init = doc["initial_state"];
        if (!init.is_object())
            throw ConfigError("initial_state", "expected an object with u, phi, n_th");
        for (const auto &item : init.items())
            if (item.key() != "u" && item.key() != "phi" && item.key() != "n_th")
                throw ConfigError("initial_state." + item.key(), "unknown key");
        StsState s;
        if (init.contains("u"))
            s.u = finite_number(init["u"], "initial_state.u");
        if (init.contains("phi"))
            s.phi = finite_number(init["phi"], "initial_state.phi");
        if (init.contains("n_th"))
            s.n_th = finite_number(init["n_th"], "initial_state.n_th");
        if (s.u < 0.0)
            throw ConfigError("initial_state.u", "must be >= 0");
        if (s.n_th < 0.0)
            throw ConfigError("initial_state.n_th", "must be >= 0");
        cfg.initial_state = s;
    }
    return cfg;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(doc);
}

} // namespace squeezecav
