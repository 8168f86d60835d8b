// squeezecav: trajectories, steady states, threshold sweeps and oracle
// comparisons for a degenerate parametric down-converter in a lossy cavity.

#include "squeezecav/errors.hpp"
#include "squeezecav/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::string schema_help() {
    std::ostringstream out;
    out << "\nConfiguration file (JSON object; unknown keys are rejected):\n";
    for (const auto &[key, text] : squeezecav::config_schema())
        out << "  " << key << "\n      " << text << "\n";
    out << "\nOutputs: one CSV per dataset (lowercase header, 17 significant digits,\n"
           "undefined values written as nan) plus manifest.json listing files,\n"
           "parameters, invariant checks and failures.\n"
           "Exit codes: 0 success, 2 config error, 3 solver error, 4 I/O error.\n";
    return out.str();
}

} // namespace

int main(int argc, char **argv) {
    using nlohmann::json;

    CLI::App app{"Squeezed-light generation in a lossy cavity (dimensionless time tau = Gamma*t)"};
    app.footer(schema_help());

    std::string mode;
    std::string config_path;
    std::string out_dir;
    double dtau = 0.0;
    double tau_end = 0.0;
    app.add_option("mode", mode, "evolve | steady | threshold | oracle-compare | figures")->required();
    app.add_option("--config", config_path, "JSON run configuration (optional for figures mode)");
    auto *out_opt = app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    auto *dtau_opt = app.add_option("--dtau", dtau, "RK4 step (overrides dtau)");
    auto *tau_opt = app.add_option("--tau-end", tau_end, "final time (overrides tau_end)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    squeezecav::RunConfig config;
    try {
        json doc = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot read config file " << config_path << "\n";
                return kExitIo;
            }
            std::stringstream buffer;
            buffer << in.rdbuf();
            try {
                doc = json::parse(buffer.str());
            } catch (const json::parse_error &e) {
                throw squeezecav::ConfigError("<document>", std::string("malformed JSON: ") + e.what());
            }
            if (!doc.is_object())
                throw squeezecav::ConfigError("<root>", "configuration must be a JSON object");
        }
        doc["mode"] = mode;
        if (*out_opt)
            doc["output_dir"] = out_dir;
        if (*dtau_opt)
            doc["dtau"] = dtau;
        if (*tau_opt)
            doc["tau_end"] = tau_end;
        config = squeezecav::config_from_json(doc);
    } catch (const squeezecav::Error &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    squeezecav::ScenarioResult result;
    try {
        result = squeezecav::run_scenario(config);
    } catch (const squeezecav::Error &e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }

    try {
        const auto manifest = squeezecav::write_outputs(result, config);
        for (const auto &f : manifest["files"])
            std::cout << config.output_dir << "/" << f["file"].get<std::string>() << " (" << f["rows"] << " rows)\n";
    } catch (const squeezecav::Error &e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }

    for (const auto &f : result.failures)
        std::cerr << "failed [" << f.context << "] " << f.kind << ": " << f.message << "\n";
    return result.failures.empty() ? kExitOk : kExitSolver;
}
