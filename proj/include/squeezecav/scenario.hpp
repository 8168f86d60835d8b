#pragma once

#include "squeezecav/core_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace squeezecav {

enum class RunMode { Evolve, Steady, Threshold, OracleCompare, Figures };

std::string_view to_string(RunMode mode);
std::optional<RunMode> parse_mode(std::string_view name);

struct RunConfig {
    RunMode mode = RunMode::Figures;
    std::vector<double> g_values;
    std::optional<double> tau_end; // mode default when absent
    double dtau = 1e-3;
    int sample_every = 10;
    std::vector<double> delta_values;
    int fock_dim = 64;
    int fock_dim_max = 512;
    std::string output_dir = "out";
    StsState initial_state = StsState::vacuum();
};

/// Keys accepted by parse_config, with a one-line description each (used by --help).
const std::vector<std::pair<std::string, std::string>> &config_schema();

/// Parses and validates a JSON run configuration. Throws ConfigError naming the key.
RunConfig parse_config(std::string_view text);
RunConfig config_from_json(const nlohmann::json &doc);

struct Column {
    std::string name;
    std::vector<double> values;
};

struct FigureDataset {
    std::string figure_id; // also the CSV file stem
    std::vector<Column> columns;

    /// Throws Invariant for empty or ragged columns and non-lowercase headers.
    void validate() const;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().values.size(); }
};

/// Writes <output_dir>/<figure_id>.csv: lowercase header, 17 significant
/// digits, LF endings, NaN written as "nan". Returns the path written.
std::filesystem::path emit_csv(const FigureDataset &dataset, const std::filesystem::path &output_dir);

/// Formats a parameter for column and file labels: 0.8 -> "0.8", 1 -> "1.0".
std::string format_label(double value);

struct ScenarioFailure {
    std::string context; // e.g. "evolve g=1.2"
    std::string kind;
    std::string message;
};

struct ScenarioResult {
    std::vector<FigureDataset> datasets;
    nlohmann::json summary;  // parameters and invariant-check results
    std::vector<ScenarioFailure> failures;
};

ScenarioResult run_scenario(const RunConfig &config);

/// Emits every dataset plus manifest.json into config.output_dir. Returns the
/// manifest that was written.
nlohmann::json write_outputs(const ScenarioResult &result, const RunConfig &config);

} // namespace squeezecav
