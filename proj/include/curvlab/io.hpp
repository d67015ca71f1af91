#pragma once

// JSON and CSV forms of configs and reports. Every JSON document carries
// "schema_version" and "kind". Wall-clock data never enters a report; it goes
// to a "<name>.meta.json" sidecar so reports stay byte-identical across runs.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvlab/campaign.hpp"
#include "curvlab/estimates.hpp"
#include "curvlab/solver.hpp"

namespace curvlab::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json envelope(const std::string& kind);

json to_json(const campaign::Violation& v);
json to_json(const campaign::ConcavityReport& r);
json to_json(const solver::PsiSpec& psi);
json to_json(const solver::Problem& p);
json to_json(const solver::SolveReport& r);
json to_json(const estimates::EstimateReport& r);
json to_json(const estimates::SeriesEntry& e);

// Config parsing; all failures raise ConfigError with the offending key.
solver::PsiSpec psi_from_json(const json& j);
solver::Problem problem_from_json(const json& j);
solver::SolveOptions options_from_json(const json& j, unsigned threads);
estimates::QParams q_params_from_json(const json& j);
/// {"kind": "round"} | {"kind": "perturbed_sphere", "R": .., "relative": ..}
/// | {"kind": "graph", "graph": {...}}; absent means "round".
geometry::RadialGraph init_from_json(const json& j, const solver::Problem& problem);
solver::Path path_from_json(const json& j);

/// Reads and parses a JSON file; ConfigError on I/O or syntax errors.
json read_json(const std::filesystem::path& path);
/// Writes pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);
/// Writes "<stem>.meta.json" next to `report_path`.
void write_timing_sidecar(const std::filesystem::path& report_path, double wall_time_seconds,
                          const std::string& started_at, const std::string& finished_at);
std::string utc_timestamp();

void write_iterations_csv(std::ostream& out, const solver::SolveReport& r);
void write_series_csv(std::ostream& out, const std::vector<estimates::SeriesEntry>& series);
/// Tightest passing samples and violations of a campaign, one row each.
void write_gap_csv(std::ostream& out, const campaign::ConcavityReport& r);

}  // namespace curvlab::io
