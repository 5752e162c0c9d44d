#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lmsim/engine.hpp"

namespace lmsim {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct RunManifest {
  std::string config_fingerprint;
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::string tool_version{kToolVersion};
  std::chrono::duration<double> wall_clock{0.0};
  std::vector<std::string> diagnostics;
};

/// Value as written to CSV: 9 significant digits.
std::string format_value(double v);

/// The double a reader recovers from format_value(v).
double quantize(double v);

/// Header row plus one row per timestep. Undefined values are empty cells.
std::string metrics_csv(const std::vector<MetricsRow>& rows);

std::vector<MetricsRow> parse_metrics_csv(std::string_view text);

/// Columns: t, variant, coef_1, coef_2, intercept. coef_2 is empty for
/// single-feature models.
std::string coefficients_csv(const std::vector<CoefficientSnapshot>& snapshots);

/// Ensemble mean of the runs exactly as they appear in the run CSVs, so that
/// averaging the written files reproduces ensemble_mean.csv.
std::vector<MetricsRow> published_mean(const EnsembleOutput& ensemble);

/// Writes run_<i>.csv, coefficients_<i>.csv, ensemble_mean.csv, manifest.txt,
/// config.cfg (verbatim source) and config_resolved.cfg into `dir`,
/// creating it if needed.
void write_outputs(const std::filesystem::path& dir, const EnsembleOutput& ensemble,
                   const RunManifest& manifest, const SimulationConfig& config,
                   std::string_view config_source);

void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace lmsim
