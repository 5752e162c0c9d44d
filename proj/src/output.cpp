#include "lmsim/output.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lmsim/config.hpp"
#include "lmsim/error.hpp"

namespace lmsim {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double quantize(double v) { return std::strtod(format_value(v).c_str(), nullptr); }

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "t";
  for (const auto& col : kMetricColumns) {
    out += ',';
    out += col.name;
  }
  out += '\n';
  for (const auto& row : rows) {
    out += std::to_string(row.t);
    for (const auto& col : kMetricColumns) {
      out += ',';
      if (const auto& v = row.*col.field) out += format_value(*v);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
  std::vector<MetricsRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error("metrics CSV is empty");
  if (line != metrics_csv({}).substr(0, metrics_csv({}).size() - 1)) {
    throw Error("metrics CSV header does not match the schema: " + line);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != kMetricColumns.size() + 1) throw Error("metrics CSV row has wrong width");
    MetricsRow row;
    row.t = std::stoi(std::string(cells[0]));
    for (std::size_t c = 0; c < kMetricColumns.size(); ++c) {
      const auto cell = cells[c + 1];
      if (cell.empty()) continue;
      row.*kMetricColumns[c].field = std::strtod(std::string(cell).c_str(), nullptr);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string coefficients_csv(const std::vector<CoefficientSnapshot>& snapshots) {
  std::string out = "t,variant,coef_1,coef_2,intercept\n";
  for (const auto& s : snapshots) {
    out += std::to_string(s.t);
    out += ',';
    out += to_string(s.model.variant);
    for (std::size_t j = 0; j < 2; ++j) {
      out += ',';
      if (j < s.model.coefficients.size()) out += format_value(s.model.coefficients[j]);
    }
    out += ',';
    out += format_value(s.model.intercept);
    out += '\n';
  }
  return out;
}

std::vector<MetricsRow> published_mean(const EnsembleOutput& ensemble) {
  std::vector<std::vector<MetricsRow>> runs;
  runs.reserve(ensemble.runs.size());
  for (const auto& r : ensemble.runs) {
    auto rows = r.rows;
    for (auto& row : rows) {
      for (const auto& col : kMetricColumns) {
        if (auto& v = row.*col.field) *v = quantize(*v);
      }
    }
    runs.push_back(std::move(rows));
  }
  return average_rows(runs);
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_outputs(const std::filesystem::path& dir, const EnsembleOutput& ensemble,
                   const RunManifest& manifest, const SimulationConfig& config,
                   std::string_view config_source) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  for (std::size_t i = 0; i < ensemble.runs.size(); ++i) {
    const auto& r = ensemble.runs[i];
    write_file(dir / ("run_" + std::to_string(i) + ".csv"), metrics_csv(r.rows));
    write_file(dir / ("coefficients_" + std::to_string(i) + ".csv"), coefficients_csv(r.coefficients));
  }
  write_file(dir / "ensemble_mean.csv", metrics_csv(published_mean(ensemble)));
  write_file(dir / "config.cfg", config_source);
  write_file(dir / "config_resolved.cfg", serialize_config(config));

  std::ostringstream m;
  m << "config_fingerprint = " << manifest.config_fingerprint << "\n"
    << "base_seed = " << manifest.base_seed << "\n"
    << "seeds =";
  for (auto s : manifest.seeds) m << ' ' << s;
  m << "\n"
    << "tool_version = " << manifest.tool_version << "\n"
    << "wall_clock_seconds = " << format_value(manifest.wall_clock.count()) << "\n";
  for (const auto& d : manifest.diagnostics) m << "diagnostic = " << d << "\n";
  write_file(dir / "manifest.txt", m.str());
}

}  // namespace lmsim
