#include "lmsim/config.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "lmsim/error.hpp"

namespace lmsim {

namespace {

constexpr std::array<ConfigKey, 27> kKeys{{
    {"population", "alpha_pr", "2.0", "group gap coefficient on x2 (>= 0)"},
    {"population", "trunc", "2.0", "truncation of the skill draws, in standard deviations (> 0)"},
    {"market", "alpha_l", "2.0", "slope of the hiring probability in s_real (> 0)"},
    {"market", "beta_l", "3.0", "location of the hiring curve"},
    {"market", "beta_b", "0.0", "market bias towards x_pr = 1 (0 unbiased, 2 biased)"},
    {"intervention", "x1_max", "trunc", "skill cap for x1 (>= trunc)"},
    {"intervention", "x2_max", "(alpha_pr/2 + trunc)/2", "skill cap for x2, shared by both groups"},
    {"intervention", "delta_t_u", "5", "waiting time of Low-predicted job-seekers"},
    {"intervention", "t_u_max", "36", "unemployment time at which a job-seeker leaves the pool"},
    {"intervention", "t_u_threshold", "9", "spells longer than this are Low prospect"},
    {"scenario", "name", "balanced",
     "balanced | onlylow | onlyhigh | balanced_errors_penalized | custom"},
    {"scenario", "k11", "1", "custom only: rate, real Low / predicted Low (display units)"},
    {"scenario", "k12", "1", "custom only: rate, real Low / predicted High"},
    {"scenario", "k21", "1", "custom only: rate, real High / predicted Low"},
    {"scenario", "k22", "1", "custom only: rate, real High / predicted High"},
    {"scenario", "k_scale", "0.002", "effective rate = displayed rate * k_scale"},
    {"engine", "model_variant", "full", "full (uses x_pr) | base"},
    {"engine", "pool_size", "400", "job-seekers in the pool, active plus waiting (>= 10)"},
    {"engine", "spinup_steps", "400", "timesteps without the PES"},
    {"engine", "spinup_discard", "200", "leading spin-up timesteps excluded from history and output"},
    {"engine", "total_steps", "1000", "timesteps per run, spin-up included"},
    {"engine", "refit_every", "1", "refit the models every this many timesteps"},
    {"engine", "n_runs", "10", "runs per ensemble"},
    {"engine", "base_seed", "1", "run i uses seed base_seed + i"},
    {"fit", "ridge", "1e-06", "L2 penalty on the logistic slopes"},
    {"fit", "tol", "1e-08", "Newton step size at convergence"},
    {"fit", "max_iter", "100", "Newton iteration limit"},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view v, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ParseError("expected a number, got '" + std::string(v) + "'", line);
  }
  return out;
}

template <typename Int>
Int to_int(std::string_view v, int line) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ParseError("expected an integer, got '" + std::string(v) + "'", line);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

SimulationConfig parse_config(std::string_view text) {
  SimulationConfig cfg;
  std::optional<double> x1_max;
  std::optional<double> x2_max;
  std::optional<ScenarioName> scenario_name;
  std::optional<double> k_entries[2][2];
  std::optional<double> k_scale;
  std::map<std::string, int> seen;

  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const auto& k : config_keys()) known = known || k.section == section;
      if (!known) throw ParseError("unknown section [" + section + "]", line_no);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) throw ParseError("key '" + key + "' outside any [section]", line_no);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);

    bool known = false;
    for (const auto& k : config_keys()) known = known || (k.section == section && k.key == key);
    if (!known) throw ParseError("unknown key '" + key + "' in [" + section + "]", line_no);
    const std::string qualified = section + "." + key;
    if (auto [it, inserted] = seen.emplace(qualified, line_no); !inserted) {
      throw ParseError("duplicate key '" + qualified + "' (first set on line " +
                           std::to_string(it->second) + ")",
                       line_no);
    }

    if (section == "population") {
      if (key == "alpha_pr") cfg.population.alpha_pr = to_double(value, line_no);
      if (key == "trunc") cfg.population.trunc = to_double(value, line_no);
    } else if (section == "market") {
      if (key == "alpha_l") cfg.market.alpha_l = to_double(value, line_no);
      if (key == "beta_l") cfg.market.beta_l = to_double(value, line_no);
      if (key == "beta_b") cfg.market.beta_b = to_double(value, line_no);
    } else if (section == "intervention") {
      if (key == "x1_max") x1_max = to_double(value, line_no);
      if (key == "x2_max") x2_max = to_double(value, line_no);
      if (key == "delta_t_u") cfg.intervention.delta_t_u = to_int<int>(value, line_no);
      if (key == "t_u_max") cfg.intervention.t_u_max = to_int<int>(value, line_no);
      if (key == "t_u_threshold") cfg.intervention.t_u_threshold = to_int<int>(value, line_no);
    } else if (section == "scenario") {
      if (key == "name") {
        scenario_name = parse_scenario_name(value);
        if (!scenario_name) throw ParseError("unknown scenario '" + std::string(value) + "'", line_no);
      }
      if (key.size() == 3 && key[0] == 'k') {
        k_entries[key[1] - '1'][key[2] - '1'] = to_double(value, line_no);
      }
      if (key == "k_scale") k_scale = to_double(value, line_no);
    } else if (section == "engine") {
      if (key == "model_variant") {
        if (value == "full") {
          cfg.model_variant = Variant::Full;
        } else if (value == "base") {
          cfg.model_variant = Variant::Base;
        } else {
          throw ParseError("model_variant must be full or base", line_no);
        }
      }
      if (key == "pool_size") cfg.pool_size = to_int<int>(value, line_no);
      if (key == "spinup_steps") cfg.spinup_steps = to_int<int>(value, line_no);
      if (key == "spinup_discard") cfg.spinup_discard = to_int<int>(value, line_no);
      if (key == "total_steps") cfg.total_steps = to_int<int>(value, line_no);
      if (key == "refit_every") cfg.refit_every = to_int<int>(value, line_no);
      if (key == "n_runs") cfg.n_runs = to_int<int>(value, line_no);
      if (key == "base_seed") cfg.base_seed = to_int<std::uint64_t>(value, line_no);
    } else if (section == "fit") {
      if (key == "ridge") cfg.fit.ridge = to_double(value, line_no);
      if (key == "tol") cfg.fit.tol = to_double(value, line_no);
      if (key == "max_iter") cfg.fit.max_iter = to_int<int>(value, line_no);
    }
  }

  const auto [cap1, cap2] = default_skill_caps(cfg.population);
  cfg.intervention.x1_max = x1_max.value_or(cap1);
  cfg.intervention.x2_max = x2_max.value_or(cap2);

  const auto name = scenario_name.value_or(ScenarioName::Balanced);
  cfg.scenario = ScenarioConfig::named(name, k_scale.value_or(1.0 / 500.0));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!k_entries[i][j]) continue;
      if (name != ScenarioName::Custom) {
        throw ValidationError("scenario.k" + std::to_string(i + 1) + std::to_string(j + 1) +
                              " may only be set when scenario.name = custom");
      }
      cfg.scenario.k_display[i][j] = *k_entries[i][j];
    }
  }

  cfg.validate();
  return cfg;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  LoadedConfig loaded;
  loaded.source = buf.str();
  loaded.config = parse_config(loaded.source);
  return loaded;
}

std::string serialize_config(const SimulationConfig& c) {
  std::ostringstream o;
  o << "[population]\n"
    << "alpha_pr = " << format_double(c.population.alpha_pr) << "\n"
    << "trunc = " << format_double(c.population.trunc) << "\n\n"
    << "[market]\n"
    << "alpha_l = " << format_double(c.market.alpha_l) << "\n"
    << "beta_l = " << format_double(c.market.beta_l) << "\n"
    << "beta_b = " << format_double(c.market.beta_b) << "\n\n"
    << "[intervention]\n"
    << "x1_max = " << format_double(c.intervention.x1_max) << "\n"
    << "x2_max = " << format_double(c.intervention.x2_max) << "\n"
    << "delta_t_u = " << c.intervention.delta_t_u << "\n"
    << "t_u_max = " << c.intervention.t_u_max << "\n"
    << "t_u_threshold = " << c.intervention.t_u_threshold << "\n\n"
    << "[scenario]\n"
    << "name = " << to_string(c.scenario.name) << "\n";
  if (c.scenario.name == ScenarioName::Custom) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        o << "k" << i + 1 << j + 1 << " = " << format_double(c.scenario.k_display[i][j]) << "\n";
      }
    }
  }
  o << "k_scale = " << format_double(c.scenario.k_scale) << "\n\n"
    << "[engine]\n"
    << "model_variant = " << to_string(c.model_variant) << "\n"
    << "pool_size = " << c.pool_size << "\n"
    << "spinup_steps = " << c.spinup_steps << "\n"
    << "spinup_discard = " << c.spinup_discard << "\n"
    << "total_steps = " << c.total_steps << "\n"
    << "refit_every = " << c.refit_every << "\n"
    << "n_runs = " << c.n_runs << "\n"
    << "base_seed = " << c.base_seed << "\n\n"
    << "[fit]\n"
    << "ridge = " << format_double(c.fit.ridge) << "\n"
    << "tol = " << format_double(c.fit.tol) << "\n"
    << "max_iter = " << c.fit.max_iter << "\n";
  return o.str();
}

std::string fingerprint(const SimulationConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lmsim
