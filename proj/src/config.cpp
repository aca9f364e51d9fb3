#include "chemoflux/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace chemoflux {

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Plain number, optionally suffixed by "pi" (e.g. "16pi", "pi", "0.5pi").
double parse_number(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (s.empty()) return scale;
    if (s.back() == '*') s = trim(s.substr(0, s.size() - 1));
  }
  double value = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError(key, "expected a number, got '" + raw + "'");
  return value * scale;
}

Length parse_length(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  if (!s.empty() && s.back() == 'h') {
    s.pop_back();
    return {s.empty() ? 1.0 : parse_number(key, s), true};
  }
  return {parse_number(key, s), false};
}

std::size_t parse_count(const std::string& key, const std::string& raw) {
  const double v = parse_number(key, raw);
  if (v < 0.0 || v != static_cast<double>(static_cast<long long>(v))) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + raw + "'");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> parse_numbers(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& item : split(raw, ',')) out.push_back(parse_number(key, item));
  return out;
}

/// "a,b,c ; d,e,f" -> groups of exactly `arity` numbers.
std::vector<std::vector<double>> parse_tuples(const std::string& key, const std::string& raw,
                                              std::size_t min_arity, std::size_t max_arity) {
  std::vector<std::vector<double>> out;
  for (const auto& group : split(raw, ';')) {
    auto values = parse_numbers(key, group);
    if (values.size() < min_arity || values.size() > max_arity) {
      throw ConfigError(key, "tuple '" + group + "' has " + std::to_string(values.size()) +
                                 " entries, expected " + std::to_string(min_arity) +
                                 (min_arity == max_arity ? "" : "-" + std::to_string(max_arity)));
    }
    out.push_back(std::move(values));
  }
  return out;
}

RecipeKind parse_kind(const std::string& key, const std::string& raw) {
  static const std::map<std::string, RecipeKind> kinds{
      {"piecewise_constant_disks", RecipeKind::piecewise_constant_disks},
      {"piecewise_constant_stripes", RecipeKind::piecewise_constant_stripes},
      {"smooth_bump", RecipeKind::smooth_bump},
      {"from_potential", RecipeKind::from_potential}};
  const auto it = kinds.find(raw);
  if (it == kinds.end()) throw ConfigError(key, "unknown recipe kind '" + raw + "'");
  return it->second;
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error("config field '" + key + "': " + message), key_(std::move(key)) {}

Study parse_study(const std::string& name) {
  if (name == "single_run") return Study::single_run;
  if (name == "delta_sweep") return Study::delta_sweep;
  if (name == "refinement") return Study::refinement;
  if (name == "cross_validate") return Study::cross_validate;
  if (name == "theta_scan") return Study::theta_scan;
  throw ConfigError("study", "unknown study '" + name + "'");
}

const char* to_string(Study study) {
  switch (study) {
    case Study::single_run: return "single_run";
    case Study::delta_sweep: return "delta_sweep";
    case Study::refinement: return "refinement";
    case Study::cross_validate: return "cross_validate";
    case Study::theta_scan: return "theta_scan";
  }
  return "unknown";
}

InitialDataRecipe ExperimentConfig::recipe_for(const Grid& grid) const {
  InitialDataRecipe r = recipe;
  r.delta = delta.resolve(grid);
  return r;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.side_length = 16.0 * std::numbers::pi;
  cfg.resolution = 256;
  cfg.recipe.kind = RecipeKind::piecewise_constant_disks;
  cfg.recipe.amplitude = 0.05;
  cfg.recipe.disks = {{-4.0, 0.0, 0.8, 1.0}, {4.0, 0.0, 0.8, -1.0}};
  cfg.recipe.p0 = 6.0;
  cfg.delta = {2.0, true};
  cfg.stepper.dt = 0.01;
  cfg.stepper.dt_mode = DtMode::cfl;
  cfg.stepper.cfl_number = 0.5;
  cfg.stepper.scheme = Scheme::imex_cn;
  cfg.stepper.t_end = 40.0;
  cfg.stepper.record_every = 1;
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg = default_config();
  double chi = cfg.params.chi();
  double mu = cfg.params.mu();
  double xi = cfg.params.xi();
  bool chi_given = false;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"study", [&](auto&, auto& v) { cfg.study = parse_study(v); }},
      {"output.dir", [&](auto&, auto& v) { cfg.output_dir = v; }},
      {"grid.L", [&](auto& k, auto& v) { cfg.side_length = parse_number(k, v); }},
      {"grid.N", [&](auto& k, auto& v) { cfg.resolution = parse_count(k, v); }},
      {"params.chi", [&](auto& k, auto& v) { chi = parse_number(k, v); chi_given = true; }},
      {"params.mu", [&](auto& k, auto& v) { mu = parse_number(k, v); }},
      {"params.xi", [&](auto& k, auto& v) { xi = parse_number(k, v); }},
      {"mode",
       [&](auto& k, auto& v) {
         if (v == "transformed") cfg.mode = Mode::transformed;
         else if (v == "original") cfg.mode = Mode::original;
         else throw ConfigError(k, "expected 'transformed' or 'original'");
       }},
      {"recipe.kind", [&](auto& k, auto& v) { cfg.recipe.kind = parse_kind(k, v); }},
      {"recipe.amplitude", [&](auto& k, auto& v) { cfg.recipe.amplitude = parse_number(k, v); }},
      {"recipe.disks",
       [&](auto& k, auto& v) {
         cfg.recipe.disks.clear();
         for (const auto& t : parse_tuples(k, v, 3, 4)) {
           cfg.recipe.disks.push_back({t[0], t[1], t[2], t.size() > 3 ? t[3] : 1.0});
         }
       }},
      {"recipe.stripes",
       [&](auto& k, auto& v) {
         cfg.recipe.stripes.clear();
         for (const auto& t : parse_tuples(k, v, 2, 3)) {
           cfg.recipe.stripes.push_back({t[0], t[1], t.size() > 2 ? t[2] : 1.0});
         }
       }},
      {"recipe.random_disks",
       [&](auto& k, auto& v) { cfg.recipe.random_disks = static_cast<int>(parse_count(k, v)); }},
      {"recipe.random_disk_radius",
       [&](auto& k, auto& v) { cfg.recipe.random_disk_radius = parse_number(k, v); }},
      {"recipe.bump_center",
       [&](auto& k, auto& v) {
         const auto c = parse_numbers(k, v);
         if (c.size() != 2) throw ConfigError(k, "expected two coordinates");
         cfg.recipe.bump_cx = c[0];
         cfg.recipe.bump_cy = c[1];
       }},
      {"recipe.bump_width", [&](auto& k, auto& v) { cfg.recipe.bump_width = parse_number(k, v); }},
      {"recipe.potential_modes",
       [&](auto& k, auto& v) {
         cfg.recipe.potential_modes.clear();
         for (const auto& t : parse_tuples(k, v, 3, 4)) {
           cfg.recipe.potential_modes.push_back(
               {static_cast<int>(t[0]), static_cast<int>(t[1]), t[2], t.size() > 3 ? t[3] : 0.0});
         }
       }},
      {"recipe.potential_bumps",
       [&](auto& k, auto& v) {
         cfg.recipe.potential_bumps.clear();
         for (const auto& t : parse_tuples(k, v, 4, 4)) {
           cfg.recipe.potential_bumps.push_back({t[0], t[1], t[2], t[3]});
         }
       }},
      {"recipe.p0", [&](auto& k, auto& v) { cfg.recipe.p0 = parse_number(k, v); }},
      {"recipe.delta", [&](auto& k, auto& v) { cfg.delta = parse_length(k, v); }},
      {"recipe.seed", [&](auto& k, auto& v) { cfg.recipe.seed = parse_count(k, v); }},
      {"recipe.c0", [&](auto& k, auto& v) { cfg.recipe.c0_level = parse_number(k, v); }},
      {"stepper.dt", [&](auto& k, auto& v) { cfg.stepper.dt = parse_number(k, v); }},
      {"stepper.dt_mode",
       [&](auto& k, auto& v) {
         if (v == "fixed") cfg.stepper.dt_mode = DtMode::fixed;
         else if (v == "cfl") cfg.stepper.dt_mode = DtMode::cfl;
         else throw ConfigError(k, "expected 'fixed' or 'cfl'");
       }},
      {"stepper.cfl", [&](auto& k, auto& v) { cfg.stepper.cfl_number = parse_number(k, v); }},
      {"stepper.scheme",
       [&](auto& k, auto& v) {
         if (v == "imex_cn") cfg.stepper.scheme = Scheme::imex_cn;
         else if (v == "imex_be") cfg.stepper.scheme = Scheme::imex_be;
         else throw ConfigError(k, "expected 'imex_cn' or 'imex_be'");
       }},
      {"stepper.t_end", [&](auto& k, auto& v) { cfg.stepper.t_end = parse_number(k, v); }},
      {"stepper.record_every",
       [&](auto& k, auto& v) { cfg.stepper.record_every = static_cast<int>(parse_count(k, v)); }},
      {"snapshot.times", [&](auto& k, auto& v) { cfg.snapshot_times = parse_numbers(k, v); }},
      {"decay.c_window",
       [&](auto& k, auto& v) {
         const auto w = parse_numbers(k, v);
         if (w.size() != 2) throw ConfigError(k, "expected 't_lo, t_hi'");
         cfg.decay_c_lo = w[0];
         cfg.decay_c_hi = w[1];
       }},
      {"sweep.deltas",
       [&](auto& k, auto& v) {
         cfg.sweep_deltas.clear();
         for (const auto& item : split(v, ',')) cfg.sweep_deltas.push_back(parse_length(k, item));
       }},
      {"refine.N",
       [&](auto& k, auto& v) {
         cfg.refine_resolutions.clear();
         for (const auto& item : split(v, ',')) cfg.refine_resolutions.push_back(parse_count(k, item));
       }},
      {"refine.dt", [&](auto& k, auto& v) { cfg.refine_dts = parse_numbers(k, v); }},
      {"xval.N",
       [&](auto& k, auto& v) {
         cfg.xval_resolutions.clear();
         for (const auto& item : split(v, ',')) cfg.xval_resolutions.push_back(parse_count(k, item));
       }},
      {"xval.dt", [&](auto& k, auto& v) { cfg.xval_dts = parse_numbers(k, v); }},
      {"scan.amplitudes", [&](auto& k, auto& v) { cfg.scan_amplitudes = parse_numbers(k, v); }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    if (value.empty()) throw ConfigError(key, "empty value");
    it->second(key, value);
  }

  if (!chi_given) chi = mu * xi;
  try {
    cfg.params = ChemistryParams(chi, mu, xi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("params", e.what());
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.side_length > 0.0)) throw ConfigError("grid.L", "must be positive");
  if (cfg.resolution < 8 || cfg.resolution % 2 != 0) throw ConfigError("grid.N", "must be even and >= 8");
  if (!(cfg.recipe.p0 > 4.0)) throw ConfigError("recipe.p0", "must exceed 4");
  if (cfg.delta.value < 0.0) throw ConfigError("recipe.delta", "must be nonnegative");
  if (cfg.recipe.kind == RecipeKind::piecewise_constant_disks && cfg.recipe.disks.empty() &&
      cfg.recipe.random_disks == 0) {
    throw ConfigError("recipe.disks", "disk recipe needs at least one disk");
  }
  if (cfg.recipe.kind == RecipeKind::piecewise_constant_stripes && cfg.recipe.stripes.empty()) {
    throw ConfigError("recipe.stripes", "stripe recipe needs at least one stripe");
  }
  if (!(cfg.recipe.c0_level > 0.0)) throw ConfigError("recipe.c0", "must be positive");
  try {
    cfg.stepper.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("stepper", e.what());
  }
  if (!(cfg.decay_c_hi > cfg.decay_c_lo) || cfg.decay_c_lo < 1.0) {
    throw ConfigError("decay.c_window", "needs 1 <= t_lo < t_hi");
  }
  for (double t : cfg.snapshot_times) {
    if (t < 0.0) throw ConfigError("snapshot.times", "times must be nonnegative");
  }

  switch (cfg.study) {
    case Study::single_run:
      break;
    case Study::delta_sweep: {
      if (cfg.sweep_deltas.size() < 3) throw ConfigError("sweep.deltas", "needs at least 3 widths");
      const Grid grid = cfg.grid();
      for (std::size_t i = 0; i < cfg.sweep_deltas.size(); ++i) {
        const double d = cfg.sweep_deltas[i].resolve(grid);
        if (!(d > 0.0)) throw ConfigError("sweep.deltas", "widths must be positive");
        if (i > 0 && !(d < cfg.sweep_deltas[i - 1].resolve(grid))) {
          throw ConfigError("sweep.deltas", "widths must be strictly decreasing");
        }
      }
      break;
    }
    case Study::refinement: {
      if (cfg.refine_resolutions.size() < 3) throw ConfigError("refine.N", "needs at least 3 resolutions");
      if (cfg.refine_dts.size() < 3) throw ConfigError("refine.dt", "needs at least 3 time steps");
      for (std::size_t i = 1; i < cfg.refine_resolutions.size(); ++i) {
        const auto coarse = cfg.refine_resolutions[i - 1];
        const auto fine = cfg.refine_resolutions[i];
        if (!(fine > coarse) || fine % coarse != 0) {
          throw ConfigError("refine.N", "resolutions must increase by integer factors");
        }
      }
      for (std::size_t i = 1; i < cfg.refine_dts.size(); ++i) {
        if (!(cfg.refine_dts[i] < cfg.refine_dts[i - 1]) || !(cfg.refine_dts[i] > 0.0)) {
          throw ConfigError("refine.dt", "time steps must be positive and strictly decreasing");
        }
      }
      break;
    }
    case Study::cross_validate: {
      if (cfg.xval_resolutions.size() < 2) throw ConfigError("xval.N", "needs at least 2 levels");
      if (cfg.xval_dts.size() != cfg.xval_resolutions.size()) {
        throw ConfigError("xval.dt", "needs one time step per resolution");
      }
      if (!(cfg.recipe.c0_level > 0.0)) throw ConfigError("recipe.c0", "must be positive");
      break;
    }
    case Study::theta_scan: {
      if (cfg.scan_amplitudes.empty()) throw ConfigError("scan.amplitudes", "needs at least one amplitude");
      for (std::size_t i = 1; i < cfg.scan_amplitudes.size(); ++i) {
        if (!(cfg.scan_amplitudes[i] > cfg.scan_amplitudes[i - 1])) {
          throw ConfigError("scan.amplitudes", "amplitudes must be increasing");
        }
      }
      break;
    }
  }
}

}  // namespace chemoflux
