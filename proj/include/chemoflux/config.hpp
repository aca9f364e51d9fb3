#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemoflux/cole_hopf.hpp"
#include "chemoflux/evolve.hpp"
#include "chemoflux/init_data.hpp"

namespace chemoflux {

enum class Study { single_run, delta_sweep, refinement, cross_validate, theta_scan };

/// A length that is either absolute or a multiple of the grid spacing ("2h").
struct Length {
  double value = 0.0;
  bool in_cells = false;
  double resolve(const Grid& grid) const { return in_cells ? value * grid.spacing() : value; }
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ExperimentConfig {
  Study study = Study::single_run;
  double side_length = 0.0;
  std::size_t resolution = 256;
  ChemistryParams params;
  /// recipe.delta is ignored in favour of `delta`, which may be grid-relative.
  InitialDataRecipe recipe;
  Length delta;
  Mode mode = Mode::transformed;
  StepperConfig stepper;
  std::filesystem::path output_dir = "out";
  std::vector<double> snapshot_times;

  double decay_c_lo = 2.0;
  double decay_c_hi = 20.0;

  std::vector<Length> sweep_deltas;
  std::vector<std::size_t> refine_resolutions;
  std::vector<double> refine_dts;
  std::vector<std::size_t> xval_resolutions;
  std::vector<double> xval_dts;
  std::vector<double> scan_amplitudes;

  Grid grid() const { return Grid(side_length, resolution); }
  /// Recipe with delta resolved against `grid`.
  InitialDataRecipe recipe_for(const Grid& grid) const;
};

/// Defaults used when a key is absent: the flagship two-disk configuration.
ExperimentConfig default_config();

/// Parses "section.key = value" lines; '#' starts a comment. Unknown keys,
/// malformed values and missing study-specific fields raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks the cross-field invariants (study-specific lists, recipe parameters).
void validate_config(const ExperimentConfig& cfg);

Study parse_study(const std::string& name);
const char* to_string(Study study);

}  // namespace chemoflux
