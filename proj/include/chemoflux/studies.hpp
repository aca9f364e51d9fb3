#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "chemoflux/config.hpp"
#include "chemoflux/diagnostics.hpp"
#include "chemoflux/evolve.hpp"
#include "chemoflux/init_data.hpp"

namespace chemoflux {

/// Runs fn(0..count-1) on up to `threads` workers. Results must be written by index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Initial state for the configured mode on `grid`, plus the data summary and c0.
struct PreparedRun {
  InitialData data;
  ScalarField c0;
  SimState state;
};
PreparedRun prepare_run(const ExperimentConfig& cfg, const Grid& grid);

struct SingleRunResult {
  Trajectory trajectory;
  DataSummary summary;
  std::vector<DecayFit> fits;
};

SingleRunResult run_single(const ExperimentConfig& cfg);

/// Writes diagnostics.csv, summary.csv, snapshot_<k>.cfx and config.echo into `dir`.
void write_single_run(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                      const SingleRunResult& result, const std::string& config_text);

// --- delta sweep ----------------------------------------------------------------

struct DeltaSweepReport {
  std::vector<double> deltas;
  std::vector<RunStatus> statuses;
  /// Entry i compares delta_i with delta_{i+1} at the final time.
  std::vector<double> u_distance;
  std::vector<double> v_distance;
  double t_final = 0.0;
  bool strictly_decreasing = false;
};

DeltaSweepReport run_delta_sweep(const ExperimentConfig& cfg, int threads = 1);
void write_delta_sweep_csv(std::ostream& out, const DeltaSweepReport& report);

// --- refinement -------------------------------------------------------------------

struct RefinementReport {
  std::vector<std::size_t> resolutions;
  /// L2 error of (u, v) against the finest resolution at the coarse sample points.
  std::vector<double> spatial_error;
  std::vector<double> dts;
  /// Entry i is ||q_{dt_i} - q_{dt_{i+1}}||.
  std::vector<double> temporal_difference;
  /// Entry i is the order from temporal_difference i and i+1.
  std::vector<double> temporal_order;
};

RefinementReport run_refinement(const ExperimentConfig& cfg, int threads = 1);
void write_refinement_csv(std::ostream& out, const RefinementReport& report);

// --- cross-validation -----------------------------------------------------------------

struct CrossValidationLevel {
  std::size_t resolution = 0;
  double dt = 0.0;
  RunStatus transformed_status = RunStatus::completed;
  RunStatus original_status = RunStatus::completed;
  /// max over recorded times of ||forward_transform(c) - v||_2.
  double v_discrepancy = 0.0;
  /// max over recorded times of ||u_original - u_transformed||_2.
  double u_discrepancy = 0.0;
};

struct CrossValidationReport {
  std::vector<CrossValidationLevel> levels;
  /// Order in the grid spacing between consecutive levels.
  std::vector<double> v_order;
  std::vector<double> u_order;
};

CrossValidationReport run_cross_validate(const ExperimentConfig& cfg, int threads = 1);
void write_cross_validate_csv(std::ostream& out, const CrossValidationReport& report);

// --- theta scan -----------------------------------------------------------------------

struct ThetaScanRow {
  double amplitude = 0.0;
  double theta0 = 0.0;
  double M = 0.0;
  RunStatus status = RunStatus::completed;
  /// ||u-1||_inf and ||v||_4 at the final time are below their t=1 values.
  bool decayed = false;
  double A1 = 0.0;
  bool energy_bound_held = false;
  double sup_u_linf_after_1 = 0.0;
  bool linf_window_held = false;
};

std::vector<ThetaScanRow> run_theta_scan(const ExperimentConfig& cfg, int threads = 1);
void write_theta_scan_csv(std::ostream& out, const std::vector<ThetaScanRow>& rows);

/// Runs the study selected by cfg.study and writes its artifacts into `dir`.
/// Returns the process exit code.
int run_study(const ExperimentConfig& cfg, const std::filesystem::path& dir,
              const std::string& config_text, int threads);

}  // namespace chemoflux
