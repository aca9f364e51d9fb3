#include "chemoflux/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "chemoflux/snapshot.hpp"
#include "chemoflux/spectral.hpp"

namespace chemoflux {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

/// Samples a fine-grid field at the points of a coarser grid whose resolution divides it.
ScalarField subsample(const ScalarField& fine, const Grid& coarse) {
  const std::size_t nf = fine.grid().resolution();
  const std::size_t nc = coarse.resolution();
  if (nf % nc != 0 || fine.grid().side_length() != coarse.side_length()) {
    throw std::invalid_argument("subsample: incompatible grids");
  }
  const std::size_t stride = nf / nc;
  ScalarField out(coarse);
  for (std::size_t iy = 0; iy < nc; ++iy) {
    for (std::size_t ix = 0; ix < nc; ++ix) out(iy, ix) = fine(iy * stride, ix * stride);
  }
  return out;
}

VectorField subsample(const VectorField& fine, const Grid& coarse) {
  return {subsample(fine.x(), coarse), subsample(fine.y(), coarse)};
}

VectorField velocity_of(const SimState& s, const ChemistryParams& params) {
  return s.mode() == Mode::transformed ? s.v() : forward_transform(s.c(), params);
}

double l2_distance(const ScalarField& a, const ScalarField& b) {
  ScalarField d = a;
  d -= b;
  return lp_norm(d, 2.0);
}

double l2_distance(const VectorField& a, const VectorField& b) {
  VectorField d = a;
  d -= b;
  return lp_norm(d, 2.0);
}

/// First recorded value at or after `t`, or NaN if none.
double value_at_or_after(const std::vector<DiagnosticsRecord>& records, double t,
                         double DiagnosticsRecord::*field) {
  for (const auto& r : records) {
    if (r.t >= t - 1e-12) return r.*field;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

RunOptions options_for(const ExperimentConfig& cfg, const PreparedRun& prepared) {
  RunOptions options;
  options.p0 = cfg.recipe.p0;
  options.snapshot_times = cfg.snapshot_times;
  if (cfg.mode == Mode::transformed) options.c0 = prepared.c0;
  return options;
}

}  // namespace

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

PreparedRun prepare_run(const ExperimentConfig& cfg, const Grid& grid) {
  InitialData data = build_initial_data(cfg.recipe_for(grid), grid);
  ScalarField c0 = initial_chemical(data, cfg.recipe.c0_level, cfg.params.mu());
  SimState state = cfg.mode == Mode::transformed ? SimState::transformed(0.0, data.u0, data.v0)
                                                 : SimState::original(0.0, data.u0, c0);
  return {std::move(data), std::move(c0), std::move(state)};
}

SingleRunResult run_single(const ExperimentConfig& cfg) {
  const Grid grid = cfg.grid();
  PreparedRun prepared = prepare_run(cfg, grid);
  SingleRunResult result{run(prepared.state, cfg.stepper, cfg.params, options_for(cfg, prepared)),
                         prepared.data.summary,
                         {}};

  const auto& records = result.trajectory.records;
  const double t_end = records.empty() ? 0.0 : records.back().t;
  auto try_fit = [&](std::string_view column, double lo, double hi) {
    hi = std::min(hi, t_end);
    if (!(hi > lo)) return;
    try {
      result.fits.push_back(fit_decay(records, column, lo, hi));
    } catch (const std::invalid_argument&) {
      // Too few samples or a nonpositive value in the window: no fit for this quantity.
    }
  };
  try_fit("c_linf", cfg.decay_c_lo, cfg.decay_c_hi);
  try_fit("u_linf", 1.0, t_end);
  try_fit("v_l4", 1.0, t_end);
  return result;
}

void write_single_run(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                      const SingleRunResult& result, const std::string& config_text) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "diagnostics.csv");
    write_diagnostics_csv(out, result.trajectory.records);
  }
  {
    auto out = open_output(dir / "summary.csv");
    write_decay_summary_csv(out, result.fits);
  }
  {
    const auto& o = result.trajectory.outcome;
    const auto& s = result.summary;
    auto out = open_output(dir / "run_info.csv");
    out << "key,value\n"
        << "status," << to_string(o.status) << '\n'
        << "exit_code," << exit_code(o.status) << '\n'
        << "t_final," << fmt(o.t) << '\n'
        << "steps," << result.trajectory.steps << '\n'
        << "blowup_integral," << fmt(o.blowup_integral) << '\n'
        << "theta0," << fmt(s.theta0) << '\n'
        << "M," << fmt(s.M) << '\n'
        << "eta0," << fmt(s.eta0) << '\n'
        << "delta," << fmt(s.delta) << '\n'
        << "linf_amplitude," << fmt(s.linf_amplitude) << '\n'
        << "p0," << fmt(cfg.recipe.p0) << '\n';
  }
  {
    auto out = open_output(dir / "config.echo");
    out << config_text;
  }
  std::size_t k = 0;
  for (const auto& snap : result.trajectory.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%03zu.cfx", k++);
    std::vector<ScalarField> components{snap.state.u};
    if (snap.state.mode() == Mode::transformed) {
      components.push_back(snap.state.v().x());
      components.push_back(snap.state.v().y());
    } else {
      components.push_back(snap.state.c());
    }
    write_snapshot(dir / name, components);
  }
  if (!result.trajectory.snapshots.empty()) {
    auto out = open_output(dir / "snapshots.csv");
    out << "file,t\n";
    k = 0;
    for (const auto& snap : result.trajectory.snapshots) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%03zu.cfx", k++);
      out << name << ',' << fmt(snap.t) << '\n';
    }
  }
}

DeltaSweepReport run_delta_sweep(const ExperimentConfig& cfg, int threads) {
  ExperimentConfig checked = cfg;
  checked.study = Study::delta_sweep;
  validate_config(checked);

  const Grid grid = cfg.grid();
  const std::size_t m = cfg.sweep_deltas.size();
  std::vector<std::optional<Trajectory>> runs(m);
  parallel_for(m, threads, [&](std::size_t i) {
    ExperimentConfig local = cfg;
    local.delta = cfg.sweep_deltas[i];
    local.snapshot_times.clear();
    PreparedRun prepared = prepare_run(local, grid);
    runs[i] = run(prepared.state, local.stepper, local.params, options_for(local, prepared));
  });

  DeltaSweepReport report;
  for (std::size_t i = 0; i < m; ++i) {
    report.deltas.push_back(cfg.sweep_deltas[i].resolve(grid));
    report.statuses.push_back(runs[i]->outcome.status);
  }
  report.t_final = runs.back()->final_state.t;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const SimState& a = runs[i]->final_state;
    const SimState& b = runs[i + 1]->final_state;
    report.u_distance.push_back(l2_distance(a.u, b.u));
    report.v_distance.push_back(l2_distance(velocity_of(a, cfg.params), velocity_of(b, cfg.params)));
  }
  report.strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < report.u_distance.size(); ++i) {
    if (!(report.u_distance[i + 1] < report.u_distance[i]) ||
        !(report.v_distance[i + 1] < report.v_distance[i])) {
      report.strictly_decreasing = false;
    }
  }
  return report;
}

void write_delta_sweep_csv(std::ostream& out, const DeltaSweepReport& report) {
  out << "delta,status,u_distance_to_next,v_distance_to_next\n";
  for (std::size_t i = 0; i < report.deltas.size(); ++i) {
    out << fmt(report.deltas[i]) << ',' << to_string(report.statuses[i]) << ',';
    if (i < report.u_distance.size()) {
      out << fmt(report.u_distance[i]) << ',' << fmt(report.v_distance[i]);
    } else {
      out << ',';
    }
    out << '\n';
  }
  out << "# t_final=" << fmt(report.t_final)
      << " strictly_decreasing=" << (report.strictly_decreasing ? "true" : "false") << '\n';
}

RefinementReport run_refinement(const ExperimentConfig& cfg, int threads) {
  ExperimentConfig checked = cfg;
  checked.study = Study::refinement;
  validate_config(checked);

  const auto& ns = cfg.refine_resolutions;
  const auto& dts = cfg.refine_dts;
  // A grid-relative mollifier width would change the datum with N; pin it on the coarsest grid.
  ExperimentConfig base = cfg;
  base.delta = {cfg.delta.resolve(Grid(cfg.side_length, ns.front())), false};
  const std::size_t jobs = ns.size() + dts.size();
  std::vector<std::optional<SimState>> finals(jobs);
  parallel_for(jobs, threads, [&](std::size_t j) {
    ExperimentConfig local = base;
    local.stepper.dt_mode = DtMode::fixed;
    local.snapshot_times.clear();
    if (j < ns.size()) {
      local.resolution = ns[j];
    } else {
      local.resolution = ns.back();
      local.stepper.dt = dts[j - ns.size()];
    }
    local.stepper.record_every = std::numeric_limits<int>::max();
    const Grid grid = local.grid();
    PreparedRun prepared = prepare_run(local, grid);
    Trajectory traj = run(prepared.state, local.stepper, local.params, options_for(local, prepared));
    if (traj.outcome.status != RunStatus::completed) {
      throw std::runtime_error("refinement run halted: " + traj.outcome.message);
    }
    finals[j] = std::move(traj.final_state);
  });

  RefinementReport report;
  report.resolutions = ns;
  report.dts = dts;
  const SimState& finest = *finals[ns.size() - 1];
  const VectorField finest_v = velocity_of(finest, cfg.params);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const SimState& s = *finals[i];
    const Grid& g = s.u.grid();
    const double du = l2_distance(s.u, subsample(finest.u, g));
    const double dv = l2_distance(velocity_of(s, cfg.params), subsample(finest_v, g));
    report.spatial_error.push_back(std::hypot(du, dv));
  }
  for (std::size_t i = 0; i + 1 < dts.size(); ++i) {
    const SimState& a = *finals[ns.size() + i];
    const SimState& b = *finals[ns.size() + i + 1];
    const double du = l2_distance(a.u, b.u);
    const double dv = l2_distance(velocity_of(a, cfg.params), velocity_of(b, cfg.params));
    report.temporal_difference.push_back(std::hypot(du, dv));
  }
  for (std::size_t i = 0; i + 1 < report.temporal_difference.size(); ++i) {
    const double ratio = report.temporal_difference[i] / report.temporal_difference[i + 1];
    report.temporal_order.push_back(std::log(ratio) / std::log(dts[i + 1] > 0 ? dts[i] / dts[i + 1] : 1.0));
  }
  return report;
}

void write_refinement_csv(std::ostream& out, const RefinementReport& report) {
  out << "kind,level,parameter,value,order\n";
  for (std::size_t i = 0; i < report.resolutions.size(); ++i) {
    out << "spatial_error," << i << ',' << report.resolutions[i] << ',' << fmt(report.spatial_error[i])
        << ",\n";
  }
  for (std::size_t i = 0; i < report.temporal_difference.size(); ++i) {
    out << "temporal_difference," << i << ',' << fmt(report.dts[i]) << ','
        << fmt(report.temporal_difference[i]) << ',';
    if (i < report.temporal_order.size()) out << fmt(report.temporal_order[i]);
    out << '\n';
  }
}

CrossValidationReport run_cross_validate(const ExperimentConfig& cfg, int threads) {
  ExperimentConfig checked = cfg;
  checked.study = Study::cross_validate;
  validate_config(checked);

  const std::size_t levels = cfg.xval_resolutions.size();
  CrossValidationReport report;
  report.levels.resize(levels);
  parallel_for(levels, threads, [&](std::size_t i) {
    ExperimentConfig local = cfg;
    local.resolution = cfg.xval_resolutions[i];
    local.stepper.dt = cfg.xval_dts[i];
    local.stepper.dt_mode = DtMode::fixed;
    local.snapshot_times.clear();
    const Grid grid = local.grid();

    local.mode = Mode::transformed;
    PreparedRun transformed = prepare_run(local, grid);
    std::vector<std::pair<ScalarField, VectorField>> reference;
    RunOptions t_opts = options_for(local, transformed);
    t_opts.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
      reference.emplace_back(s.u, s.v());
    };
    const Trajectory t_run = run(transformed.state, local.stepper, local.params, t_opts);

    local.mode = Mode::original;
    PreparedRun original = prepare_run(local, grid);
    CrossValidationLevel level;
    level.resolution = local.resolution;
    level.dt = local.stepper.dt;
    std::size_t index = 0;
    RunOptions o_opts = options_for(local, original);
    o_opts.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
      if (index >= reference.size()) return;
      const auto& [u_ref, v_ref] = reference[index++];
      level.u_discrepancy = std::max(level.u_discrepancy, l2_distance(s.u, u_ref));
      level.v_discrepancy =
          std::max(level.v_discrepancy, l2_distance(forward_transform(s.c(), local.params), v_ref));
    };
    const Trajectory o_run = run(original.state, local.stepper, local.params, o_opts);
    level.transformed_status = t_run.outcome.status;
    level.original_status = o_run.outcome.status;
    report.levels[i] = level;
  });

  for (std::size_t i = 0; i + 1 < levels; ++i) {
    const auto& a = report.levels[i];
    const auto& b = report.levels[i + 1];
    const double h_ratio = static_cast<double>(b.resolution) / static_cast<double>(a.resolution);
    report.v_order.push_back(std::log(a.v_discrepancy / b.v_discrepancy) / std::log(h_ratio));
    report.u_order.push_back(std::log(a.u_discrepancy / b.u_discrepancy) / std::log(h_ratio));
  }
  return report;
}

void write_cross_validate_csv(std::ostream& out, const CrossValidationReport& report) {
  out << "N,dt,transformed_status,original_status,v_discrepancy,u_discrepancy,v_order,u_order\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const auto& l = report.levels[i];
    out << l.resolution << ',' << fmt(l.dt) << ',' << to_string(l.transformed_status) << ','
        << to_string(l.original_status) << ',' << fmt(l.v_discrepancy) << ',' << fmt(l.u_discrepancy)
        << ',';
    if (i > 0) out << fmt(report.v_order[i - 1]) << ',' << fmt(report.u_order[i - 1]);
    else out << ',';
    out << '\n';
  }
}

std::vector<ThetaScanRow> run_theta_scan(const ExperimentConfig& cfg, int threads) {
  ExperimentConfig checked = cfg;
  checked.study = Study::theta_scan;
  validate_config(checked);

  std::vector<ThetaScanRow> rows(cfg.scan_amplitudes.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    ExperimentConfig local = cfg;
    local.recipe.amplitude = cfg.scan_amplitudes[i];
    local.snapshot_times.clear();
    ThetaScanRow row;
    row.amplitude = local.recipe.amplitude;
    try {
      const SingleRunResult result = run_single(local);
      const auto& records = result.trajectory.records;
      row.theta0 = result.summary.theta0;
      row.M = result.summary.M;
      row.status = result.trajectory.outcome.status;
      row.A1 = records.back().A1;
      row.energy_bound_held = row.A1 <= 1.5 * row.theta0 + 1e-15;
      for (const auto& r : records) {
        if (r.t >= 1.0) row.sup_u_linf_after_1 = std::max(row.sup_u_linf_after_1, r.u_linf);
      }
      row.linf_window_held = row.sup_u_linf_after_1 <= 0.25;
      const double u1 = value_at_or_after(records, 1.0, &DiagnosticsRecord::u_linf);
      const double v1 = value_at_or_after(records, 1.0, &DiagnosticsRecord::v_l4);
      row.decayed = row.status == RunStatus::completed && records.back().t > 1.0 &&
                    records.back().u_linf <= u1 && records.back().v_l4 <= v1;
    } catch (const NegativeDensityError&) {
      // Amplitude pushes u0 below zero: the datum is outside the admissible class.
      row.status = RunStatus::blow_up;
    }
    rows[i] = row;
  });
  return rows;
}

void write_theta_scan_csv(std::ostream& out, const std::vector<ThetaScanRow>& rows) {
  out << "amplitude,theta0,M,status,decayed,A1,A1_le_1.5theta0,sup_u_linf_t_ge_1,linf_window_held\n";
  for (const auto& r : rows) {
    out << fmt(r.amplitude) << ',' << fmt(r.theta0) << ',' << fmt(r.M) << ',' << to_string(r.status)
        << ',' << (r.decayed ? "true" : "false") << ',' << fmt(r.A1) << ','
        << (r.energy_bound_held ? "true" : "false") << ',' << fmt(r.sup_u_linf_after_1) << ','
        << (r.linf_window_held ? "true" : "false") << '\n';
  }
}

int run_study(const ExperimentConfig& cfg, const std::filesystem::path& dir,
              const std::string& config_text, int threads) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "config.echo");
    out << config_text;
  }
  switch (cfg.study) {
    case Study::single_run: {
      const SingleRunResult result = run_single(cfg);
      write_single_run(dir, cfg, result, config_text);
      return exit_code(result.trajectory.outcome.status);
    }
    case Study::delta_sweep: {
      const auto report = run_delta_sweep(cfg, threads);
      auto out = open_output(dir / "delta_sweep.csv");
      write_delta_sweep_csv(out, report);
      for (auto s : report.statuses) {
        if (s != RunStatus::completed) return exit_code(s);
      }
      return 0;
    }
    case Study::refinement: {
      const auto report = run_refinement(cfg, threads);
      auto out = open_output(dir / "refinement.csv");
      write_refinement_csv(out, report);
      return 0;
    }
    case Study::cross_validate: {
      const auto report = run_cross_validate(cfg, threads);
      auto out = open_output(dir / "xval.csv");
      write_cross_validate_csv(out, report);
      for (const auto& l : report.levels) {
        if (l.transformed_status != RunStatus::completed) return exit_code(l.transformed_status);
        if (l.original_status != RunStatus::completed) return exit_code(l.original_status);
      }
      return 0;
    }
    case Study::theta_scan: {
      const auto rows = run_theta_scan(cfg, threads);
      auto out = open_output(dir / "theta_scan.csv");
      write_theta_scan_csv(out, rows);
      return 0;
    }
  }
  return 1;
}

}  // namespace chemoflux
