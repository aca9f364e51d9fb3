#include "chemoflux/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chemoflux/spectral.hpp"

namespace chemoflux {

namespace {

std::string time_message(const char* what, double t) {
  std::ostringstream os;
  os << what << " at t=" << t;
  return os.str();
}

/// chi * div(P(u v)) in spectral form.
Spectrum transport(const ScalarField& u, const VectorField& v, double chi) {
  Spectrum s = spectral::divergence(spectral::dealiased_product_spectrum(u, v.x()),
                                    spectral::dealiased_product_spectrum(u, v.y()));
  s *= chi;
  return s;
}

/// v + scale * grad(inverse(s)), computed from the spectrum directly.
VectorField add_spectral_gradient(const VectorField& v, const Spectrum& s, double scale) {
  VectorField out = v;
  out.x().add_scaled(spectral::inverse(spectral::derivative(s, Axis::x)), scale);
  out.y().add_scaled(spectral::inverse(spectral::derivative(s, Axis::y)), scale);
  return out;
}

/// IMEX update of u with a frozen or co-evolving drift field. `drift_at` maps a
/// predicted u to the drift used in the corrector transport term.
template <typename DriftAt>
Spectrum advance_density(const ScalarField& u, const Spectrum& uh, const VectorField& drift,
                         double dt, Scheme scheme, double chi, DriftAt&& drift_at) {
  const Spectrum t0 = transport(u, drift, chi);
  if (scheme == Scheme::imex_be) {
    Spectrum rhs = uh;
    rhs.add_scaled(t0, dt);
    return spectral::helmholtz(rhs, dt);
  }
  Spectrum explicit_part = uh;
  explicit_part.add_scaled(spectral::laplacian(uh), 0.5 * dt);

  Spectrum predictor_rhs = explicit_part;
  predictor_rhs.add_scaled(t0, dt);
  const Spectrum predicted_h = spectral::helmholtz(predictor_rhs, 0.5 * dt);
  const ScalarField predicted = spectral::inverse(predicted_h);
  const Spectrum t1 = transport(predicted, drift_at(predicted_h), chi);

  Spectrum corrector_rhs = std::move(explicit_part);
  corrector_rhs.add_scaled(t0, 0.5 * dt);
  corrector_rhs.add_scaled(t1, 0.5 * dt);
  return spectral::helmholtz(corrector_rhs, 0.5 * dt);
}

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be positive");
}

}  // namespace

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("stepper.dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("stepper.t_end must be nonnegative");
  }
  if (t_end > 0.0 && dt > t_end) throw std::invalid_argument("stepper.dt must not exceed stepper.t_end");
  if (!(cfl_number > 0.0 && cfl_number <= 1.0)) {
    throw std::invalid_argument("stepper.cfl must lie in (0, 1]");
  }
  if (record_every < 1) throw std::invalid_argument("stepper.record_every must be >= 1");
}

SimState SimState::transformed(double t, ScalarField u, VectorField v) {
  require_same_grid(u.grid(), v.grid(), "SimState");
  return {t, std::move(u), std::move(v)};
}

SimState SimState::original(double t, ScalarField u, ScalarField c) {
  require_same_grid(u.grid(), c.grid(), "SimState");
  return {t, std::move(u), std::move(c)};
}

const VectorField& SimState::v() const {
  if (mode() != Mode::transformed) throw std::logic_error("SimState: no v in original mode");
  return std::get<VectorField>(companion);
}

const ScalarField& SimState::c() const {
  if (mode() != Mode::original) throw std::logic_error("SimState: no c in transformed mode");
  return std::get<ScalarField>(companion);
}

BlowUpError::BlowUpError(double t) : std::runtime_error(time_message("non-finite solution", t)), t_(t) {}

ChemicalExtinctionError::ChemicalExtinctionError(double t, std::size_t index, double value)
    : std::runtime_error(time_message("chemical concentration fell below the floor", t)),
      t_(t),
      index_(index),
      value_(value) {}

SimState step_transformed(const SimState& state, double dt, Scheme scheme,
                          const ChemistryParams& params) {
  require_positive_dt(dt);
  if (state.mode() != Mode::transformed) throw std::invalid_argument("step_transformed: wrong mode");
  const double chi = params.chi();
  const ScalarField& u = state.u;
  const VectorField& v = state.v();

  const Spectrum uh = spectral::forward(u);
  const Spectrum next_h = advance_density(u, uh, v, dt, scheme, chi, [&](const Spectrum& predicted_h) {
    return add_spectral_gradient(v, uh + predicted_h, 0.5 * dt);
  });
  ScalarField next_u = spectral::inverse(next_h);
  VectorField next_v = add_spectral_gradient(v, uh + next_h, 0.5 * dt);

  const double t = state.t + dt;
  if (!next_u.all_finite() || !next_v.all_finite()) throw BlowUpError(t);
  return SimState::transformed(t, std::move(next_u), std::move(next_v));
}

SimState step_transformed(const SimState& state, const StepperConfig& cfg,
                          const ChemistryParams& params) {
  return step_transformed(state, cfg.dt, cfg.scheme, params);
}

SimState step_original(const SimState& state, double dt, Scheme scheme, const ChemistryParams& params) {
  require_positive_dt(dt);
  if (state.mode() != Mode::original) throw std::invalid_argument("step_original: wrong mode");
  const double mu = params.mu();
  const ScalarField& u = state.u;

  const ScalarField c_half = c_step(state.c(), u, mu, 0.5 * dt);
  VectorField drift(u.grid());
  try {
    drift = forward_transform(c_half, params);
  } catch (const ChemicalFloorError& e) {
    throw ChemicalExtinctionError(state.t + 0.5 * dt, e.index(), e.value());
  }

  const Spectrum uh = spectral::forward(u);
  const Spectrum next_h = advance_density(u, uh, drift, dt, scheme, params.chi(),
                                          [&](const Spectrum&) -> const VectorField& { return drift; });
  ScalarField next_u = spectral::inverse(next_h);
  const double t = state.t + dt;
  if (!next_u.all_finite()) throw BlowUpError(t);

  ScalarField next_c = c_step(c_half, next_u, mu, 0.5 * dt);
  for (std::size_t i = 0; i < next_c.size(); ++i) {
    if (!(next_c[i] > kChemicalFloor)) throw ChemicalExtinctionError(t, i, next_c[i]);
  }
  return SimState::original(t, std::move(next_u), std::move(next_c));
}

SimState step_original(const SimState& state, const StepperConfig& cfg, const ChemistryParams& params) {
  return step_original(state, cfg.dt, cfg.scheme, params);
}

double choose_dt(const SimState& state, const StepperConfig& cfg, const ChemistryParams& params) {
  const Grid& grid = state.u.grid();
  const double h = grid.spacing();
  const double v_max = state.mode() == Mode::transformed
                           ? lp_norm(state.v(), kInfinity)
                           : lp_norm(forward_transform(state.c(), params), kInfinity);
  const double grad_max = lp_norm(gradient(state.u), kInfinity);
  const double speed = std::max(1e-12, v_max * params.chi() + grad_max * h);
  return std::min(cfg.dt, cfg.cfl_number * h / speed);
}

int exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return 0;
    case RunStatus::blow_up: return 10;
    case RunStatus::chemical_extinction: return 11;
  }
  return 1;
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "Completed";
    case RunStatus::blow_up: return "BlowUp";
    case RunStatus::chemical_extinction: return "ChemicalExtinction";
  }
  return "Unknown";
}

namespace {

double l4_fourth(const VectorField& v) {
  const double n = lp_norm(v, 4.0);
  return n * n * n * n;
}

SimState prepare_initial(SimState s) {
  if (s.mode() == Mode::transformed) {
    return SimState::transformed(s.t, spectral::band_limit(s.u), spectral::band_limit(s.v()));
  }
  const ScalarField& c = s.c();
  ScalarField log_c(c.grid());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > kChemicalFloor)) throw ChemicalExtinctionError(s.t, i, c[i]);
    log_c[i] = std::log(c[i]);
  }
  ScalarField banded = spectral::band_limit(log_c);
  for (double& x : banded.samples()) x = std::exp(x);
  return SimState::original(s.t, spectral::band_limit(s.u), std::move(banded));
}

}  // namespace

Trajectory run(SimState initial, const StepperConfig& cfg, const ChemistryParams& params,
               const RunOptions& options) {
  cfg.validate();
  const double t_start = initial.t;
  const double t_final = t_start + cfg.t_end;
  SimState state = prepare_initial(std::move(initial));
  const Mode mode = state.mode();

  std::optional<ScalarField> log_c;
  if (mode == Mode::transformed && options.c0) {
    log_c = ScalarField(state.u.grid());
    for (std::size_t i = 0; i < log_c->size(); ++i) {
      const double c = (*options.c0)[i];
      if (!(c > 0.0)) throw std::invalid_argument("run: c0 must be positive");
      (*log_c)[i] = std::log(c);
    }
  }

  std::vector<double> pending_snapshots;
  for (double ts : options.snapshot_times) {
    if (ts >= t_start && ts <= t_final) pending_snapshots.push_back(ts);
  }
  std::sort(pending_snapshots.begin(), pending_snapshots.end());
  pending_snapshots.erase(std::unique(pending_snapshots.begin(), pending_snapshots.end()),
                          pending_snapshots.end());

  DiagnosticsRecorder recorder(params, options.p0);
  Trajectory traj{{}, {}, state, {}, 0};
  double blowup_integral = 0.0;
  double v4_prev = 0.0;

  auto current_v = [&](const SimState& s) {
    return s.mode() == Mode::transformed ? s.v() : forward_transform(s.c(), params);
  };
  auto c_linf = [&](const SimState& s) {
    if (s.mode() == Mode::original) return lp_norm(s.c(), kInfinity);
    if (log_c) return std::exp(log_c->max());
    return 0.0;
  };
  auto record = [&](const SimState& s, const VectorField& v) {
    const auto& row = recorder.record(s.t, s.u, v, c_linf(s), blowup_integral);
    if (options.on_record) options.on_record(s, row);
  };
  auto take_snapshots = [&](const SimState& s) {
    while (!pending_snapshots.empty() && pending_snapshots.front() <= s.t + 1e-12) {
      traj.snapshots.push_back({s.t, s});
      pending_snapshots.erase(pending_snapshots.begin());
    }
  };

  {
    const VectorField v = current_v(state);
    v4_prev = l4_fourth(v);
    record(state, v);
  }
  take_snapshots(state);

  const double end_tol = 1e-12 * std::max(1.0, std::abs(t_final));
  bool last_recorded = true;
  try {
    while (t_final - state.t > end_tol) {
      double dt = cfg.dt_mode == DtMode::cfl ? choose_dt(state, cfg, params) : cfg.dt;
      double target = state.t + dt;
      if (!pending_snapshots.empty() && pending_snapshots.front() < target) {
        target = pending_snapshots.front();
      }
      if (t_final - target <= end_tol) target = t_final;
      dt = target - state.t;

      SimState next = mode == Mode::transformed ? step_transformed(state, dt, cfg.scheme, params)
                                                : step_original(state, dt, cfg.scheme, params);
      next.t = target;
      if (log_c) {
        log_c->add_scaled(state.u, -0.5 * params.mu() * dt);
        log_c->add_scaled(next.u, -0.5 * params.mu() * dt);
      }
      const VectorField v = current_v(next);
      const double v4 = l4_fourth(v);
      if (!std::isfinite(v4)) throw BlowUpError(next.t);
      blowup_integral += 0.5 * dt * (v4_prev + v4);
      v4_prev = v4;

      state = std::move(next);
      ++traj.steps;
      last_recorded = traj.steps % static_cast<std::size_t>(cfg.record_every) == 0;
      if (last_recorded) record(state, v);
      take_snapshots(state);
    }
    if (!last_recorded) record(state, current_v(state));
    traj.outcome = {RunStatus::completed, state.t, blowup_integral, "completed"};
  } catch (const BlowUpError& e) {
    traj.outcome = {RunStatus::blow_up, e.time(), blowup_integral, e.what()};
  } catch (const ChemicalExtinctionError& e) {
    traj.outcome = {RunStatus::chemical_extinction, e.time(), blowup_integral, e.what()};
  } catch (const ChemicalFloorError& e) {
    traj.outcome = {RunStatus::chemical_extinction, state.t, blowup_integral, e.what()};
  }

  traj.records = recorder.take_records();
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace chemoflux
