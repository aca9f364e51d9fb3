#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "chemoflux/cole_hopf.hpp"
#include "chemoflux/diagnostics.hpp"
#include "chemoflux/field.hpp"

namespace chemoflux {

enum class Mode { transformed, original };
enum class Scheme { imex_be, imex_cn };
enum class DtMode { fixed, cfl };

struct StepperConfig {
  double dt = 1e-2;
  DtMode dt_mode = DtMode::fixed;
  double cfl_number = 0.5;
  Scheme scheme = Scheme::imex_cn;
  double t_end = 1.0;
  int record_every = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// (u, v) for the transformed system or (u, c) for the original one.
struct SimState {
  double t = 0.0;
  ScalarField u;
  std::variant<VectorField, ScalarField> companion;

  static SimState transformed(double t, ScalarField u, VectorField v);
  static SimState original(double t, ScalarField u, ScalarField c);

  Mode mode() const { return companion.index() == 0 ? Mode::transformed : Mode::original; }
  const VectorField& v() const;
  const ScalarField& c() const;
};

class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(double t);
  double time() const { return t_; }

 private:
  double t_;
};

class ChemicalExtinctionError : public std::runtime_error {
 public:
  ChemicalExtinctionError(double t, std::size_t index, double value);
  double time() const { return t_; }
  std::size_t index() const { return index_; }
  double value() const { return value_; }

 private:
  double t_;
  std::size_t index_;
  double value_;
};

/// One IMEX step of u_t = Delta u + chi div(u v), v_t = grad u.
///
/// Transport is explicit (dealiased); diffusion is backward Euler (imex_be) or
/// Crank-Nicolson with a Heun predictor-corrector on the transport (imex_cn).
/// v receives the trapezoid of grad u at both time levels, so it stays a
/// spectral gradient. Throws BlowUpError on non-finite output.
SimState step_transformed(const SimState& state, double dt, Scheme scheme, const ChemistryParams& params);
SimState step_transformed(const SimState& state, const StepperConfig& cfg, const ChemistryParams& params);

/// Strang step of u_t = Delta u - xi div(u grad ln c), c_t = -mu u c:
/// half exact c-step, IMEX u-step with the drift frozen at the half-step chemical,
/// half exact c-step. Throws ChemicalExtinctionError or BlowUpError.
SimState step_original(const SimState& state, double dt, Scheme scheme, const ChemistryParams& params);
SimState step_original(const SimState& state, const StepperConfig& cfg, const ChemistryParams& params);

/// cfl * h / max(1e-12, chi ||v||_inf + h ||grad u||_inf), capped by cfg.dt.
double choose_dt(const SimState& state, const StepperConfig& cfg, const ChemistryParams& params);

enum class RunStatus { completed, blow_up, chemical_extinction };

/// Process exit code for a status: 0, 10, 11.
int exit_code(RunStatus status);
const char* to_string(RunStatus status);

struct RunOutcome {
  RunStatus status = RunStatus::completed;
  double t = 0.0;
  double blowup_integral = 0.0;
  std::string message;
};

struct Snapshot {
  double t;
  SimState state;
};

struct RunOptions {
  double p0 = 6.0;
  /// Times at which to keep a copy of the state; steps are shortened to land on them.
  std::vector<double> snapshot_times;
  /// Initial chemical for transformed runs; enables the c_linf column via ln c tracking.
  std::optional<ScalarField> c0;
  /// Called after every recorded row.
  std::function<void(const SimState&, const DiagnosticsRecord&)> on_record;
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  SimState final_state;
  RunOutcome outcome;
  std::size_t steps = 0;
};

/// Advances to cfg.t_end or the first halt. The initial state is projected onto
/// the dealiased band first (ln c, for the original mode).
Trajectory run(SimState initial, const StepperConfig& cfg, const ChemistryParams& params,
               const RunOptions& options = {});

}  // namespace chemoflux
