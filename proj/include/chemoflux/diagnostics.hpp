#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemoflux/cole_hopf.hpp"
#include "chemoflux/field.hpp"

namespace chemoflux {

/// One row of the diagnostics table. Field order is the CSV column order.
///
/// u_* norms refer to the perturbation u - 1. Residuals are absolute; the
/// companion scale columns (ut_l2, curl_source_l2) give their reference sizes.
struct DiagnosticsRecord {
  double t = 0.0;
  double sigma = 0.0;
  double u_l2 = 0.0;
  double grad_u_l2 = 0.0;
  double u_linf = 0.0;
  double v_l2 = 0.0;
  double v_l4 = 0.0;
  double v_lp0 = 0.0;
  double v_linf = 0.0;
  double c_linf = 0.0;
  double flux_l2 = 0.0;
  double div_flux_residual = 0.0;
  double curl_flux_residual = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double A3 = 0.0;
  double blowup_integral = 0.0;
  double gn_ratio = 0.0;
  double ut_l2 = 0.0;
  double grad_ut_l2 = 0.0;
  double curl_source_l2 = 0.0;
  double curl_v_linf = 0.0;
  double mean_u = 0.0;
  double mean_v1 = 0.0;
  double mean_v2 = 0.0;
};

inline constexpr std::size_t kDiagnosticsColumnCount = 25;
std::span<const std::string_view> diagnostics_columns();
std::array<double, kDiagnosticsColumnCount> record_values(const DiagnosticsRecord& r);
/// Looks up a column by name; throws std::invalid_argument for unknown names.
double record_value(const DiagnosticsRecord& r, std::string_view column);

inline constexpr std::string_view kDiagnosticsSchema = "# chemoflux diagnostics schema v1";

void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records);
std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in);

// --- Effective viscous flux -------------------------------------------------

/// F = grad u + chi * u v, with the product dealiased.
VectorField effective_flux(const ScalarField& u, const VectorField& v, double chi);

/// Right-hand side of the perturbation equation,
/// Delta(u-1) + chi div((u-1) v) + chi div v, assembled from the perturbation.
ScalarField assemble_ut(const ScalarField& u, const VectorField& v, double chi);

/// ||div F - rhs_ut||_2.
double flux_divergence_residual(const VectorField& flux, const ScalarField& rhs_ut);
double flux_divergence_residual(const ScalarField& u, const VectorField& v, double chi,
                                const ScalarField& rhs_ut);

/// chi * (perp-grad u) . v = chi * (d2 u v1 - d1 u v2), dealiased.
ScalarField curl_flux_source(const ScalarField& u, const VectorField& v, double chi);
/// ||curl2d(F) - curl_flux_source||_2.
double curl_flux_residual(const ScalarField& u, const VectorField& v, double chi);

// --- Energy functionals -----------------------------------------------------

struct EnergyFunctionals {
  double A1 = 0.0;
  double A2 = 0.0;
  double A3 = 0.0;
};

/// Running sup + trapezoid-integral accumulator for A1, A2, A3.
class EnergyAccumulator {
 public:
  void add(const DiagnosticsRecord& r);
  EnergyFunctionals value() const;
  bool empty() const { return count_ == 0; }

 private:
  struct Instant {
    double t;
    double a1_integrand;
    double a2_integrand;
    double a3_integrand;
  };
  std::size_t count_ = 0;
  Instant last_{};
  double sup1_ = 0.0, sup2_ = 0.0, sup3_ = 0.0;
  double int1_ = 0.0, int2_ = 0.0, int3_ = 0.0;
};

/// A1, A2, A3 over a recorded trajectory prefix; throws on an empty span.
EnergyFunctionals energy_functionals(std::span<const DiagnosticsRecord> records);

/// Smallest C for which dE <= -2 int ||grad u||^2 + C int ||u-1||^2 ||v||_4^4 holds
/// on every recorded interval.
double fit_energy_constant(std::span<const DiagnosticsRecord> records);
/// Indices n of intervals [t_n, t_{n+1}] violating the inequality with the given C.
std::vector<std::size_t> energy_violations(std::span<const DiagnosticsRecord> records, double constant);

// --- Inequality audits ------------------------------------------------------

/// ||f||_4^2 / (||f||_2 ||grad f||_2). Throws if grad f vanishes.
double gn_ratio(const ScalarField& f);

struct Lemma33Audit {
  /// Empty when the denominator is degenerate.
  std::optional<double> ratio;
  /// curl2d(v) exceeded the curl tolerance, so the identity behind the bound does not apply.
  bool curl_violated = false;
};

inline constexpr double kCurlTolerance = 1e-8;

/// ||grad F||_p / (||u_t||_p + ||chi (perp-grad u) . v||_p).
Lemma33Audit lemma33_ratio(const ScalarField& u, const VectorField& v, const ScalarField& ut,
                           double p, double chi = 1.0);

// --- Decay fits ---------------------------------------------------------------

struct DecayFit {
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::string quantity;
  /// Positive means decay: value ~ prefactor * exp(-rate t).
  double rate = 0.0;
  double prefactor = 0.0;
  /// RMS residual of the log-linear fit.
  double residual = 0.0;
  std::size_t samples = 0;
};

/// Least-squares line through (t, ln value) over samples with t in [t_lo, t_hi].
DecayFit fit_decay(std::span<const double> times, std::span<const double> values, double t_lo,
                   double t_hi, std::string quantity = {});
DecayFit fit_decay(std::span<const DiagnosticsRecord> records, std::string_view column, double t_lo,
                   double t_hi);

void write_decay_summary_csv(std::ostream& out, std::span<const DecayFit> fits);

// --- Recorder -------------------------------------------------------------------

/// Produces DiagnosticsRecord rows for a run and keeps the running energy functionals.
class DiagnosticsRecorder {
 public:
  DiagnosticsRecorder(ChemistryParams params, double p0);

  const DiagnosticsRecord& record(double t, const ScalarField& u, const VectorField& v, double c_linf,
                                  double blowup_integral);
  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  std::vector<DiagnosticsRecord> take_records() { return std::move(records_); }

 private:
  ChemistryParams params_;
  double p0_;
  EnergyAccumulator energy_;
  std::vector<DiagnosticsRecord> records_;
};

}  // namespace chemoflux
