#include "chemoflux/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "chemoflux/spectral.hpp"

namespace chemoflux {

namespace {

constexpr std::array<std::string_view, kDiagnosticsColumnCount> kColumns{
    "t",           "sigma",          "u_l2",         "grad_u_l2",         "u_linf",
    "v_l2",        "v_l4",           "v_lp0",        "v_linf",            "c_linf",
    "flux_l2",     "div_flux_residual", "curl_flux_residual", "A1",       "A2",
    "A3",          "blowup_integral", "gn_ratio",    "ut_l2",             "grad_ut_l2",
    "curl_source_l2", "curl_v_linf", "mean_u",       "mean_v1",           "mean_v2"};

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ScalarField perturbation_of(const ScalarField& u) {
  ScalarField p = u;
  p += -1.0;
  return p;
}

}  // namespace

std::span<const std::string_view> diagnostics_columns() { return kColumns; }

std::array<double, kDiagnosticsColumnCount> record_values(const DiagnosticsRecord& r) {
  return {r.t,     r.sigma,          r.u_l2,     r.grad_u_l2,   r.u_linf,
          r.v_l2,  r.v_l4,           r.v_lp0,    r.v_linf,      r.c_linf,
          r.flux_l2, r.div_flux_residual, r.curl_flux_residual, r.A1, r.A2,
          r.A3,    r.blowup_integral, r.gn_ratio, r.ut_l2,       r.grad_ut_l2,
          r.curl_source_l2, r.curl_v_linf, r.mean_u, r.mean_v1,  r.mean_v2};
}

double record_value(const DiagnosticsRecord& r, std::string_view column) {
  const auto it = std::find(kColumns.begin(), kColumns.end(), column);
  if (it == kColumns.end()) {
    throw std::invalid_argument("unknown diagnostics column '" + std::string(column) + "'");
  }
  return record_values(r)[static_cast<std::size_t>(it - kColumns.begin())];
}

void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records) {
  out << kDiagnosticsSchema << '\n';
  for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& r : records) {
    const auto values = record_values(r);
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_double(values[i]);
    out << '\n';
  }
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in) {
  std::vector<DiagnosticsRecord> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      std::istringstream hs(line);
      std::string name;
      std::size_t i = 0;
      while (std::getline(hs, name, ',')) {
        if (i >= kColumns.size() || name != kColumns[i]) {
          throw std::runtime_error("diagnostics CSV: unexpected column '" + name + "'");
        }
        ++i;
      }
      if (i != kColumns.size()) throw std::runtime_error("diagnostics CSV: missing columns");
      header_seen = true;
      continue;
    }
    std::array<double, kDiagnosticsColumnCount> v{};
    std::istringstream ls(line);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ls, cell, ',')) {
      if (i >= v.size()) throw std::runtime_error("diagnostics CSV: too many cells");
      v[i++] = std::stod(cell);
    }
    if (i != v.size()) throw std::runtime_error("diagnostics CSV: short row");
    DiagnosticsRecord r;
    r.t = v[0]; r.sigma = v[1]; r.u_l2 = v[2]; r.grad_u_l2 = v[3]; r.u_linf = v[4];
    r.v_l2 = v[5]; r.v_l4 = v[6]; r.v_lp0 = v[7]; r.v_linf = v[8]; r.c_linf = v[9];
    r.flux_l2 = v[10]; r.div_flux_residual = v[11]; r.curl_flux_residual = v[12];
    r.A1 = v[13]; r.A2 = v[14]; r.A3 = v[15]; r.blowup_integral = v[16]; r.gn_ratio = v[17];
    r.ut_l2 = v[18]; r.grad_ut_l2 = v[19]; r.curl_source_l2 = v[20]; r.curl_v_linf = v[21];
    r.mean_u = v[22]; r.mean_v1 = v[23]; r.mean_v2 = v[24];
    out.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("diagnostics CSV: no header row");
  return out;
}

VectorField effective_flux(const ScalarField& u, const VectorField& v, double chi) {
  VectorField flux = gradient(u);
  flux.x().add_scaled(spectral::dealiased_product(u, v.x()), chi);
  flux.y().add_scaled(spectral::dealiased_product(u, v.y()), chi);
  return flux;
}

ScalarField assemble_ut(const ScalarField& u, const VectorField& v, double chi) {
  const ScalarField pert = perturbation_of(u);
  Spectrum rhs = spectral::laplacian(spectral::forward(pert));
  rhs.add_scaled(spectral::divergence(spectral::dealiased_product_spectrum(pert, v.x()),
                                      spectral::dealiased_product_spectrum(pert, v.y())),
                 chi);
  rhs.add_scaled(spectral::divergence(spectral::forward(v.x()), spectral::forward(v.y())), chi);
  return spectral::inverse(rhs);
}

double flux_divergence_residual(const VectorField& flux, const ScalarField& rhs_ut) {
  require_same_grid(flux.grid(), rhs_ut.grid(), "flux_divergence_residual");
  ScalarField diff = divergence(flux);
  diff -= rhs_ut;
  return lp_norm(diff, 2.0);
}

double flux_divergence_residual(const ScalarField& u, const VectorField& v, double chi,
                                const ScalarField& rhs_ut) {
  return flux_divergence_residual(effective_flux(u, v, chi), rhs_ut);
}

ScalarField curl_flux_source(const ScalarField& u, const VectorField& v, double chi) {
  const VectorField g = gradient(u);
  ScalarField source(u.grid());
  for (std::size_t i = 0; i < source.size(); ++i) {
    source[i] = g.y()[i] * v.x()[i] - g.x()[i] * v.y()[i];
  }
  Spectrum s = spectral::forward(source);
  spectral::dealias(s);
  s *= chi;
  return spectral::inverse(s);
}

double curl_flux_residual(const ScalarField& u, const VectorField& v, double chi) {
  ScalarField diff = curl2d(effective_flux(u, v, chi));
  diff -= curl_flux_source(u, v, chi);
  return lp_norm(diff, 2.0);
}

void EnergyAccumulator::add(const DiagnosticsRecord& r) {
  const double s = r.sigma;
  const double grad2 = r.grad_u_l2 * r.grad_u_l2;
  const double ut2 = r.ut_l2 * r.ut_l2;
  const double v4 = std::pow(r.v_l4, 4);
  const Instant now{r.t, grad2, s * ut2 + s * s * r.grad_ut_l2 * r.grad_ut_l2, v4};

  sup1_ = std::max(sup1_, r.u_l2 * r.u_l2 + r.v_l2 * r.v_l2);
  // v_t = grad u exactly, so ||v_t|| = ||grad u||.
  sup2_ = std::max(sup2_, s * grad2 + s * s * ut2 + s * s * grad2);
  sup3_ = std::max(sup3_, v4);
  if (count_ > 0) {
    const double h = 0.5 * (now.t - last_.t);
    int1_ += h * (now.a1_integrand + last_.a1_integrand);
    int2_ += h * (now.a2_integrand + last_.a2_integrand);
    int3_ += h * (now.a3_integrand + last_.a3_integrand);
  }
  last_ = now;
  ++count_;
}

EnergyFunctionals EnergyAccumulator::value() const {
  return {sup1_ + int1_, sup2_ + int2_, sup3_ + int3_};
}

EnergyFunctionals energy_functionals(std::span<const DiagnosticsRecord> records) {
  if (records.empty()) throw std::invalid_argument("energy_functionals: empty trajectory");
  EnergyAccumulator acc;
  for (const auto& r : records) acc.add(r);
  return acc.value();
}

namespace {

struct EnergyInterval {
  double excess;  // dE + 2 int ||grad u||^2
  double source;  // int ||u-1||^2 ||v||_4^4
  double scale;
};

std::vector<EnergyInterval> energy_intervals(std::span<const DiagnosticsRecord> records) {
  std::vector<EnergyInterval> out;
  for (std::size_t n = 0; n + 1 < records.size(); ++n) {
    const auto& a = records[n];
    const auto& b = records[n + 1];
    const double h = 0.5 * (b.t - a.t);
    const double ea = a.u_l2 * a.u_l2 + a.v_l2 * a.v_l2;
    const double eb = b.u_l2 * b.u_l2 + b.v_l2 * b.v_l2;
    const double dissipation = h * (a.grad_u_l2 * a.grad_u_l2 + b.grad_u_l2 * b.grad_u_l2);
    const double source =
        h * (a.u_l2 * a.u_l2 * std::pow(a.v_l4, 4) + b.u_l2 * b.u_l2 * std::pow(b.v_l4, 4));
    out.push_back({eb - ea + 2.0 * dissipation, source, std::max(ea, eb)});
  }
  return out;
}

}  // namespace

double fit_energy_constant(std::span<const DiagnosticsRecord> records) {
  double c = 0.0;
  for (const auto& iv : energy_intervals(records)) {
    if (iv.excess > 0.0 && iv.source > 0.0) c = std::max(c, iv.excess / iv.source);
  }
  return c;
}

std::vector<std::size_t> energy_violations(std::span<const DiagnosticsRecord> records, double constant) {
  std::vector<std::size_t> out;
  const auto intervals = energy_intervals(records);
  for (std::size_t n = 0; n < intervals.size(); ++n) {
    const auto& iv = intervals[n];
    const double slack = 1e-12 * iv.scale + 1e-300;
    if (iv.excess > constant * iv.source * (1.0 + 1e-9) + slack) out.push_back(n);
  }
  return out;
}

double gn_ratio(const ScalarField& f) {
  const double grad = lp_norm(gradient(f), 2.0);
  if (!(grad > 0.0)) throw std::invalid_argument("gn_ratio: gradient vanishes, ratio undefined");
  const double l4 = lp_norm(f, 4.0);
  return l4 * l4 / (lp_norm(f, 2.0) * grad);
}

Lemma33Audit lemma33_ratio(const ScalarField& u, const VectorField& v, const ScalarField& ut,
                           double p, double chi) {
  Lemma33Audit audit;
  audit.curl_violated = lp_norm(curl2d(v), kInfinity) > kCurlTolerance;

  const VectorField flux = effective_flux(u, v, chi);
  const VectorField d_fx = gradient(flux.x());
  const VectorField d_fy = gradient(flux.y());
  ScalarField jac(u.grid());
  for (std::size_t i = 0; i < jac.size(); ++i) {
    jac[i] = std::sqrt(d_fx.x()[i] * d_fx.x()[i] + d_fx.y()[i] * d_fx.y()[i] +
                       d_fy.x()[i] * d_fy.x()[i] + d_fy.y()[i] * d_fy.y()[i]);
  }
  const double denominator = lp_norm(ut, p) + lp_norm(curl_flux_source(u, v, chi), p);
  if (denominator > 1e-14) audit.ratio = lp_norm(jac, p) / denominator;
  return audit;
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values, double t_lo,
                   double t_hi, std::string quantity) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_decay: length mismatch");
  if (!(t_hi > t_lo) || t_lo < 1.0) {
    throw std::invalid_argument("fit_decay: window must satisfy 1 <= t_lo < t_hi");
  }
  std::vector<double> ts;
  std::vector<double> ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0)) {
      throw std::invalid_argument("fit_decay: nonpositive value at t=" + format_double(times[i]));
    }
    ts.push_back(times[i]);
    ys.push_back(std::log(values[i]));
  }
  if (ts.size() < 10) throw std::invalid_argument("fit_decay: fewer than 10 samples in window");

  const double n = static_cast<double>(ts.size());
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tm += ts[i];
    ym += ys[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    sty += (ts[i] - tm) * (ys[i] - ym);
  }
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }
  DecayFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.quantity = std::move(quantity);
  fit.rate = -slope;
  fit.prefactor = std::exp(intercept);
  fit.residual = std::sqrt(ss / n);
  fit.samples = ts.size();
  return fit;
}

DecayFit fit_decay(std::span<const DiagnosticsRecord> records, std::string_view column, double t_lo,
                   double t_hi) {
  std::vector<double> ts;
  std::vector<double> vs;
  for (const auto& r : records) {
    ts.push_back(r.t);
    vs.push_back(record_value(r, column));
  }
  return fit_decay(ts, vs, t_lo, t_hi, std::string(column));
}

void write_decay_summary_csv(std::ostream& out, std::span<const DecayFit> fits) {
  out << "quantity,t_lo,t_hi,rate,prefactor,residual,samples\n";
  for (const auto& f : fits) {
    out << f.quantity << ',' << format_double(f.t_lo) << ',' << format_double(f.t_hi) << ','
        << format_double(f.rate) << ',' << format_double(f.prefactor) << ','
        << format_double(f.residual) << ',' << f.samples << '\n';
  }
}

DiagnosticsRecorder::DiagnosticsRecorder(ChemistryParams params, double p0)
    : params_(params), p0_(p0) {}

const DiagnosticsRecord& DiagnosticsRecorder::record(double t, const ScalarField& u,
                                                     const VectorField& v, double c_linf,
                                                     double blowup_integral) {
  const double chi = params_.chi();
  const ScalarField pert = perturbation_of(u);
  const VectorField grad_u = gradient(pert);
  const ScalarField ut = assemble_ut(u, v, chi);
  const VectorField flux = effective_flux(u, v, chi);
  const ScalarField source = curl_flux_source(u, v, chi);
  ScalarField curl_diff = curl2d(flux);
  curl_diff -= source;

  DiagnosticsRecord r;
  r.t = t;
  r.sigma = std::min(1.0, t);
  r.u_l2 = lp_norm(pert, 2.0);
  r.grad_u_l2 = lp_norm(grad_u, 2.0);
  r.u_linf = lp_norm(pert, kInfinity);
  r.v_l2 = lp_norm(v, 2.0);
  r.v_l4 = lp_norm(v, 4.0);
  r.v_lp0 = lp_norm(v, p0_);
  r.v_linf = lp_norm(v, kInfinity);
  r.c_linf = c_linf;
  r.flux_l2 = lp_norm(flux, 2.0);
  r.div_flux_residual = flux_divergence_residual(flux, ut);
  r.curl_flux_residual = lp_norm(curl_diff, 2.0);
  r.blowup_integral = blowup_integral;
  r.gn_ratio = r.grad_u_l2 > 0.0 ? gn_ratio(pert) : 0.0;
  r.ut_l2 = lp_norm(ut, 2.0);
  r.grad_ut_l2 = lp_norm(gradient(ut), 2.0);
  r.curl_source_l2 = lp_norm(source, 2.0);
  r.curl_v_linf = lp_norm(curl2d(v), kInfinity);
  r.mean_u = u.mean();
  r.mean_v1 = v.x().mean();
  r.mean_v2 = v.y().mean();

  energy_.add(r);
  const EnergyFunctionals a = energy_.value();
  r.A1 = a.A1;
  r.A2 = a.A2;
  r.A3 = a.A3;
  records_.push_back(r);
  return records_.back();
}

}  // namespace chemoflux
