#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chemoflux/diagnostics.hpp"
#include "chemoflux/evolve.hpp"
#include "chemoflux/spectral.hpp"
#include "helpers.hpp"

using namespace chemoflux;
using testutil::kTwoPi;
using testutil::max_abs_diff;

namespace {

struct Pair {
  ScalarField u;
  VectorField v;
};

/// Band-limited (u, v) with v a gradient; not a solution of anything.
Pair random_pair(const Grid& g, std::uint64_t seed, double amp = 0.3) {
  return {spectral::band_limit(testutil::random_trig(g, 6, seed, amp) + ScalarField(g, 1.0)),
          spectral::band_limit(gradient(testutil::random_trig(g, 6, seed + 100, amp)))};
}

}  // namespace

TEST_CASE("effective flux exact cases") {
  const Grid g(kTwoPi, 32);
  const auto one = ScalarField(g, 1.0);
  CHECK(testutil::max_abs(effective_flux(one, VectorField(g), 1.0).magnitude()) == 0.0);

  const auto v = gradient(spectral::band_limit(testutil::random_trig(g, 4, 3)));
  CHECK(max_abs_diff(effective_flux(one, v, 1.0), v) <= 1e-14);

  const auto p = random_pair(g, 5);
  CHECK(max_abs_diff(effective_flux(p.u, p.v, 0.0), gradient(p.u)) == 0.0);
}

TEST_CASE("divergence identity is algebraic") {
  const Grid g(kTwoPi * 2, 64);
  const auto one = ScalarField(g, 1.0);
  CHECK(flux_divergence_residual(one, VectorField(g), 1.0, assemble_ut(one, VectorField(g), 1.0)) == 0.0);

  for (std::uint64_t seed : {1, 2, 3}) {
    const auto p = random_pair(g, seed);
    for (double chi : {1.0, 0.5}) {
      const auto ut = assemble_ut(p.u, p.v, chi);
      const double r = flux_divergence_residual(p.u, p.v, chi, ut);
      CHECK(r <= 1e-11 * (1.0 + lp_norm(ut, 2.0)));
    }
  }
}

TEST_CASE("divergence identity detects an injected fault") {
  const Grid g(kTwoPi, 64);
  const auto p = random_pair(g, 7);
  const auto ut = assemble_ut(p.u, p.v, 1.0);
  auto flux = effective_flux(p.u, p.v, 1.0);
  // Perturb one Fourier mode of F_x by 1e-3: div changes by 1e-3 * k * sin(kx).
  const double eps = 1e-3;
  flux.x() += ScalarField::from_function(g, [&](double x, double) { return eps * std::cos(3.0 * x); });
  const double expect = eps * 3.0 * std::sqrt(g.area() / 2.0);
  CHECK(flux_divergence_residual(flux, ut) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("curl identity for curl-free v") {
  const Grid g(kTwoPi * 2, 64);
  CHECK(curl_flux_residual(random_pair(g, 1).u, VectorField(g), 1.0) <= 1e-13);
  const auto p = random_pair(g, 2);
  CHECK(curl_flux_residual(ScalarField(g, 1.7), p.v, 1.0) <= 1e-12);
  for (std::uint64_t seed : {4, 5, 6}) {
    const auto q = random_pair(g, seed);
    const double source = lp_norm(curl_flux_source(q.u, q.v, 1.0), 2.0);
    CHECK(source > 0.0);
    CHECK(curl_flux_residual(q.u, q.v, 1.0) <= 1e-10 * (1.0 + source));
  }
}

TEST_CASE("energy functionals") {
  const Grid g(kTwoPi, 32);
  DiagnosticsRecorder rec({}, 6.0);
  rec.record(0.0, ScalarField(g, 1.0), VectorField(g), 0.0, 0.0);
  rec.record(0.5, ScalarField(g, 1.0), VectorField(g), 0.0, 0.0);
  const auto e0 = energy_functionals(rec.records());
  CHECK(e0.A1 == 0.0);
  CHECK(e0.A2 == 0.0);
  CHECK(e0.A3 == 0.0);
  CHECK_THROWS(energy_functionals(std::span<const DiagnosticsRecord>{}));

  const auto p = random_pair(g, 3);
  DiagnosticsRecorder frozen({}, 6.0);
  const auto& row = frozen.record(0.0, p.u, p.v, 0.0, 0.0);
  const double theta0 = std::pow(lp_norm(p.u - ScalarField(g, 1.0), 2.0), 2) + std::pow(lp_norm(p.v, 2.0), 2);
  CHECK(row.A1 == doctest::Approx(theta0).epsilon(1e-12));
}

TEST_CASE("energy integrals are trapezoid sums over the records") {
  // Synthetic rows: ||grad u||^2 = t on [0, 2]. Trapezoid of a linear integrand is exact.
  std::vector<DiagnosticsRecord> rows;
  for (int n = 0; n <= 8; ++n) {
    DiagnosticsRecord r;
    r.t = 0.25 * n;
    r.sigma = std::min(1.0, r.t);
    r.grad_u_l2 = std::sqrt(r.t);
    r.u_l2 = 0.5;
    r.v_l4 = std::pow(2.0, 0.25);
    rows.push_back(r);
  }
  const auto e = energy_functionals(rows);
  CHECK(e.A1 == doctest::Approx(0.25 + 2.0).epsilon(1e-14));
  CHECK(e.A3 == doctest::Approx(2.0 + 2.0 * 2.0).epsilon(1e-14));
}

TEST_CASE("A1, A3 and the blow-up integral are nondecreasing along a run") {
  const Grid g(kTwoPi * 2, 32);
  const auto p = random_pair(g, 9, 0.2);
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  const auto traj = run(SimState::transformed(0.0, p.u, p.v), cfg, {});
  REQUIRE(traj.outcome.status == RunStatus::completed);
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    CHECK(traj.records[i].A1 >= traj.records[i - 1].A1);
    CHECK(traj.records[i].A3 >= traj.records[i - 1].A3);
    CHECK(traj.records[i].blowup_integral >= traj.records[i - 1].blowup_integral);
    CHECK(traj.records[i].sigma == doctest::Approx(std::min(1.0, traj.records[i].t)));
  }
}

TEST_CASE("energy inequality with a calibrated constant") {
  const Grid g(kTwoPi * 2, 32);
  StepperConfig cfg;
  cfg.dt = 0.005;
  cfg.t_end = 1.0;
  const auto p = random_pair(g, 11, 0.2);
  const auto calib = run(SimState::transformed(0.0, p.u, p.v), cfg, {});
  const double C = fit_energy_constant(calib.records);
  CHECK(energy_violations(calib.records, C).empty());
  if (C > 0.0) CHECK_FALSE(energy_violations(calib.records, 0.5 * C).empty());
}

TEST_CASE("gn_ratio") {
  const Grid g(5.0, 64);
  CHECK_THROWS_AS(gn_ratio(ScalarField(g, 2.0)), std::invalid_argument);
  const double L = g.side_length();
  const auto f = ScalarField::from_function(g, [&](double x, double) { return std::sin(kTwoPi * x / L); });
  // ||f||_4^2 = L sqrt(3/8), ||f||_2 = L / sqrt(2), ||grad f||_2 = (2 pi / L) L / sqrt(2).
  CHECK(gn_ratio(f) == doctest::Approx(std::sqrt(3.0 / 8.0) / std::numbers::pi).epsilon(1e-12));
  auto s = testutil::random_trig(g, 5, 3);
  const double r = gn_ratio(s);
  s *= -7.5;
  CHECK(gn_ratio(s) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("gn_ratio stays bounded under dilation on refined grids") {
  const double L = kTwoPi;
  double worst = 0.0;
  for (int lambda : {1, 2, 4}) {
    const Grid g(L, 32 * static_cast<std::size_t>(lambda));
    const auto f = ScalarField::from_function(g, [&](double x, double y) {
      return std::exp(std::sin(lambda * x) + 0.5 * std::cos(lambda * y)) - 1.0;
    });
    worst = std::max(worst, gn_ratio(f));
  }
  CHECK(worst < 1.0);
}

TEST_CASE("lemma 3.3 audit") {
  const Grid g(kTwoPi, 64);
  const auto one = ScalarField(g, 1.0);
  const auto eq = lemma33_ratio(one, VectorField(g), assemble_ut(one, VectorField(g), 1.0), 2.0);
  CHECK_FALSE(eq.ratio.has_value());
  CHECK_FALSE(eq.curl_violated);

  const auto p = random_pair(g, 21);
  const auto ok = lemma33_ratio(p.u, p.v, assemble_ut(p.u, p.v, 1.0), 2.0);
  REQUIRE(ok.ratio.has_value());
  CHECK(std::isfinite(*ok.ratio));
  CHECK_FALSE(ok.curl_violated);

  VectorField bad = p.v;
  bad.x() += ScalarField::from_function(g, [](double, double y) { return 0.5 * std::sin(4.0 * y); });
  const auto flagged = lemma33_ratio(p.u, bad, assemble_ut(p.u, bad, 1.0), 2.0);
  CHECK(flagged.curl_violated);
}

TEST_CASE("lemma 3.3 ratio is stable under refinement") {
  std::vector<double> ratios;
  for (std::size_t n : {64, 128, 256}) {
    const Grid g(kTwoPi, n);
    const auto p = random_pair(g, 33);
    ratios.push_back(*lemma33_ratio(p.u, p.v, assemble_ut(p.u, p.v, 1.0), 2.0).ratio);
  }
  CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(1e-10));
  CHECK(ratios[2] == doctest::Approx(ratios[0]).epsilon(1e-10));
}

TEST_CASE("fit_decay on synthetic series") {
  std::vector<double> t;
  std::vector<double> y;
  for (int n = 0; n <= 100; ++n) {
    t.push_back(1.0 + 0.2 * n);
    y.push_back(2.0 * std::exp(-0.9 * t.back()));
  }
  const auto fit = fit_decay(t, y, 1.0, 21.0, "synthetic");
  CHECK(fit.rate == doctest::Approx(0.9).epsilon(1e-10));
  CHECK(fit.prefactor == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.residual <= 1e-10);
  CHECK(fit.samples == 101);

  std::vector<double> flat(t.size(), 3.0);
  CHECK(std::abs(fit_decay(t, flat, 1.0, 21.0).rate) <= 1e-14);

  CHECK_THROWS_AS(fit_decay(t, y, 0.5, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay(t, y, 1.0, 2.0), std::invalid_argument);
  y[10] = 0.0;
  CHECK_THROWS_AS(fit_decay(t, y, 1.0, 21.0), std::invalid_argument);
}

TEST_CASE("diagnostics CSV round trip and schema") {
  const Grid g(kTwoPi, 32);
  const auto p = random_pair(g, 41);
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.1;
  const auto traj = run(SimState::transformed(0.0, p.u, p.v), cfg, {});
  std::stringstream ss;
  write_diagnostics_csv(ss, traj.records);
  std::string first;
  std::getline(ss, first);
  CHECK(first == kDiagnosticsSchema);
  std::string header;
  std::getline(ss, header);
  CHECK(header.rfind("t,sigma,u_l2,grad_u_l2,u_linf,v_l2,v_l4,v_lp0,v_linf,c_linf,flux_l2,", 0) == 0);
  ss.seekg(0);
  const auto back = read_diagnostics_csv(ss);
  REQUIRE(back.size() == traj.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(record_values(back[i]) == record_values(traj.records[i]));
  CHECK(record_value(back[0], "A1") == back[0].A1);
  CHECK_THROWS_AS(record_value(back[0], "nope"), std::invalid_argument);
}
