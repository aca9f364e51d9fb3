#include <doctest.h>

#include <cmath>

#include "chemoflux/field.hpp"
#include "chemoflux/snapshot.hpp"
#include "chemoflux/spectral.hpp"
#include "helpers.hpp"

using namespace chemoflux;
using testutil::kTwoPi;
using testutil::max_abs_diff;

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid(1.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0.0, 16), std::invalid_argument);
  const Grid g(kTwoPi, 16);
  CHECK(g.cell_area() == doctest::Approx(std::pow(kTwoPi / 16, 2)));
  const auto k = g.wavenumbers();
  REQUIRE(k.size() == 16);
  CHECK(k[0] == 0.0);
  for (std::size_t i = 1; i < 8; ++i) CHECK(k[i] == doctest::Approx(-k[16 - i]));
  CHECK(k[8] == doctest::Approx(-8.0));
  CHECK(g.derivative_wavenumbers()[8] == 0.0);
}

TEST_CASE("gradient of a constant vanishes") {
  const Grid g(3.0, 32);
  const auto w = gradient(ScalarField(g, 7.0));
  CHECK(testutil::max_abs(w.x()) == 0.0);
  CHECK(testutil::max_abs(w.y()) == 0.0);
}

TEST_CASE("gradient of a resolved mode") {
  const double L = 5.0;
  const Grid g(L, 64);
  const auto f = ScalarField::from_function(g, [&](double x, double) { return std::sin(kTwoPi * x / L); });
  const auto w = gradient(f);
  const auto dx = ScalarField::from_function(g, [&](double x, double) {
    return kTwoPi / L * std::cos(kTwoPi * x / L);
  });
  CHECK(max_abs_diff(w.x(), dx) <= 1e-12);
  CHECK(testutil::max_abs(w.y()) <= 1e-12);
  CHECK(std::abs(w.x().mean()) <= 1e-15);
}

TEST_CASE("spectral derivatives agree with centred differences at second order") {
  // Random band-limited field on a fixed period; the FD error must fall by about 4 per halving of h.
  double prev = 0.0;
  for (std::size_t n : {32, 64, 128}) {
    const Grid g(kTwoPi, n);
    const auto f = testutil::random_trig(g, 4, 11);
    const auto w = gradient(f);
    const double err = std::max(max_abs_diff(w.x(), testutil::central_difference(f, true)),
                                max_abs_diff(w.y(), testutil::central_difference(f, false)));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("divergence identities") {
  const double L = 4.0;
  const Grid g(L, 64);
  const auto f = ScalarField::from_function(g, [&](double x, double y) {
    return std::sin(kTwoPi * x / L) * std::sin(kTwoPi * y / L);
  });
  CHECK(max_abs_diff(divergence(gradient(f)), laplacian(f)) <= 1e-12);
  const VectorField c{ScalarField(g, 2.0), ScalarField(g, -1.0)};
  CHECK(testutil::max_abs(divergence(c)) == 0.0);

  const auto r = testutil::random_trig(g, 6, 3);
  CHECK(std::abs(divergence(VectorField{r, r}).mean()) <= 1e-15);
}

TEST_CASE("divergence matches centred differences at second order") {
  double prev = 0.0;
  for (std::size_t n : {32, 64, 128}) {
    const Grid g(kTwoPi, n);
    const VectorField w{testutil::random_trig(g, 4, 21), testutil::random_trig(g, 4, 22)};
    const auto fd = testutil::central_difference(w.x(), true) + testutil::central_difference(w.y(), false);
    const double err = max_abs_diff(divergence(w), fd);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("curl2d sign convention and curl of gradients") {
  const double L = 3.0;
  const Grid g(L, 64);
  const auto s = [&](double t) { return std::sin(kTwoPi * t / L); };
  const auto c = [&](double t) { return kTwoPi / L * std::cos(kTwoPi * t / L); };
  const VectorField w1{ScalarField::from_function(g, [&](double, double y) { return s(y); }), ScalarField(g)};
  CHECK(max_abs_diff(curl2d(w1), ScalarField::from_function(g, [&](double, double y) { return c(y); })) <=
        1e-12);
  const VectorField w2{ScalarField(g), ScalarField::from_function(g, [&](double x, double) { return s(x); })};
  CHECK(max_abs_diff(curl2d(w2), ScalarField::from_function(g, [&](double x, double) { return -c(x); })) <=
        1e-12);
  const auto f = testutil::random_trig(g, 10, 5);
  CHECK(testutil::max_abs(curl2d(gradient(f))) <= 1e-12);
}

TEST_CASE("curl2d rejects mismatched components") {
  const VectorField w{ScalarField(Grid(1.0, 16)), ScalarField(Grid(1.0, 16))};
  CHECK_NOTHROW(curl2d(w));
  CHECK_THROWS_AS(VectorField(ScalarField(Grid(1.0, 16)), ScalarField(Grid(2.0, 16))), std::invalid_argument);
}

TEST_CASE("laplacian eigenfunction") {
  const double L = 2.5;
  const Grid g(L, 32);
  CHECK(testutil::max_abs(laplacian(ScalarField(g, 4.0))) == 0.0);
  const auto f = ScalarField::from_function(g, [&](double x, double) { return std::sin(kTwoPi * x / L); });
  auto expect = f;
  expect *= -std::pow(kTwoPi / L, 2);
  CHECK(max_abs_diff(laplacian(f), expect) <= 1e-12);
}

TEST_CASE("helmholtz_solve") {
  const double L = kTwoPi;
  const Grid g(L, 64);
  CHECK_THROWS_AS(helmholtz_solve(ScalarField(g, 1.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(helmholtz_solve(ScalarField(g, 1.0), -1.0), std::invalid_argument);
  CHECK(max_abs_diff(helmholtz_solve(ScalarField(g, 3.0), 0.7), ScalarField(g, 3.0)) <= 1e-15);

  const auto f = ScalarField::from_function(g, [&](double x, double) { return std::sin(kTwoPi * x / L); });
  auto expect = f;
  expect *= 1.0 / (1.0 + std::pow(kTwoPi / L, 2));
  CHECK(max_abs_diff(helmholtz_solve(f, 1.0), expect) <= 1e-15);

  const auto r = testutil::random_trig(g, 12, 9);
  const double a = 0.3;
  auto applied = r;
  applied.add_scaled(laplacian(r), -a);
  const auto back = helmholtz_solve(applied, a);
  CHECK(max_abs_diff(back, r) <= 1e-12 * testutil::max_abs(r));
  CHECK(std::abs(helmholtz_solve(r + ScalarField(g, 2.0), a).mean() - (r.mean() + 2.0)) <= 1e-14);
}

TEST_CASE("lp_norm quadrature") {
  const double L = 3.0;
  const Grid g(L, 16);
  for (double p : {1.0, 2.0, 3.5, 4.0, 6.0}) {
    CHECK(lp_norm(ScalarField(g, -2.0), p) == doctest::Approx(2.0 * std::pow(L, 2.0 / p)).epsilon(1e-14));
  }
  ScalarField spike(g);
  spike(3, 7) = 5.0;
  CHECK(lp_norm(spike, kInfinity) == 5.0);
  CHECK_THROWS_AS(lp_norm(spike, 0.5), std::invalid_argument);

  const auto r = testutil::random_trig(g, 5, 1);
  for (double p : {1.0, 2.0, 4.0, 6.0, kInfinity}) {
    auto s = r;
    s *= -3.0;
    CHECK(lp_norm(s, p) == doctest::Approx(3.0 * lp_norm(r, p)).epsilon(1e-14));
  }

  const VectorField w{ScalarField(g, 3.0), ScalarField(g, 4.0)};
  CHECK(lp_norm(w, 2.0) == doctest::Approx(5.0 * L));
  CHECK(lp_norm(w, kInfinity) == doctest::Approx(5.0));
}

TEST_CASE("lp_norm rejects non-finite samples") {
  ScalarField f(Grid(1.0, 8));
  f[3] = std::nan("");
  CHECK_THROWS(lp_norm(f, 2.0));
  CHECK_THROWS(gradient(f));
}

TEST_CASE("spectral convergence faster than any polynomial order") {
  const double L = kTwoPi;
  // exp(sin x) is resolved to rounding already at N = 32; the steeper exp(4 sin x) shows the rate.
  for (double s : {1.0, 4.0}) {
    auto err = [&](std::size_t n) {
      const Grid g(L, n);
      const auto f = ScalarField::from_function(g, [&](double x, double) { return std::exp(s * std::sin(x)); });
      const auto exact = ScalarField::from_function(g, [&](double x, double) {
        return s * std::cos(x) * std::exp(s * std::sin(x));
      });
      return max_abs_diff(gradient(f).x(), exact) / testutil::max_abs(exact);
    };
    const double e32 = err(32);
    const double e64 = err(64);
    MESSAGE("relative derivative error, scale " << s << ": N=32 " << e32 << ", N=64 " << e64);
    CHECK(e64 <= std::max(1e-3 * e32, 1e-14));
  }
}

TEST_CASE("dealiased product removes modes above the cutoff") {
  const Grid g(kTwoPi, 32);
  const auto a = ScalarField::from_function(g, [](double x, double) { return std::cos(8.0 * x); });
  // cos^2(8x) = (1 + cos 16x) / 2; mode 16 is above the cutoff 10.
  const auto p = spectral::dealiased_product(a, a);
  CHECK(max_abs_diff(p, ScalarField(g, 0.5)) <= 1e-14);
}

TEST_CASE("CFX1 snapshot round trip") {
  const Grid g(2.0, 16);
  const auto a = testutil::random_trig(g, 3, 2);
  const auto b = testutil::random_trig(g, 3, 4);
  const auto path = std::filesystem::temp_directory_path() / "chemoflux_test_snapshot.cfx";
  const std::vector<ScalarField> fields{a, b};
  write_snapshot(path, fields);
  CHECK(std::filesystem::file_size(path) == 16 + 2 * 16 * 16 * 8);
  const auto back = read_snapshot(path, 2.0);
  REQUIRE(back.size() == 2);
  CHECK(max_abs_diff(back[0], a) == 0.0);
  CHECK(max_abs_diff(back[1], b) == 0.0);
  std::filesystem::remove(path);
}
