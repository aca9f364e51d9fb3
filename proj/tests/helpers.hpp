#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "chemoflux/field.hpp"
#include "chemoflux/spectral.hpp"

namespace testutil {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double max_abs_diff(const chemoflux::ScalarField& a, const chemoflux::ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const chemoflux::VectorField& a, const chemoflux::VectorField& b) {
  return std::max(max_abs_diff(a.x(), b.x()), max_abs_diff(a.y(), b.y()));
}

inline double max_abs(const chemoflux::ScalarField& a) { return chemoflux::lp_norm(a, chemoflux::kInfinity); }

/// Random trigonometric polynomial with integer modes |k| <= kmax, resolved on any N > 2 kmax.
inline chemoflux::ScalarField random_trig(const chemoflux::Grid& g, int kmax, std::uint64_t seed,
                                          double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  struct Mode {
    int kx, ky;
    double a, p;
  };
  std::vector<Mode> modes;
  for (int kx = -kmax; kx <= kmax; ++kx) {
    for (int ky = 0; ky <= kmax; ++ky) {
      if (ky == 0 && kx <= 0) continue;
      modes.push_back({kx, ky, amp(rng) / (1.0 + kx * kx + ky * ky), ph(rng)});
    }
  }
  const double L = g.side_length();
  return chemoflux::ScalarField::from_function(g, [&](double x, double y) {
    double s = 0.0;
    for (const auto& m : modes) s += m.a * std::sin(kTwoPi * (m.kx * x + m.ky * y) / L + m.p);
    return scale * s;
  });
}

/// Independent second-order centred difference along one axis, used as an oracle.
inline chemoflux::ScalarField central_difference(const chemoflux::ScalarField& f, bool along_x) {
  const auto& g = f.grid();
  const std::size_t n = g.resolution();
  const double h = g.spacing();
  chemoflux::ScalarField out(g);
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      if (along_x) {
        out(iy, ix) = (f(iy, (ix + 1) % n) - f(iy, (ix + n - 1) % n)) / (2 * h);
      } else {
        out(iy, ix) = (f((iy + 1) % n, ix) - f((iy + n - 1) % n, ix)) / (2 * h);
      }
    }
  }
  return out;
}

}  // namespace testutil
