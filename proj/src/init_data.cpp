#include "chemoflux/init_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chemoflux/spectral.hpp"

namespace chemoflux {

namespace {

/// Shortest signed periodic offset from a to b on a circle of length L.
double periodic_offset(double a, double b, double L) {
  double d = std::fmod(b - a, L);
  if (d > 0.5 * L) d -= L;
  if (d < -0.5 * L) d += L;
  return d;
}

ScalarField density_perturbation(const InitialDataRecipe& recipe, const Grid& grid) {
  const double L = grid.side_length();
  const double centre = 0.5 * L;
  ScalarField shape(grid);

  switch (recipe.kind) {
    case RecipeKind::piecewise_constant_disks: {
      std::vector<Disk> disks = recipe.disks;
      if (recipe.random_disks > 0) {
        std::mt19937_64 rng(recipe.seed);
        std::uniform_real_distribution<double> offset(-0.25 * L, 0.25 * L);
        for (int i = 0; i < recipe.random_disks; ++i) {
          const double cx = offset(rng);
          const double cy = offset(rng);
          disks.push_back({cx, cy, recipe.random_disk_radius, i % 2 == 0 ? 1.0 : -1.0});
        }
      }
      // Cell-centre sampling: no anti-aliasing of the jump.
      shape = ScalarField::from_function(grid, [&](double x, double y) {
        double s = 0.0;
        for (const auto& d : disks) {
          const double dx = periodic_offset(centre + d.cx, x, L);
          const double dy = periodic_offset(centre + d.cy, y, L);
          if (dx * dx + dy * dy < d.radius * d.radius) s += d.weight;
        }
        return s;
      });
      break;
    }
    case RecipeKind::piecewise_constant_stripes:
      shape = ScalarField::from_function(grid, [&](double x, double) {
        double s = 0.0;
        for (const auto& st : recipe.stripes) {
          if (x >= st.x0 * L && x < st.x1 * L) s += st.weight;
        }
        return s;
      });
      break;
    case RecipeKind::smooth_bump: {
      const double w2 = 2.0 * recipe.bump_width * recipe.bump_width;
      shape = ScalarField::from_function(grid, [&](double x, double y) {
        const double dx = periodic_offset(centre + recipe.bump_cx, x, L);
        const double dy = periodic_offset(centre + recipe.bump_cy, y, L);
        return std::exp(-(dx * dx + dy * dy) / w2);
      });
      break;
    }
    case RecipeKind::from_potential:
      return shape;
  }
  shape *= recipe.amplitude;
  return shape;
}

ScalarField potential_of(const InitialDataRecipe& recipe, const Grid& grid) {
  const double L = grid.side_length();
  const double centre = 0.5 * L;
  const double base = 2.0 * std::numbers::pi / L;
  ScalarField phi = ScalarField::from_function(grid, [&](double x, double y) {
    double s = 0.0;
    for (const auto& m : recipe.potential_modes) {
      s += m.amplitude * std::sin(base * (m.kx * x + m.ky * y) + m.phase);
    }
    for (const auto& b : recipe.potential_bumps) {
      const double dx = periodic_offset(centre + b.cx, x, L);
      const double dy = periodic_offset(centre + b.cy, y, L);
      s += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
    }
    return s;
  });
  if (recipe.kind == RecipeKind::from_potential) phi *= recipe.amplitude;
  return phi;
}

}  // namespace

NegativeDensityError::NegativeDensityError(double minimum)
    : std::invalid_argument("initial density u0 is negative (minimum " + std::to_string(minimum) + ")"),
      minimum_(minimum) {}

double compute_eta0(double p0) {
  if (!(p0 > 4.0) || !std::isfinite(p0)) {
    throw std::invalid_argument("compute_eta0: p0 must be finite and > 4");
  }
  return (p0 - 4.0) / (2.0 * (p0 - 2.0));
}

double theta0_of(const ScalarField& u0, const VectorField& v0) {
  ScalarField perturbation = u0;
  perturbation += -1.0;
  const double a = lp_norm(perturbation, 2.0);
  const double b = lp_norm(v0, 2.0);
  return a * a + b * b;
}

ScalarField mollify(const ScalarField& f, double delta) {
  const Grid& grid = f.grid();
  if (!(delta > 0.0)) throw std::invalid_argument("mollify: delta must be positive");
  if (delta > 0.25 * grid.side_length()) {
    throw std::invalid_argument("mollify: delta exceeds L/4, kernel would wrap");
  }
  const double L = grid.side_length();
  ScalarField kernel = ScalarField::from_function(grid, [&](double x, double y) {
    const double dx = periodic_offset(0.0, x, L);
    const double dy = periodic_offset(0.0, y, L);
    const double q = (dx * dx + dy * dy) / (delta * delta);
    if (q >= 1.0) return 0.0;
    const double w = 1.0 - q;
    return w * w * w;
  });
  double mass = 0.0;
  for (double k : kernel.samples()) mass += k;
  kernel *= 1.0 / mass;

  const Spectrum kh = spectral::forward(kernel);
  Spectrum fh = spectral::forward(f);
  // Unit mass means the DC coefficient is unchanged; pin it so the mean is preserved exactly.
  const Complex dc = fh(0, 0);
  auto fc = fh.coefficients();
  auto kc = kh.coefficients();
  for (std::size_t i = 0; i < fc.size(); ++i) fc[i] *= kc[i];
  fh(0, 0) = dc;
  return spectral::inverse(fh);
}

VectorField project_curl_free(const VectorField& w) {
  const Spectrum wx = spectral::forward(w.x());
  const Spectrum wy = spectral::forward(w.y());
  Spectrum px(w.grid());
  Spectrum py(w.grid());
  const auto kd = w.grid().derivative_wavenumbers();
  for (std::size_t r = 0; r < wx.rows(); ++r) {
    for (std::size_t c = 0; c < wx.cols(); ++c) {
      const double kx = kd[c];
      const double ky = kd[r];
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const Complex along = (kx * wx(r, c) + ky * wy(r, c)) / k2;
      px(r, c) = kx * along;
      py(r, c) = ky * along;
    }
  }
  px(0, 0) = wx(0, 0);
  py(0, 0) = wy(0, 0);
  return {spectral::inverse(px), spectral::inverse(py)};
}

InitialData build_initial_data(const InitialDataRecipe& recipe, const Grid& grid) {
  const double eta0 = compute_eta0(recipe.p0);
  if (recipe.delta < 0.0) throw std::invalid_argument("build_initial_data: delta must be >= 0");

  ScalarField u0 = density_perturbation(recipe, grid);
  u0 += 1.0;
  ScalarField phi = potential_of(recipe, grid);

  const double u_min = u0.min();
  if (u_min < 0.0) throw NegativeDensityError(u_min);
  if (recipe.delta > 0.0) {
    u0 = mollify(u0, recipe.delta);
    phi = mollify(phi, recipe.delta);
    // A convex average of nonnegative data; only FFT rounding can dip below zero.
    for (double& s : u0.samples()) s = std::max(s, 0.0);
  }

  VectorField v0 = gradient(phi);

  DataSummary summary;
  summary.theta0 = theta0_of(u0, v0);
  summary.M = lp_norm(v0, recipe.p0);
  ScalarField perturbation = u0;
  perturbation += -1.0;
  summary.linf_amplitude = lp_norm(perturbation, kInfinity) + lp_norm(v0, kInfinity);
  summary.delta = recipe.delta;
  summary.eta0 = eta0;
  return {std::move(u0), std::move(v0), std::move(phi), summary};
}

ScalarField initial_chemical(const InitialData& data, double c0_level, double mu) {
  if (!(c0_level > 0.0)) throw std::invalid_argument("initial_chemical: level must be positive");
  ScalarField c = data.potential;
  for (double& s : c.samples()) s = c0_level * std::exp(-mu * s);
  return c;
}

}  // namespace chemoflux
