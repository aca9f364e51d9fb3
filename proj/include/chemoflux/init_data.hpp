#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemoflux/field.hpp"

namespace chemoflux {

enum class RecipeKind { piecewise_constant_disks, piecewise_constant_stripes, smooth_bump, from_potential };

/// Disk of weight `weight` centred at (cx, cy), measured from the domain centre.
struct Disk {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 1.0;
  double weight = 1.0;
};

/// Vertical band x in [x0 * L, x1 * L) of weight `weight`.
struct Stripe {
  double x0 = 0.25;
  double x1 = 0.75;
  double weight = 1.0;
};

/// phi += amplitude * sin(2 pi (kx x + ky y) / L + phase)
struct PotentialMode {
  int kx = 1;
  int ky = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Gaussian potential bump, phi += amplitude * exp(-|x - c|^2 / (2 width^2)).
struct PotentialBump {
  double cx = 0.0;
  double cy = 0.0;
  double width = 1.0;
  double amplitude = 0.0;
};

struct InitialDataRecipe {
  RecipeKind kind = RecipeKind::smooth_bump;
  /// Scales the u-perturbation, or the potential for from_potential.
  double amplitude = 0.0;
  std::vector<Disk> disks;
  std::vector<Stripe> stripes;
  /// Extra disks placed deterministically from `seed`, weights alternating +1/-1.
  int random_disks = 0;
  double random_disk_radius = 1.0;
  double bump_cx = 0.0;
  double bump_cy = 0.0;
  double bump_width = 1.0;
  /// v0 = grad(phi). Unscaled except for the from_potential kind.
  std::vector<PotentialMode> potential_modes;
  std::vector<PotentialBump> potential_bumps;
  double p0 = 6.0;
  /// Mollifier width; 0 disables mollification.
  double delta = 0.0;
  std::uint64_t seed = 0;
  /// Chemical level: c0 = c0_level * exp(-mu * phi) so that v0 = -(1/mu) grad ln c0.
  double c0_level = 1.0;
};

struct DataSummary {
  double theta0 = 0.0;
  double M = 0.0;
  double linf_amplitude = 0.0;
  double delta = 0.0;
  double eta0 = 0.0;
};

struct InitialData {
  ScalarField u0;
  VectorField v0;
  /// Potential with v0 = grad(phi), mollified alongside v0.
  ScalarField potential;
  DataSummary summary;
};

/// Thrown when a recipe would produce u0 < 0.
class NegativeDensityError : public std::invalid_argument {
 public:
  explicit NegativeDensityError(double minimum);
  double minimum() const { return minimum_; }

 private:
  double minimum_;
};

InitialData build_initial_data(const InitialDataRecipe& recipe, const Grid& grid);

/// Chemical field consistent with the data: c0 = level * exp(-mu * phi).
ScalarField initial_chemical(const InitialData& data, double c0_level, double mu);

/// Periodic convolution with the normalized bump (1 - (r/delta)^2)^3 on r < delta.
ScalarField mollify(const ScalarField& f, double delta);

/// Gradient part of the Helmholtz decomposition; the mean of w is kept.
VectorField project_curl_free(const VectorField& w);

/// (p0 - 4) / (2 (p0 - 2)); requires p0 > 4.
double compute_eta0(double p0);

/// ||u0 - 1||_2^2 + ||v0||_2^2
double theta0_of(const ScalarField& u0, const VectorField& v0);

}  // namespace chemoflux
