#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "chemoflux/field.hpp"

namespace chemoflux {

/// chi = mu * xi with mu > 0. xi = chi = 0 decouples the density from the chemical.
/// The default is the normalized system chi = mu = xi = 1.
class ChemistryParams {
 public:
  ChemistryParams() = default;
  /// Validates chi against mu * xi (relative tolerance 1e-14).
  ChemistryParams(double chi, double mu, double xi);
  static ChemistryParams from_mu_xi(double mu, double xi) { return {mu * xi, mu, xi}; }

  double chi() const { return chi_; }
  double mu() const { return mu_; }
  double xi() const { return xi_; }

 private:
  double chi_ = 1.0;
  double mu_ = 1.0;
  double xi_ = 1.0;
};

/// Samples at or below this level count as chemical extinction.
inline constexpr double kChemicalFloor = 1e-300;

class ChemicalFloorError : public std::domain_error {
 public:
  ChemicalFloorError(std::size_t index, double value);
  std::size_t index() const { return index_; }
  double value() const { return value_; }

 private:
  std::size_t index_;
  double value_;
};

/// v = -(1/mu) grad ln c. Throws ChemicalFloorError if any c <= kChemicalFloor.
VectorField forward_transform(const ScalarField& c, const ChemistryParams& params);

/// Exact exponential update c * exp(-mu * u * dt) for frozen u.
ScalarField c_step(const ScalarField& c, const ScalarField& u, double mu, double dt);
/// Same with the midpoint-in-time value (u_left + u_right) / 2.
ScalarField c_step(const ScalarField& c, const ScalarField& u_left, const ScalarField& u_right,
                   double mu, double dt);

/// c(T) = c0 * exp(-mu * int_0^T u), trapezoid over the stored history.
ScalarField reconstruct_c(std::span<const ScalarField> u_history, std::span<const double> times,
                          const ScalarField& c0, double mu);

}  // namespace chemoflux
