#include "chemoflux/cole_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "chemoflux/spectral.hpp"

namespace chemoflux {

namespace {

std::string floor_message(std::size_t index, double value) {
  std::ostringstream os;
  os << "chemical concentration at sample " << index << " is " << value
     << ", at or below the floor " << kChemicalFloor;
  return os.str();
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

ChemistryParams::ChemistryParams(double chi, double mu, double xi) : chi_(chi), mu_(mu), xi_(xi) {
  require_positive(mu, "mu");
  if (!(chi >= 0.0) || !(xi >= 0.0) || !std::isfinite(chi) || !std::isfinite(xi)) {
    throw std::invalid_argument("ChemistryParams: chi and xi must be nonnegative and finite");
  }
  if (std::abs(chi - mu * xi) > 1e-14 * std::max(chi, mu * xi)) {
    throw std::invalid_argument("ChemistryParams: chi must equal mu * xi");
  }
}

ChemicalFloorError::ChemicalFloorError(std::size_t index, double value)
    : std::domain_error(floor_message(index, value)), index_(index), value_(value) {}

VectorField forward_transform(const ScalarField& c, const ChemistryParams& params) {
  ScalarField log_c(c.grid());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > kChemicalFloor)) throw ChemicalFloorError(i, c[i]);
    log_c[i] = std::log(c[i]);
  }
  VectorField v = gradient(log_c);
  v *= -1.0 / params.mu();
  return v;
}

ScalarField c_step(const ScalarField& c, const ScalarField& u, double mu, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("c_step: dt must be positive");
  require_same_grid(c.grid(), u.grid(), "c_step");
  ScalarField out(c.grid());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] * std::exp(-mu * u[i] * dt);
  return out;
}

ScalarField c_step(const ScalarField& c, const ScalarField& u_left, const ScalarField& u_right,
                   double mu, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("c_step: dt must be positive");
  require_same_grid(u_left.grid(), u_right.grid(), "c_step");
  require_same_grid(c.grid(), u_left.grid(), "c_step");
  ScalarField out(c.grid());
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = c[i] * std::exp(-mu * 0.5 * (u_left[i] + u_right[i]) * dt);
  }
  return out;
}

ScalarField reconstruct_c(std::span<const ScalarField> u_history, std::span<const double> times,
                          const ScalarField& c0, double mu) {
  if (u_history.empty()) throw std::invalid_argument("reconstruct_c: empty history");
  if (u_history.size() != times.size()) {
    throw std::invalid_argument("reconstruct_c: history and time lists differ in length");
  }
  ScalarField exponent(c0.grid());
  for (std::size_t n = 0; n + 1 < u_history.size(); ++n) {
    const double dt = times[n + 1] - times[n];
    if (dt < 0.0) throw std::invalid_argument("reconstruct_c: times must be nondecreasing");
    exponent.add_scaled(u_history[n], 0.5 * dt);
    exponent.add_scaled(u_history[n + 1], 0.5 * dt);
  }
  ScalarField c(c0.grid());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c0[i] > 0.0)) throw std::invalid_argument("reconstruct_c: c0 must be positive");
    c[i] = c0[i] * std::exp(-mu * exponent[i]);
  }
  return c;
}

}  // namespace chemoflux
