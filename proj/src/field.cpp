#include "chemoflux/field.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft_plan.hpp"

namespace chemoflux {

namespace detail {

namespace {
// FFTW's planner is not reentrant; execution through the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  const int dim = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  double* real = fftw_alloc_real(n * n);
  fftw_complex* spec = fftw_alloc_complex(n * (n / 2 + 1));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  r2c_ = fftw_plan_dft_r2c_2d(dim, dim, real, spec, flags);
  c2r_ = fftw_plan_dft_c2r_2d(dim, dim, spec, real, flags);
  fftw_free(real);
  fftw_free(spec);
  if (r2c_ == nullptr || c2r_ == nullptr) {
    throw std::runtime_error("FFTW failed to create plans for N=" + std::to_string(n));
  }
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(r2c_);
  fftw_destroy_plan(c2r_);
}

void FftPlan::forward(const double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(r2c_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void FftPlan::inverse(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace detail

Grid::Grid(double side_length, std::size_t resolution)
    : side_length_(side_length), resolution_(resolution) {
  if (!(side_length > 0.0) || !std::isfinite(side_length)) {
    throw std::invalid_argument("Grid: side length must be positive and finite");
  }
  if (resolution < 8 || resolution % 2 != 0) {
    throw std::invalid_argument("Grid: resolution must be even and >= 8, got " +
                                std::to_string(resolution));
  }
  const auto n = static_cast<long>(resolution);
  const double base = 2.0 * std::numbers::pi / side_length;
  std::vector<double> k(resolution);
  std::vector<double> kd(resolution);
  for (long j = 0; j < n; ++j) {
    const long index = j < n / 2 ? j : j - n;
    k[j] = base * static_cast<double>(index);
    kd[j] = j == n / 2 ? 0.0 : k[j];
  }
  wavenumbers_ = std::make_shared<const std::vector<double>>(std::move(k));
  derivative_wavenumbers_ = std::make_shared<const std::vector<double>>(std::move(kd));
  fft_ = std::make_shared<const detail::FftPlan>(resolution);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": fields live on different grids");
  }
}

ScalarField::ScalarField(Grid grid, double value) : grid_(std::move(grid)), samples_(grid_.size(), value) {}

ScalarField::ScalarField(Grid grid, std::vector<double> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size()) {
    throw std::invalid_argument("ScalarField: expected " + std::to_string(grid_.size()) +
                                " samples, got " + std::to_string(samples_.size()));
  }
}

ScalarField ScalarField::from_function(const Grid& grid,
                                       const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  const std::size_t n = grid.resolution();
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      out(iy, ix) = f(grid.coordinate(ix), grid.coordinate(iy));
    }
  }
  return out;
}

double ScalarField::mean() const {
  double sum = 0.0;
  for (double s : samples_) sum += s;
  return sum / static_cast<double>(samples_.size());
}

double ScalarField::min() const { return *std::min_element(samples_.begin(), samples_.end()); }
double ScalarField::max() const { return *std::max_element(samples_.begin(), samples_.end()); }

bool ScalarField::all_finite() const {
  return std::all_of(samples_.begin(), samples_.end(), [](double s) { return std::isfinite(s); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) { return add_scaled(other, 1.0); }
ScalarField& ScalarField::operator-=(const ScalarField& other) { return add_scaled(other, -1.0); }

ScalarField& ScalarField::operator+=(double shift) {
  for (double& s : samples_) s += shift;
  return *this;
}

ScalarField& ScalarField::operator*=(double scale) {
  for (double& s : samples_) s *= scale;
  return *this;
}

ScalarField& ScalarField::add_scaled(const ScalarField& other, double scale) {
  require_same_grid(grid_, other.grid_, "ScalarField arithmetic");
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += scale * other.samples_[i];
  return *this;
}

VectorField::VectorField(const Grid& grid) : x_(grid), y_(grid) {}

VectorField::VectorField(ScalarField x, ScalarField y) : x_(std::move(x)), y_(std::move(y)) {
  require_same_grid(x_.grid(), y_.grid(), "VectorField");
}

ScalarField VectorField::magnitude() const {
  ScalarField out(grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::hypot(x_[i], y_[i]);
  return out;
}

VectorField& VectorField::operator+=(const VectorField& other) { return add_scaled(other, 1.0); }
VectorField& VectorField::operator-=(const VectorField& other) { return add_scaled(other, -1.0); }

VectorField& VectorField::operator*=(double scale) {
  x_ *= scale;
  y_ *= scale;
  return *this;
}

VectorField& VectorField::add_scaled(const VectorField& other, double scale) {
  x_.add_scaled(other.x_, scale);
  y_.add_scaled(other.y_, scale);
  return *this;
}

}  // namespace chemoflux
