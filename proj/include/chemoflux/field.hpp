#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace chemoflux {

namespace detail {
class FftPlan;
}

/// Periodic square torus [0, L)^2 sampled at N x N points x_j = j * L / N.
///
/// Samples are stored row-major with y as the slow index: sample (iy, ix)
/// lives at x = ix * h, y = iy * h. Copies share the FFT plans.
class Grid {
 public:
  Grid(double side_length, std::size_t resolution);

  double side_length() const { return side_length_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t size() const { return resolution_ * resolution_; }
  double spacing() const { return side_length_ / static_cast<double>(resolution_); }
  double cell_area() const { return spacing() * spacing(); }
  double area() const { return side_length_ * side_length_; }
  double coordinate(std::size_t index) const { return static_cast<double>(index) * spacing(); }

  /// 2*pi*k/L for k = 0..N/2-1, -N/2..-1 (Nyquist entry carries -N/2).
  std::span<const double> wavenumbers() const { return *wavenumbers_; }
  /// Wavenumbers used by odd-order derivatives; identical except the Nyquist entry is zero.
  std::span<const double> derivative_wavenumbers() const { return *derivative_wavenumbers_; }

  /// Largest retained integer mode index under the 2/3 rule (3K < N).
  std::size_t dealias_cutoff() const { return (resolution_ - 1) / 3; }

  const detail::FftPlan& fft() const { return *fft_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.side_length_ == b.side_length_ && a.resolution_ == b.resolution_;
  }

 private:
  double side_length_;
  std::size_t resolution_;
  std::shared_ptr<const std::vector<double>> wavenumbers_;
  std::shared_ptr<const std::vector<double>> derivative_wavenumbers_;
  std::shared_ptr<const detail::FftPlan> fft_;
};

class ScalarField {
 public:
  explicit ScalarField(Grid grid, double value = 0.0);
  ScalarField(Grid grid, std::vector<double> samples);

  /// Samples f(x, y) at every grid point.
  static ScalarField from_function(const Grid& grid, const std::function<double(double, double)>& f);

  const Grid& grid() const { return grid_; }
  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  std::size_t size() const { return samples_.size(); }

  double& operator()(std::size_t iy, std::size_t ix) { return samples_[iy * grid_.resolution() + ix]; }
  double operator()(std::size_t iy, std::size_t ix) const {
    return samples_[iy * grid_.resolution() + ix];
  }
  double& operator[](std::size_t i) { return samples_[i]; }
  double operator[](std::size_t i) const { return samples_[i]; }

  double mean() const;
  double min() const;
  double max() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator+=(double shift);
  ScalarField& operator*=(double scale);

  /// this += scale * other
  ScalarField& add_scaled(const ScalarField& other, double scale);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }

 private:
  Grid grid_;
  std::vector<double> samples_;
};

class VectorField {
 public:
  explicit VectorField(const Grid& grid);
  VectorField(ScalarField x, ScalarField y);

  const Grid& grid() const { return x_.grid(); }
  const ScalarField& x() const { return x_; }
  const ScalarField& y() const { return y_; }
  ScalarField& x() { return x_; }
  ScalarField& y() { return y_; }

  bool all_finite() const { return x_.all_finite() && y_.all_finite(); }
  /// Pointwise Euclidean magnitude.
  ScalarField magnitude() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double scale);
  VectorField& add_scaled(const VectorField& other, double scale);

  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }

 private:
  ScalarField x_;
  ScalarField y_;
};

/// Throws std::invalid_argument unless both fields live on the same grid.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace chemoflux
