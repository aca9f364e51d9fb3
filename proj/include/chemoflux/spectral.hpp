#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "chemoflux/field.hpp"

namespace chemoflux {

using Complex = std::complex<double>;

/// Half-plane Fourier coefficients of a real field (N rows in ky, N/2+1 columns in kx).
///
/// Unnormalized forward convention: coefficient(0, 0) = sum of samples.
class Spectrum {
 public:
  explicit Spectrum(Grid grid);

  const Grid& grid() const { return grid_; }
  std::size_t rows() const { return grid_.resolution(); }
  std::size_t cols() const { return grid_.resolution() / 2 + 1; }

  Complex& operator()(std::size_t row, std::size_t col) { return coeffs_[row * cols() + col]; }
  Complex operator()(std::size_t row, std::size_t col) const { return coeffs_[row * cols() + col]; }
  std::span<Complex> coefficients() { return coeffs_; }
  std::span<const Complex> coefficients() const { return coeffs_; }

  Spectrum& operator+=(const Spectrum& other);
  Spectrum& operator-=(const Spectrum& other);
  Spectrum& operator*=(double scale);
  Spectrum& add_scaled(const Spectrum& other, double scale);

  friend Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
  friend Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
  friend Spectrum operator*(double s, Spectrum a) { return a *= s; }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

enum class Axis { x, y };

namespace spectral {

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

/// Multiplies by i*k along `axis`; Nyquist column/row is zeroed.
Spectrum derivative(const Spectrum& s, Axis axis);
/// Multiplies by -|k|^2.
Spectrum laplacian(const Spectrum& s);
/// Multiplies by 1 / (1 + a |k|^2), i.e. applies (I - a Delta)^{-1}.
Spectrum helmholtz(const Spectrum& s, double a);
/// Zeroes every mode with |kx index| or |ky index| above the 2/3 cutoff.
void dealias(Spectrum& s);
/// Spectral divergence of (sx, sy).
Spectrum divergence(const Spectrum& sx, const Spectrum& sy);

/// Projects a physical field onto the dealiased band.
ScalarField band_limit(const ScalarField& f);
VectorField band_limit(const VectorField& w);

/// Pointwise product followed by the 2/3 truncation.
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);
Spectrum dealiased_product_spectrum(const ScalarField& a, const ScalarField& b);

}  // namespace spectral

// Differential operators on physical fields. All reject non-finite input.

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& w);
/// curl2d(w) = d2 w1 - d1 w2, the action of (d2, -d1) dotted with w.
ScalarField curl2d(const VectorField& w);
ScalarField laplacian(const ScalarField& f);
/// Solves g - a * laplacian(g) = f; requires a > 0.
ScalarField helmholtz_solve(const ScalarField& f, double a);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Riemann-sum L^p norm on the torus; p = kInfinity gives the max norm.
double lp_norm(const ScalarField& f, double p);
/// Same, using the pointwise Euclidean magnitude.
double lp_norm(const VectorField& w, double p);

/// Integral of f over the torus (uniform Riemann sum).
double integral(const ScalarField& f);

}  // namespace chemoflux
