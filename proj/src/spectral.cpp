#include "chemoflux/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fft_plan.hpp"

namespace chemoflux {

namespace {

void require_finite(const ScalarField& f, const char* what) {
  if (!f.all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite samples");
}

void require_finite(const VectorField& w, const char* what) {
  if (!w.all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite samples");
}

long signed_index(std::size_t i, std::size_t n) {
  const auto si = static_cast<long>(i);
  const auto sn = static_cast<long>(n);
  return si < sn / 2 ? si : si - sn;
}

}  // namespace

Spectrum::Spectrum(Grid grid)
    : grid_(std::move(grid)), coeffs_(grid_.resolution() * (grid_.resolution() / 2 + 1)) {}

Spectrum& Spectrum::operator+=(const Spectrum& other) { return add_scaled(other, 1.0); }
Spectrum& Spectrum::operator-=(const Spectrum& other) { return add_scaled(other, -1.0); }

Spectrum& Spectrum::operator*=(double scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

Spectrum& Spectrum::add_scaled(const Spectrum& other, double scale) {
  require_same_grid(grid_, other.grid_, "Spectrum arithmetic");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += scale * other.coeffs_[i];
  return *this;
}

namespace spectral {

Spectrum forward(const ScalarField& f) {
  Spectrum s(f.grid());
  f.grid().fft().forward(f.samples().data(), s.coefficients().data());
  return s;
}

ScalarField inverse(const Spectrum& s) {
  std::vector<Complex> scratch(s.coefficients().begin(), s.coefficients().end());
  ScalarField out(s.grid());
  s.grid().fft().inverse(scratch.data(), out.samples().data());
  out *= 1.0 / static_cast<double>(s.grid().size());
  return out;
}

Spectrum derivative(const Spectrum& s, Axis axis) {
  Spectrum out(s.grid());
  const auto kd = s.grid().derivative_wavenumbers();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.cols(); ++c) {
      const double k = axis == Axis::x ? kd[c] : kd[r];
      out(r, c) = Complex(0.0, k) * s(r, c);
    }
  }
  return out;
}

Spectrum laplacian(const Spectrum& s) {
  Spectrum out(s.grid());
  const auto k = s.grid().wavenumbers();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.cols(); ++c) {
      out(r, c) = -(k[c] * k[c] + k[r] * k[r]) * s(r, c);
    }
  }
  return out;
}

Spectrum helmholtz(const Spectrum& s, double a) {
  Spectrum out(s.grid());
  const auto k = s.grid().wavenumbers();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.cols(); ++c) {
      out(r, c) = s(r, c) / (1.0 + a * (k[c] * k[c] + k[r] * k[r]));
    }
  }
  return out;
}

void dealias(Spectrum& s) {
  const std::size_t n = s.grid().resolution();
  const auto cutoff = static_cast<long>(s.grid().dealias_cutoff());
  for (std::size_t r = 0; r < s.rows(); ++r) {
    const bool row_kept = std::labs(signed_index(r, n)) <= cutoff;
    for (std::size_t c = 0; c < s.cols(); ++c) {
      if (!row_kept || static_cast<long>(c) > cutoff) s(r, c) = 0.0;
    }
  }
}

Spectrum divergence(const Spectrum& sx, const Spectrum& sy) {
  require_same_grid(sx.grid(), sy.grid(), "divergence");
  Spectrum out(sx.grid());
  const auto kd = sx.grid().derivative_wavenumbers();
  for (std::size_t r = 0; r < sx.rows(); ++r) {
    for (std::size_t c = 0; c < sx.cols(); ++c) {
      out(r, c) = Complex(0.0, kd[c]) * sx(r, c) + Complex(0.0, kd[r]) * sy(r, c);
    }
  }
  return out;
}

ScalarField band_limit(const ScalarField& f) {
  Spectrum s = forward(f);
  dealias(s);
  return inverse(s);
}

VectorField band_limit(const VectorField& w) { return {band_limit(w.x()), band_limit(w.y())}; }

Spectrum dealiased_product_spectrum(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "dealiased_product");
  ScalarField product(a.grid());
  for (std::size_t i = 0; i < product.size(); ++i) product[i] = a[i] * b[i];
  Spectrum s = forward(product);
  dealias(s);
  return s;
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
  return inverse(dealiased_product_spectrum(a, b));
}

}  // namespace spectral

VectorField gradient(const ScalarField& f) {
  require_finite(f, "gradient");
  const Spectrum s = spectral::forward(f);
  return {spectral::inverse(spectral::derivative(s, Axis::x)),
          spectral::inverse(spectral::derivative(s, Axis::y))};
}

ScalarField divergence(const VectorField& w) {
  require_finite(w, "divergence");
  return spectral::inverse(
      spectral::divergence(spectral::forward(w.x()), spectral::forward(w.y())));
}

ScalarField curl2d(const VectorField& w) {
  require_finite(w, "curl2d");
  Spectrum out = spectral::derivative(spectral::forward(w.x()), Axis::y);
  out -= spectral::derivative(spectral::forward(w.y()), Axis::x);
  return spectral::inverse(out);
}

ScalarField laplacian(const ScalarField& f) {
  require_finite(f, "laplacian");
  return spectral::inverse(spectral::laplacian(spectral::forward(f)));
}

ScalarField helmholtz_solve(const ScalarField& f, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("helmholtz_solve: coefficient must be positive");
  require_finite(f, "helmholtz_solve");
  return spectral::inverse(spectral::helmholtz(spectral::forward(f), a));
}

namespace {

double lp_of_magnitudes(std::span<const double> magnitudes, double cell_area, double p) {
  if (std::isnan(p) || p < 1.0) {
    throw std::invalid_argument("lp_norm: exponent must be >= 1 or infinity");
  }
  if (std::isinf(p)) {
    double m = 0.0;
    for (double a : magnitudes) m = std::max(m, std::abs(a));
    return m;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (double a : magnitudes) sum += a * a;
    return std::sqrt(sum * cell_area);
  }
  if (p == 4.0) {
    for (double a : magnitudes) {
      const double sq = a * a;
      sum += sq * sq;
    }
    return std::sqrt(std::sqrt(sum * cell_area));
  }
  for (double a : magnitudes) sum += std::pow(std::abs(a), p);
  return std::pow(sum * cell_area, 1.0 / p);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) {
  require_finite(f, "lp_norm");
  return lp_of_magnitudes(f.samples(), f.grid().cell_area(), p);
}

double lp_norm(const VectorField& w, double p) {
  require_finite(w, "lp_norm");
  const ScalarField m = w.magnitude();
  return lp_of_magnitudes(m.samples(), w.grid().cell_area(), p);
}

double integral(const ScalarField& f) {
  double sum = 0.0;
  for (double s : f.samples()) sum += s;
  return sum * f.grid().cell_area();
}

}  // namespace chemoflux
