#include "pjt/kernels.hpp"

#include <cstddef>

namespace pjt::kernels::scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

cdouble dotc(std::span<const cdouble> x, std::span<const cdouble> y) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void axpy(cdouble a, std::span<const cdouble> x, std::span<cdouble> y) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
  }
}

void scale(double a, std::span<double> x) {
  for (auto& v : x) v *= a;
}

void scale(cdouble a, std::span<cdouble> x) {
  const double ar = a.real(), ai = a.imag();
  for (auto& v : x) v = {ar * v.real() - ai * v.imag(), ar * v.imag() + ai * v.real()};
}

void csr_matvec(const CsrView<double>& a, std::span<const double> x, std::span<double> y) {
  const std::int32_t n = a.rows();
#pragma omp parallel for schedule(static)
  for (std::int32_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::int32_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) s += a.values[p] * x[a.col[p]];
    y[r] = s;
  }
}

void csr_matvec(const CsrView<cdouble>& a, std::span<const cdouble> x, std::span<cdouble> y) {
  const std::int32_t n = a.rows();
#pragma omp parallel for schedule(static)
  for (std::int32_t r = 0; r < n; ++r) {
    double re = 0.0, im = 0.0;
    for (std::int32_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const cdouble v = a.values[p];
      const cdouble u = x[a.col[p]];
      re += v.real() * u.real() - v.imag() * u.imag();
      im += v.real() * u.imag() + v.imag() * u.real();
    }
    y[r] = {re, im};
  }
}

}  // namespace pjt::kernels::scalar
