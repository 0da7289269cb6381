#include "pjt/kernels.hpp"

#include <cstddef>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define PJT_HAVE_X86 1
#define PJT_AVX2 __attribute__((target("avx2,fma")))
#endif

namespace pjt::kernels::avx2 {

#ifdef PJT_HAVE_X86

namespace {

PJT_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// (lane0 + lane2) - (lane1 + lane3)
PJT_AVX2 inline double hsum_even_minus_odd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_sub_sd(s, _mm_unpackhi_pd(s, s)));
}

inline const double* raw(std::span<const cdouble> x) { return reinterpret_cast<const double*>(x.data()); }
inline double* raw(std::span<cdouble> x) { return reinterpret_cast<double*>(x.data()); }

}  // namespace

PJT_AVX2 double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i + 4), _mm256_loadu_pd(y.data() + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

PJT_AVX2 cdouble dotc(std::span<const cdouble> x, std::span<const cdouble> y) {
  const std::size_t n = 2 * x.size();
  const double* xp = raw(x);
  const double* yp = raw(y);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(xp + i);
    const __m256d yv = _mm256_loadu_pd(yp + i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im);
  }
  double re = hsum(acc_re);
  double im = hsum_even_minus_odd(acc_im);
  for (; i < n; i += 2) {
    re += xp[i] * yp[i] + xp[i + 1] * yp[i + 1];
    im += xp[i] * yp[i + 1] - xp[i + 1] * yp[i];
  }
  return {re, im};
}

PJT_AVX2 void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y.data() + i,
                     _mm256_fmadd_pd(av, _mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

PJT_AVX2 void axpy(cdouble a, std::span<const cdouble> x, std::span<cdouble> y) {
  const std::size_t n = 2 * x.size();
  const double* xp = raw(x);
  double* yp = raw(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(xp + i);
    const __m256d t = _mm256_fmadd_pd(ar, xv, _mm256_loadu_pd(yp + i));
    _mm256_storeu_pd(yp + i, _mm256_addsub_pd(t, _mm256_mul_pd(ai, _mm256_permute_pd(xv, 0b0101))));
  }
  for (; i < n; i += 2) {
    const double xr = xp[i], xi = xp[i + 1];
    yp[i] += a.real() * xr - a.imag() * xi;
    yp[i + 1] += a.real() * xi + a.imag() * xr;
  }
}

PJT_AVX2 void scale(double a, std::span<double> x) {
  const std::size_t n = x.size();
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(av, _mm256_loadu_pd(x.data() + i)));
  for (; i < n; ++i) x[i] *= a;
}

PJT_AVX2 void scale(cdouble a, std::span<cdouble> x) {
  const std::size_t n = 2 * x.size();
  double* xp = raw(x);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(xp + i);
    _mm256_storeu_pd(xp + i, _mm256_addsub_pd(_mm256_mul_pd(ar, xv),
                                              _mm256_mul_pd(ai, _mm256_permute_pd(xv, 0b0101))));
  }
  for (; i < n; i += 2) {
    const double xr = xp[i], xi = xp[i + 1];
    xp[i] = a.real() * xr - a.imag() * xi;
    xp[i + 1] = a.real() * xi + a.imag() * xr;
  }
}

PJT_AVX2 void csr_matvec(const CsrView<double>& a, std::span<const double> x, std::span<double> y) {
  const std::int32_t n = a.rows();
  const double* xp = x.data();
#pragma omp parallel for schedule(static)
  for (std::int32_t r = 0; r < n; ++r) {
    std::int32_t p = a.row_ptr[r];
    const std::int32_t end = a.row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; p + 4 <= end; p += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a.col.data() + p));
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.values.data() + p), _mm256_i32gather_pd(xp, idx, 8), acc);
    }
    double s = hsum(acc);
    for (; p < end; ++p) s += a.values[p] * xp[a.col[p]];
    y[r] = s;
  }
}

PJT_AVX2 void csr_matvec(const CsrView<cdouble>& a, std::span<const cdouble> x, std::span<cdouble> y) {
  const std::int32_t n = a.rows();
  const double* xp = raw(x);
  const double* vp = reinterpret_cast<const double*>(a.values.data());
#pragma omp parallel for schedule(static)
  for (std::int32_t r = 0; r < n; ++r) {
    std::int32_t p = a.row_ptr[r];
    const std::int32_t end = a.row_ptr[r + 1];
    __m256d acc_a = _mm256_setzero_pd();  // [vr*ur, vi*ui]
    __m256d acc_b = _mm256_setzero_pd();  // [vr*ui, vi*ur]
    for (; p + 2 <= end; p += 2) {
      const __m256d v = _mm256_loadu_pd(vp + 2 * p);
      const __m256d u = _mm256_set_m128d(_mm_loadu_pd(xp + 2 * a.col[p + 1]), _mm_loadu_pd(xp + 2 * a.col[p]));
      acc_a = _mm256_fmadd_pd(v, u, acc_a);
      acc_b = _mm256_fmadd_pd(v, _mm256_permute_pd(u, 0b0101), acc_b);
    }
    double re = hsum_even_minus_odd(acc_a);
    double im = hsum(acc_b);
    for (; p < end; ++p) {
      const cdouble v = a.values[p];
      const cdouble u = x[a.col[p]];
      re += v.real() * u.real() - v.imag() * u.imag();
      im += v.real() * u.imag() + v.imag() * u.real();
    }
    y[r] = {re, im};
  }
}

#else  // no x86: the dispatcher never selects these; forward to scalar.

double dot(std::span<const double> x, std::span<const double> y) { return scalar::dot(x, y); }
cdouble dotc(std::span<const cdouble> x, std::span<const cdouble> y) { return scalar::dotc(x, y); }
void axpy(double a, std::span<const double> x, std::span<double> y) { scalar::axpy(a, x, y); }
void axpy(cdouble a, std::span<const cdouble> x, std::span<cdouble> y) { scalar::axpy(a, x, y); }
void scale(double a, std::span<double> x) { scalar::scale(a, x); }
void scale(cdouble a, std::span<cdouble> x) { scalar::scale(a, x); }
void csr_matvec(const CsrView<double>& a, std::span<const double> x, std::span<double> y) {
  scalar::csr_matvec(a, x, y);
}
void csr_matvec(const CsrView<cdouble>& a, std::span<const cdouble> x, std::span<cdouble> y) {
  scalar::csr_matvec(a, x, y);
}

#endif

}  // namespace pjt::kernels::avx2
