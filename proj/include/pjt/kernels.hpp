#pragma once

// Dense and CSR arithmetic kernels used by the Krylov solver.
//
// Every kernel has a portable scalar reference implementation and an AVX2+FMA
// variant. The active variant is chosen once at startup from CPUID and can be
// pinned with force_isa() or the PJT_KERNELS=scalar|avx2 environment variable.

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>

namespace pjt::kernels {

using cdouble = std::complex<double>;

enum class Isa { Scalar, Avx2 };

template <class T>
struct CsrView {
  std::span<const std::int32_t> row_ptr;
  std::span<const std::int32_t> col;
  std::span<const T> values;
  std::int32_t rows() const { return static_cast<std::int32_t>(row_ptr.size()) - 1; }
};

bool isa_available(Isa isa);
Isa active_isa();
// Throws InvalidInput if the ISA is not supported on this CPU.
void force_isa(Isa isa);
std::string_view isa_name(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
// conj(x) . y
cdouble dotc(std::span<const cdouble> x, std::span<const cdouble> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpy(cdouble a, std::span<const cdouble> x, std::span<cdouble> y);
void scale(double a, std::span<double> x);
void scale(cdouble a, std::span<cdouble> x);
// y = A x
void csr_matvec(const CsrView<double>& a, std::span<const double> x, std::span<double> y);
void csr_matvec(const CsrView<cdouble>& a, std::span<const cdouble> x, std::span<cdouble> y);

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
cdouble dotc(std::span<const cdouble> x, std::span<const cdouble> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpy(cdouble a, std::span<const cdouble> x, std::span<cdouble> y);
void scale(double a, std::span<double> x);
void scale(cdouble a, std::span<cdouble> x);
void csr_matvec(const CsrView<double>& a, std::span<const double> x, std::span<double> y);
void csr_matvec(const CsrView<cdouble>& a, std::span<const cdouble> x, std::span<cdouble> y);
}  // namespace scalar

// Only callable when isa_available(Isa::Avx2).
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
cdouble dotc(std::span<const cdouble> x, std::span<const cdouble> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpy(cdouble a, std::span<const cdouble> x, std::span<cdouble> y);
void scale(double a, std::span<double> x);
void scale(cdouble a, std::span<cdouble> x);
void csr_matvec(const CsrView<double>& a, std::span<const double> x, std::span<double> y);
void csr_matvec(const CsrView<cdouble>& a, std::span<const cdouble> x, std::span<cdouble> y);
}  // namespace avx2

}  // namespace pjt::kernels
