#include "pjt/error.hpp"
#include "pjt/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace pjt::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("PJT_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::Avx2;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

inline bool use_avx2() { return current().load(std::memory_order_relaxed) == Isa::Avx2; }

}  // namespace

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() { return current().load(); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) throw InvalidInput("kernel ISA not supported on this CPU: " + std::string(isa_name(isa)));
  current().store(isa);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> x, std::span<const double> y) {
  return use_avx2() ? avx2::dot(x, y) : scalar::dot(x, y);
}
cdouble dotc(std::span<const cdouble> x, std::span<const cdouble> y) {
  return use_avx2() ? avx2::dotc(x, y) : scalar::dotc(x, y);
}
void axpy(double a, std::span<const double> x, std::span<double> y) {
  use_avx2() ? avx2::axpy(a, x, y) : scalar::axpy(a, x, y);
}
void axpy(cdouble a, std::span<const cdouble> x, std::span<cdouble> y) {
  use_avx2() ? avx2::axpy(a, x, y) : scalar::axpy(a, x, y);
}
void scale(double a, std::span<double> x) { use_avx2() ? avx2::scale(a, x) : scalar::scale(a, x); }
void scale(cdouble a, std::span<cdouble> x) { use_avx2() ? avx2::scale(a, x) : scalar::scale(a, x); }
void csr_matvec(const CsrView<double>& a, std::span<const double> x, std::span<double> y) {
  use_avx2() ? avx2::csr_matvec(a, x, y) : scalar::csr_matvec(a, x, y);
}
void csr_matvec(const CsrView<cdouble>& a, std::span<const cdouble> x, std::span<cdouble> y) {
  use_avx2() ? avx2::csr_matvec(a, x, y) : scalar::csr_matvec(a, x, y);
}

}  // namespace pjt::kernels
