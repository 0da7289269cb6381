#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pjt/kernels.hpp"
#include "pjt/sparse.hpp"

namespace pjt {
namespace {

namespace k = kernels;

class KernelEquivalence : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    if (!k::isa_available(k::Isa::Avx2)) GTEST_SKIP() << "AVX2 not available";
  }
  std::mt19937_64 rng{static_cast<std::uint64_t>(GetParam()) + 11};
  std::vector<double> real_vec(int n) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
  }
  std::vector<cdouble> complex_vec(int n) {
    std::normal_distribution<double> d;
    std::vector<cdouble> v(n);
    for (auto& x : v) x = {d(rng), d(rng)};
    return v;
  }
};

TEST_P(KernelEquivalence, Dot) {
  const int n = GetParam();
  const auto x = real_vec(n), y = real_vec(n);
  const double s = k::scalar::dot(x, y), a = k::avx2::dot(x, y);
  EXPECT_NEAR(a, s, 1e-13 * (1.0 + n));
}

TEST_P(KernelEquivalence, Dotc) {
  const int n = GetParam();
  const auto x = complex_vec(n), y = complex_vec(n);
  const cdouble s = k::scalar::dotc(x, y), a = k::avx2::dotc(x, y);
  EXPECT_NEAR(std::abs(a - s), 0.0, 1e-13 * (1.0 + n));
  cdouble ref = 0.0;
  for (int i = 0; i < n; ++i) ref += std::conj(x[i]) * y[i];
  EXPECT_NEAR(std::abs(s - ref), 0.0, 1e-13 * (1.0 + n));
}

TEST_P(KernelEquivalence, AxpyAndScale) {
  const int n = GetParam();
  const auto x = real_vec(n);
  auto ys = real_vec(n), ya = ys;
  k::scalar::axpy(0.37, x, ys);
  k::avx2::axpy(0.37, x, ya);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(ya[i], ys[i], 1e-15 * (1 + std::abs(ys[i])));
  k::scalar::scale(-1.7, ys);
  k::avx2::scale(-1.7, ya);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(ya[i], ys[i], 1e-15 * (1 + std::abs(ys[i])));

  const auto cx = complex_vec(n);
  auto cs = complex_vec(n), ca = cs;
  const cdouble alpha(0.3, -1.1);
  k::scalar::axpy(alpha, cx, cs);
  k::avx2::axpy(alpha, cx, ca);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(std::abs(ca[i] - cs[i]), 0.0, 1e-14);
  k::scalar::scale(alpha, cs);
  k::avx2::scale(alpha, ca);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(std::abs(ca[i] - cs[i]), 0.0, 1e-14);
}

TEST_P(KernelEquivalence, CsrMatvec) {
  const int n = GetParam();
  std::uniform_int_distribution<int> col(0, std::max(0, n - 1)), len(0, 23);
  std::normal_distribution<double> val;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    const int m = len(rng);
    for (int j = 0; j < m; ++j) {
      const int c = col(rng);
      const cdouble v = (i + c) % 3 == 0 ? cdouble(val(rng), 0.0) : cdouble(val(rng), val(rng));
      t.push_back({i, c, v});
      t.push_back({c, i, std::conj(v)});
    }
  }
  std::vector<Triplet> real_t;
  for (const auto& e : t) real_t.push_back({e.row, e.col, e.value.real()});
  const SparseHermitian hr = SparseHermitian::from_triplets(n, real_t);
  const SparseHermitian hc = SparseHermitian::from_triplets(n, t);

  const auto x = real_vec(n);
  std::vector<double> ys(n), ya(n);
  k::scalar::csr_matvec(hr.real_view(), x, ys);
  k::avx2::csr_matvec(hr.real_view(), x, ya);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(ya[i], ys[i], 1e-12 * (1 + std::abs(ys[i])));

  const auto cx = complex_vec(n);
  std::vector<cdouble> cs(n), ca(n);
  k::scalar::csr_matvec(hc.complex_view(), cx, cs);
  k::avx2::csr_matvec(hc.complex_view(), cx, ca);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(std::abs(ca[i] - cs[i]), 0.0, 1e-12 * (1 + std::abs(cs[i])));
}

INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalence, ::testing::Values(0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 33, 100, 1001));

TEST(KernelDispatch, ForceAndRestore) {
  const k::Isa before = k::active_isa();
  k::force_isa(k::Isa::Scalar);
  EXPECT_EQ(k::active_isa(), k::Isa::Scalar);
  EXPECT_EQ(k::isa_name(k::Isa::Scalar), "scalar");
  if (k::isa_available(k::Isa::Avx2)) {
    k::force_isa(k::Isa::Avx2);
    EXPECT_EQ(k::active_isa(), k::Isa::Avx2);
  }
  k::force_isa(before);
}

TEST(SparseHermitian, SumsDuplicatesDropsZerosAndTracksRealness) {
  const SparseHermitian h = SparseHermitian::from_triplets(
      3, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 2, cdouble(0, 1)}, {2, 1, cdouble(0, -1)}, {2, 2, 0.0}});
  EXPECT_FALSE(h.real_only());
  EXPECT_EQ(h.nonzeros(), 3u);
  EXPECT_EQ(h.at(0, 0), cdouble(3.0));
  EXPECT_EQ(h.hermiticity_defect(), 0.0);
  EXPECT_EQ(h.norm_inf(), 3.0);
  const SparseHermitian r = SparseHermitian::from_triplets(2, {{0, 1, 2.0}, {1, 0, 2.0}});
  EXPECT_TRUE(r.real_only());
  EXPECT_EQ(r.max_row_nonzeros(), 1);
}

}  // namespace
}  // namespace pjt
