#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "pjt/eigensolver.hpp"
#include "pjt/error.hpp"
#include "support.hpp"

namespace pjt {
namespace {

SolverOptions iterative() {
  SolverOptions o;
  o.dense_threshold = 0;
  return o;
}

SectorSpec spec_for(const std::string& name, int cutoff, int m_s = 0, double lso = 0.0) {
  const DefectParams p = test::defect(name);
  SectorSpec s;
  s.couplings = pes_to_couplings(p);
  s.lambda = p.lambda;
  s.soc = {lso, lso, m_s};
  s.cutoff = cutoff;
  return s;
}

void expect_eigenpairs(const SparseHermitian& h, const EigResult& r, double tol) {
  const Eigen::MatrixXcd hd = h.to_dense();
  for (int j = 0; j < r.size(); ++j) {
    const Eigen::VectorXcd v = r.eigenvectors.col(j);
    EXPECT_LT((hd * v - r.eigenvalues(j) * v).norm(), tol) << j;
  }
  const Eigen::MatrixXcd g = r.eigenvectors.adjoint() * r.eigenvectors;
  EXPECT_LT((g - Eigen::MatrixXcd::Identity(r.size(), r.size())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lanczos, DiagonalMatrix) {
  std::vector<Triplet> t;
  for (int i = 0; i < 100; ++i) t.push_back({i, i, cdouble(i + 1.0)});
  const SparseHermitian h = SparseHermitian::from_triplets(100, t);
  const EigResult r = solve_lowest(h, 5, iterative());
  EXPECT_FALSE(r.dense);
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(r.eigenvalues(j), j + 1.0, 1e-9);
  expect_eigenpairs(h, r, 1e-8);
}

TEST(Lanczos, UncoupledOscillatorDegeneracy) {
  SectorSpec s;
  s.couplings.hbar_omega_e = 87.7;
  s.cutoff = 6;
  const EigResult r = solve_sector(s, 12, iterative());
  // Ground shell: 4 electronic states at hbar_omega; next: 8 states at 2 hbar_omega.
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(r.eigenvalues(j), 87.7, 1e-8);
  for (int j = 4; j < 12; ++j) EXPECT_NEAR(r.eigenvalues(j), 2 * 87.7, 1e-8);
  const DegeneracyClusters c = cluster_degeneracies(r, 1e-6);
  ASSERT_EQ(c.count(), 2u);
  EXPECT_EQ(c[0].size, 4);
  EXPECT_EQ(c[1].size, 8);
}

TEST(Lanczos, AgreesWithDenseOnSnV0) {
  const SectorSpec s = spec_for("SnV0", 12);
  const SparseHermitian h = assemble(s, OscBasis::build(12));
  const EigResult it = solve_lowest(h, 10, iterative());
  const EigResult de = dense_solve(h, 10);
  EXPECT_TRUE(de.dense);
  EXPECT_LT((it.eigenvalues - de.eigenvalues).cwiseAbs().maxCoeff(), 1e-8);
  expect_eigenpairs(h, it, 1e-6);
  for (int j = 0; j < it.size(); ++j) EXPECT_LE(it.residual_norms(j), 1e-10 * h.norm_inf() * 1.0001);
}

TEST(Lanczos, AgreesWithDenseInComplexSector) {
  const SectorSpec s = spec_for("PbV0", 10, 1, 80.0);
  const SparseHermitian h = assemble(s, OscBasis::build(10));
  ASSERT_FALSE(h.real_only());
  const EigResult it = solve_lowest(h, 8, iterative());
  const EigResult de = dense_solve(h, 8);
  EXPECT_LT((it.eigenvalues - de.eigenvalues).cwiseAbs().maxCoeff(), 1e-8);
  expect_eigenpairs(h, it, 1e-6);
}

TEST(Lanczos, RandomHermitian) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const int n = 300;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, cdouble(0.1 * i + nd(rng))});
    for (int d : {1, 7, 31}) {
      if (i + d >= n) continue;
      const cdouble v(nd(rng), nd(rng));
      t.push_back({i, i + d, v});
      t.push_back({i + d, i, std::conj(v)});
    }
  }
  const SparseHermitian h = SparseHermitian::from_triplets(n, t);
  const EigResult it = solve_lowest(h, 6, iterative());
  const EigResult de = dense_solve(h, 6);
  EXPECT_LT((it.eigenvalues - de.eigenvalues).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Lanczos, DeterministicForFixedSeed) {
  const SectorSpec s = spec_for("GeV0", 10);
  const EigResult a = solve_sector(s, 6, iterative());
  const EigResult b = solve_sector(s, 6, iterative());
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(Lanczos, ReportsUnreachableTolerance) {
  const SparseHermitian h = assemble(spec_for("SnV0", 10), OscBasis::build(10));
  SolverOptions o = iterative();
  o.tol = 1e-30;
  o.max_restarts = 3;
  try {
    solve_lowest(h, 4, o);
    FAIL() << "expected ConvergenceFailure";
  } catch (const ConvergenceFailure& e) {
    EXPECT_EQ(e.residuals().size(), 4);
  }
}

TEST(Lanczos, RejectsBadArguments) {
  const SparseHermitian h = assemble(spec_for("SnV0", 2), OscBasis::build(2));
  EXPECT_THROW(solve_lowest(h, 0), InvalidInput);
  EXPECT_THROW(solve_lowest(h, h.dim() + 1), InvalidInput);
  SolverOptions o;
  o.tol = 0.0;
  EXPECT_THROW(solve_lowest(h, 2, o), InvalidInput);
}

TEST(Lanczos, GroundEnergyDecreasesWithCutoff) {
  double prev = 1e300;
  for (int n : {6, 10, 14, 18}) {
    const double e0 = solve_sector(spec_for("PbV0", n), 2).eigenvalues(0);
    EXPECT_LE(e0, prev + 1e-9) << n;
    prev = e0;
  }
}

TEST(Clusters, GroupsCloseNeighbours) {
  Eigen::VectorXd e(6);
  e << 1.0, 1.0 + 1e-9, 2.0, 3.0, 3.0 + 5e-7, 3.0 + 1e-6;
  const DegeneracyClusters c = cluster_degeneracies(e, 1e-6);
  ASSERT_EQ(c.count(), 3u);
  EXPECT_EQ(c[0].size, 2);
  EXPECT_EQ(c[1].begin, 2);
  EXPECT_EQ(c[2].size, 3);
  EXPECT_EQ(c[2].end(), 6);
}

TEST(CutoffConvergence, StopsAtFirstAgreeingPair) {
  std::vector<int> seen;
  const ConvergenceResult r = converge_cutoff(
      [&](int n) {
        seen.push_back(n);
        return 1.0 + 10.0 / (n * n);
      },
      {0.01, 10, 5, 60});
  // 1 + 10/225 vs 1 + 10/400: relative change 0.019; 1 + 10/400 vs 1 + 10/625: 0.0090.
  EXPECT_EQ(r.cutoff, 20);
  EXPECT_DOUBLE_EQ(r.value, 1.0 + 10.0 / 400.0);
  EXPECT_EQ(seen, (std::vector<int>{10, 15, 20, 25}));
}

TEST(CutoffConvergence, RaisesWithHistory) {
  try {
    converge_cutoff([](int n) { return double(n); }, {0.01, 10, 5, 30});
    FAIL();
  } catch (const CutoffNotConverged& e) {
    EXPECT_EQ(e.history().size(), 5u);
  }
  EXPECT_THROW(converge_cutoff([](int) { return 1.0; }, {0.01, 10, 0, 30}), InvalidInput);
}

}  // namespace
}  // namespace pjt
