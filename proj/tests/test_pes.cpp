#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pjt/error.hpp"
#include "pjt/pes.hpp"
#include "support.hpp"

namespace pjt {
namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

TEST(Adiabatic, ZeroCouplingsGiveOffsetParabolas) {
  Couplings c;
  c.hbar_omega_e = 80.0;
  for (double q : {-2.0, 0.0, 0.7, 3.0}) {
    const Eigen::Vector4d e = adiabatic_energies(c, 30.0, CorrelationPreset::ERaised, q, 0.4);
    const double base = 40.0 * (q * q + 0.16);
    EXPECT_NEAR(e[0], base, 1e-12);
    EXPECT_NEAR(e[1], base, 1e-12);
    EXPECT_NEAR(e[2], base + 30.0, 1e-12);
    EXPECT_NEAR(e[3], base + 30.0, 1e-12);
  }
}

TEST(Adiabatic, HighSymmetryPoint) {
  const Couplings c = pes_to_couplings(test::defect("SnV0"));
  const Eigen::Vector4d e = adiabatic_energies(c, 98.2, CorrelationPreset::ERaised, 0.0, 0.0);
  EXPECT_NEAR(e[0], 0.0, 1e-12);
  EXPECT_NEAR(e[1], 0.0, 1e-12);
  EXPECT_NEAR(e[2], 98.2, 1e-12);
  EXPECT_NEAR(e[3], 98.2, 1e-12);
  const Eigen::Vector4d a = adiabatic_energies(c, 98.2, CorrelationPreset::ASplit, 0.0, 0.0);
  EXPECT_NEAR(a[0], -98.2, 1e-12);
  EXPECT_NEAR(a[3], 98.2, 1e-12);
}

TEST(Adiabatic, SnV0BranchMinimaMatchClosedForm) {
  const DefectParams p = test::defect("SnV0");
  const Couplings c = pes_to_couplings(p);
  const BranchPair rho = branch_minimum_dimensionless(c);
  EXPECT_NEAR(rho[0], 2.444, 0.001);
  const SurfaceMinimum m = lowest_surface_minimum(c, 0.0, CorrelationPreset::ERaised);
  EXPECT_NEAR(m.qx, rho[0], 1e-6);
  EXPECT_NEAR(m.energy / -p.e_jt[0], 1.0, 1e-10);
  // The destructive branch has its own well on the negative side.
  ASSERT_LT(rho[1], 0.0);
  const Eigen::Vector4d e = adiabatic_energies(c, 0.0, CorrelationPreset::ERaised, rho[1], 0.0);
  const double closest = (e.array() + p.e_jt[1]).abs().minCoeff();
  EXPECT_LT(closest, 1e-10 * p.e_jt[0]);
}

double radial_minimum(const Couplings& c, double phi) {
  // Golden-section search of the lowest surface along a ray.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 6.0;
  auto f = [&](double r) {
    return adiabatic_energies(c, 0.0, CorrelationPreset::ERaised, r * std::cos(phi), r * std::sin(phi))[0];
  };
  double x1 = b - g * (b - a), x2 = a + g * (b - a), f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200; ++i) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = f(x1);
    } else {
      a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

TEST(Adiabatic, ThreeEquivalentWells) {
  const DefectParams p = test::defect("SnV0");
  const Couplings c = pes_to_couplings(p);
  const int n = 360;
  std::vector<double> e(n);
  for (int i = 0; i < n; ++i) e[i] = radial_minimum(c, 2.0 * M_PI * i / n);
  std::vector<int> minima, maxima;
  for (int i = 0; i < n; ++i) {
    const double l = e[(i + n - 1) % n], r = e[(i + 1) % n];
    if (e[i] < l && e[i] <= r) minima.push_back(i);
    if (e[i] > l && e[i] >= r) maxima.push_back(i);
  }
  ASSERT_EQ(minima.size(), 3u);
  ASSERT_EQ(maxima.size(), 3u);
  EXPECT_EQ(minima[1] - minima[0], 120);
  EXPECT_EQ(minima[2] - minima[1], 120);
  for (int i : minima) EXPECT_NEAR(e[i], -p.e_jt[0], 1e-6);
  const double barrier = e[maxima[0]] - e[minima[0]];
  EXPECT_NEAR(barrier / p.delta_jt[0], 1.0, 1e-3);
}

double max_curvature(const PesCurve& curve, bool sort_each_point) {
  const double h = curve.qx[1] - curve.qx[0];
  std::vector<std::array<double, 4>> e(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    for (int s = 0; s < 4; ++s) e[i][s] = curve.energy[s][i];
    if (sort_each_point) std::sort(e[i].begin(), e[i].end());
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < e.size(); ++i)
    for (int s = 0; s < 4; ++s) worst = std::max(worst, std::abs(e[i + 1][s] - 2 * e[i][s] + e[i - 1][s]) / (h * h));
  return worst;
}

TEST(Adiabatic, TrackedSurfacesAreContinuous) {
  const Couplings c = pes_to_couplings(test::defect("SnV0"));
  const PesCurve coarse = adiabatic_surfaces(c, 98.2, CorrelationPreset::ERaised, grid(-6.0, 6.0, 481));
  const PesCurve fine = adiabatic_surfaces(c, 98.2, CorrelationPreset::ERaised, grid(-6.0, 6.0, 961));
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    std::array<double, 4> tracked;
    for (int s = 0; s < 4; ++s) tracked[s] = coarse.energy[s][i];
    std::sort(tracked.begin(), tracked.end());
    const Eigen::Vector4d sorted = adiabatic_energies(c, 98.2, CorrelationPreset::ERaised, coarse.qx[i], 0.0);
    for (int s = 0; s < 4; ++s) EXPECT_NEAR(tracked[s], sorted[s], 1e-9);
  }
  // Smooth curves: the curvature estimate converges under refinement. A kink would double it.
  const double tc = max_curvature(coarse, false), tf = max_curvature(fine, false);
  EXPECT_LT(tf, 1.1 * tc);
}

TEST(Adiabatic, TrackingFollowsSymmetryAllowedCrossings) {
  // Weak pJT coupling and small Lambda: C2'-even and -odd surfaces cross on the Q_x axis.
  Couplings c;
  c.f_u = -37.3, c.f_g = 4.9, c.g_u = -1.1, c.g_g = -5.4, c.hbar_omega_e = 80.0;
  const double lambda = 6.9;
  const std::vector<double> q = grid(-6.0, 6.0, 481);
  const PesCurve curve = adiabatic_surfaces(c, lambda, CorrelationPreset::ERaised, q);

  // Oracle: diagonalize inside each C2' parity block; each block gives two smooth curves.
  Eigen::SelfAdjointEigenSolver<Mat4> parity(electronic::c2prime());
  std::array<std::vector<double>, 4> sector;
  int crossings = 0;
  for (double x : q) {
    const Mat4 h = adiabatic_matrix(c, lambda, CorrelationPreset::ERaised, x, 0.0);
    for (int blk = 0; blk < 2; ++blk) {
      const Eigen::Matrix<double, 4, 2> v = parity.eigenvectors().middleCols(2 * blk, 2);
      ASSERT_NEAR(std::abs(parity.eigenvalues()[2 * blk] - parity.eigenvalues()[2 * blk + 1]), 0.0, 1e-12);
      const Eigen::Vector2d e = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(v.transpose() * h * v).eigenvalues();
      sector[2 * blk].push_back(e[0]);
      sector[2 * blk + 1].push_back(e[1]);
    }
  }
  for (std::size_t i = 1; i < q.size(); ++i)
    if ((sector[0][i] - sector[2][i]) * (sector[0][i - 1] - sector[2][i - 1]) < 0.0) ++crossings;
  ASSERT_GT(crossings, 0);
  for (int s = 0; s < 4; ++s) {
    double best = 1e300;
    for (int o = 0; o < 4; ++o) {
      double d = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) d = std::max(d, std::abs(curve.energy[s][i] - sector[o][i]));
      best = std::min(best, d);
    }
    EXPECT_LT(best, 1e-9) << "surface " << s;
  }
}

PesCurve synthetic(const DefectParams& p, const std::vector<double>& q, CorrelationPreset preset = CorrelationPreset::ERaised) {
  return adiabatic_surfaces(pes_to_couplings(p), p.lambda, preset, q);
}

DefectParams perturbed(DefectParams p) {
  p.hbar_omega_e *= 1.03;
  p.lambda *= 0.95;
  p.e_jt[0] *= 1.04;
  p.e_jt[1] *= 0.9;
  p.delta_jt[0] *= 0.97;
  p.delta_jt[1] *= 1.1;
  return p;
}

void expect_recovered(const FitResult& f, const DefectParams& truth, double rel) {
  const Couplings c = pes_to_couplings(truth);
  EXPECT_NEAR(f.couplings.hbar_omega_e / c.hbar_omega_e, 1.0, rel);
  EXPECT_NEAR(f.lambda / truth.lambda, 1.0, rel);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(f.couplings.linear(i) / c.linear(i), 1.0, rel) << i;
    EXPECT_NEAR(f.couplings.quadratic(i) / c.quadratic(i), 1.0, rel) << i;
    EXPECT_NEAR(f.params.e_jt[i] / truth.e_jt[i], 1.0, rel) << i;
    EXPECT_NEAR(f.params.delta_jt[i] / truth.delta_jt[i], 1.0, rel) << i;
  }
}

class FitRoundTrip : public ::testing::TestWithParam<std::string> {};

TEST_P(FitRoundTrip, NoiselessRecovery) {
  const DefectParams truth = test::defect(GetParam());
  const FitResult f = fit_pes(synthetic(truth, grid(-4.0, 4.0, 81)), perturbed(truth));
  expect_recovered(f, truth, 1e-6);
  for (int s = 0; s < 4; ++s) EXPECT_LT(f.rms[s], 1e-6);
  for (std::size_t i = 1; i < f.cost_history.size(); ++i) EXPECT_LE(f.cost_history[i], f.cost_history[i - 1]);
  EXPECT_NEAR(f.offset, 0.0, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Table1, FitRoundTrip, ::testing::Values("SiV0", "GeV0", "SnV0", "PbV0"));

TEST(Fit, OffsetIsANuisanceParameter) {
  const DefectParams truth = test::defect("SnV0");
  PesCurve shifted = synthetic(truth, grid(-4.0, 4.0, 61));
  for (auto& col : shifted.energy)
    for (double& e : col) e += 123.4;
  const FitResult f = fit_pes(shifted, perturbed(truth));
  expect_recovered(f, truth, 1e-6);
  EXPECT_NEAR(f.offset, 123.4, 1e-6);
}

TEST(Fit, MaskedEntriesAreSkipped) {
  const DefectParams truth = test::defect("GeV0");
  PesCurve curve = synthetic(truth, grid(-4.0, 4.0, 81));
  for (std::size_t i = 0; i < curve.size(); i += 3) curve.energy[3][i] = std::numeric_limits<double>::quiet_NaN();
  const FitResult f = fit_pes(curve, perturbed(truth));
  expect_recovered(f, truth, 1e-6);
  EXPECT_EQ(f.counts[3], 54u);
  EXPECT_EQ(f.counts[0], 81u);
}

TEST(Fit, AngstromCoordinates) {
  const DefectParams truth = test::defect("SnV0");
  const double l = dimensionless_length_scale(truth.hbar_omega_e, truth.effective_mass_amu);
  PesCurve curve = synthetic(truth, grid(-4.0, 4.0, 81));
  for (double& q : curve.qx) q *= l;
  curve.unit = QxUnit::Angstrom;
  const FitResult f = fit_pes(curve, perturbed(truth));
  expect_recovered(f, truth, 1e-6);
}

TEST(Fit, OneSidedSamplesAreNotIdentifiable) {
  const DefectParams truth = test::defect("SnV0");
  const PesCurve curve = synthetic(truth, grid(0.05, 4.0, 60));
  try {
    fit_pes(curve, perturbed(truth));
    FAIL() << "expected IdentifiabilityError";
  } catch (const IdentifiabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("F2"), std::string::npos);
  }
}

TEST(Fit, TooFewSamples) {
  const DefectParams truth = test::defect("SnV0");
  EXPECT_THROW(fit_pes(synthetic(truth, grid(-3.0, 3.0, 19)), truth), InvalidInput);
}

TEST(Fit, NoiseMonteCarlo) {
  const DefectParams truth = test::defect("SnV0");
  const PesCurve clean = synthetic(truth, grid(-4.0, 4.0, 81));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.5);
  double worst = 0.0, rms_sum = 0.0;
  const int draws = 100;
  for (int d = 0; d < draws; ++d) {
    PesCurve noisy = clean;
    for (auto& col : noisy.energy)
      for (double& e : col) e += noise(rng);
    const FitResult f = fit_pes(noisy, truth);
    worst = std::max(worst, std::abs(f.params.e_jt[0] / truth.e_jt[0] - 1.0));
    for (int s = 0; s < 4; ++s) rms_sum += f.rms[s];
  }
  EXPECT_LT(worst, 0.02);
  // Residual RMS sits just below the injected sigma (7 fitted parameters over 324 residuals).
  EXPECT_NEAR(rms_sum / (4.0 * draws), 0.5, 0.03);
}

TEST(PesCsv, RoundTrip) {
  PesCurve c = synthetic(test::defect("PbV0"), grid(-2.0, 2.0, 9));
  c.energy[2][4] = std::numeric_limits<double>::quiet_NaN();
  c.unit = QxUnit::Angstrom;
  std::stringstream ss;
  write_pes_csv(ss, c);
  const PesCurve back = read_pes_csv(ss);
  EXPECT_EQ(back.unit, QxUnit::Angstrom);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.qx[i], c.qx[i]);
    for (int s = 0; s < 4; ++s) {
      if (std::isnan(c.energy[s][i]))
        EXPECT_TRUE(std::isnan(back.energy[s][i]));
      else
        EXPECT_EQ(back.energy[s][i], c.energy[s][i]);
    }
  }
}

TEST(PesCsv, RejectsMalformedInput) {
  std::istringstream no_unit("qx,e1_mev,e2_mev,e3_mev,e4_mev\n0,1,2,3,4\n");
  EXPECT_THROW(read_pes_csv(no_unit), InvalidInput);
  std::istringstream bad_cols("qx_unit=dimensionless\nqx,e1,e2,e3,e4\n");
  EXPECT_THROW(read_pes_csv(bad_cols), InvalidInput);
  std::istringstream short_row("qx_unit=dimensionless\nqx,e1_mev,e2_mev,e3_mev,e4_mev\n0,1,2\n");
  EXPECT_THROW(read_pes_csv(short_row), InvalidInput);
  std::istringstream bad_num("qx_unit=dimensionless\nqx,e1_mev,e2_mev,e3_mev,e4_mev\n0,1,x,3,4\n");
  EXPECT_THROW(read_pes_csv(bad_num), InvalidInput);
  std::istringstream ok("# comment\nqx_unit=dimensionless\nqx,e1_mev,e2_mev,e3_mev,e4_mev\n0.5,1,,3,4\n");
  const PesCurve c = read_pes_csv(ok);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(std::isnan(c.energy[1][0]));
}

}  // namespace
}  // namespace pjt
