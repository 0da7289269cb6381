#include "pjt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "pjt/error.hpp"
#include "pjt/pes.hpp"

namespace pjt {

Couplings couplings_at_order(const Couplings& second_order, int order) {
  if (order == 2) return second_order;
  if (order == 1) return first_order_couplings(second_order);
  throw InvalidInput("coupling order must be 1 or 2");
}

SectorSpec sector_for(const DefectParams& p, int order, CorrelationPreset preset, int cutoff) {
  SectorSpec s;
  s.couplings = couplings_at_order(pes_to_couplings(p), order);
  s.lambda = p.lambda;
  s.cutoff = cutoff;
  s.preset = preset;
  return s;
}

VibronicSolve solve_vibronic(const SectorSpec& spec, const AnalysisOptions& opt, double length_scale) {
  VibronicSolve out{spec, OscBasis::build(spec.cutoff), {}, {}};
  const SparseHermitian h = assemble(spec, out.basis);
  out.eig = solve_lowest(h, std::min<int>(opt.k, h.dim()), opt.solver);
  out.eig.cutoff_used = spec.cutoff;
  out.spectrum = label_spectrum(out.eig, out.basis, length_scale, opt.cluster_tol);
  return out;
}

LowestLevels lowest_levels(const VibronicSolve& s) {
  const LabeledSpectrum& sp = s.spectrum;
  if (sp.clusters.count() == 0) throw SolverFailure("empty spectrum");
  const Irrep first = sp.cluster_irreps[0];
  if (first != Irrep::A2u && first != Irrep::A1u) {
    std::ostringstream os;
    os << "label mismatch: lowest cluster is " << irrep_name(first) << " (size " << sp.clusters[0].size
       << ", chi(C3) = " << sp.cluster_characters[0].c3 << ", chi(C2') = " << sp.cluster_characters[0].c2prime
       << "), expected an A-type singlet";
    throw SolverFailure(os.str());
  }
  LowestLevels out;
  for (std::size_t c = 0; c < sp.clusters.count(); ++c) {
    if (out.a2u_state < 0 && sp.cluster_irreps[c] == Irrep::A2u) out.a2u_state = sp.clusters[c].begin;
    if (out.eu_cluster < 0 && sp.cluster_irreps[c] == Irrep::Eu) out.eu_cluster = static_cast<int>(c);
  }
  if (out.a2u_state < 0) throw SolverFailure("no A2u state among the computed levels");
  if (out.eu_cluster < 0) throw SolverFailure("no Eu doublet among the computed levels; increase k");
  return out;
}

double gamma_splitting(const VibronicSolve& s) {
  const LowestLevels l = lowest_levels(s);
  return s.eig.eigenvalues[s.spectrum.clusters[l.eu_cluster].begin] - s.eig.eigenvalues[l.a2u_state];
}

double gamma_splitting(const SectorSpec& spec, int order, const AnalysisOptions& opt) {
  if (spec.soc.m_s != 0 && spec.soc.active()) throw InvalidInput("gamma_splitting needs the lambda0 = 0 problem");
  SectorSpec s = spec;
  s.soc = {};
  s.couplings = couplings_at_order(spec.couplings, order);
  return gamma_splitting(solve_vibronic(s, opt));
}

namespace {

// <a| op (x) 1 |b> over a block of states.
Eigen::MatrixXcd electronic_matrix(const Eigen::MatrixXcd& states, const Mat4c& op, std::int32_t d) {
  Eigen::MatrixXcd applied = Eigen::MatrixXcd::Zero(states.rows(), states.cols());
  for (int ep = 0; ep < 4; ++ep)
    for (int e = 0; e < 4; ++e)
      if (op(ep, e) != cdouble(0.0)) applied.middleRows(ep * d, d) += op(ep, e) * states.middleRows(e * d, d);
  return states.adjoint() * applied;
}

double max_eigenvalue(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

}  // namespace

ReductionFactors reduction_factors(const VibronicSolve& s) {
  const LowestLevels l = lowest_levels(s);
  const Cluster& c = s.spectrum.clusters[l.eu_cluster];
  if (c.size != 2) throw SolverFailure("lowest Eu cluster is not twofold degenerate");
  const Eigen::MatrixXcd doublet = s.eig.eigenvectors.middleCols(c.begin, 2);
  const std::int32_t d = s.basis.dim();
  return {max_eigenvalue(electronic_matrix(doublet, op_on_u(pauli::sy()), d)),
          max_eigenvalue(electronic_matrix(doublet, op_on_g(pauli::sy()), d))};
}

ReductionFactors reduction_factors(const SectorSpec& spec, const AnalysisOptions& opt) {
  SectorSpec s = spec;
  s.soc = {};
  return reduction_factors(solve_vibronic(s, opt));
}

std::vector<Level> track_levels(const VibronicSolve& ref, const EigResult& sector, int m_s,
                                const AnalysisOptions& opt) {
  const LabeledSpectrum& sp = ref.spectrum;
  const Eigen::MatrixXcd ov = (ref.eig.eigenvectors.adjoint() * sector.eigenvectors).cwiseAbs2();
  const std::int32_t d = ref.basis.dim();
  const Mat4c lz = op_on_u(pauli::sy()) + op_on_g(pauli::sy());
  std::vector<Level> out;
  for (int j = 0; j < sector.size(); ++j) {
    Level lv;
    lv.m_s = m_s;
    lv.energy = sector.eigenvalues[j];
    for (std::size_t c = 0; c < sp.clusters.count(); ++c) {
      const double w = ov.col(j).segment(sp.clusters[c].begin, sp.clusters[c].size).real().sum();
      if (w > lv.overlap) {
        lv.overlap = w;
        lv.parent_cluster = static_cast<int>(c);
      }
    }
    if (lv.overlap < opt.min_overlap) {
      lv.label = "mixed";
    } else {
      lv.label = std::string(irrep_name(sp.cluster_irreps[lv.parent_cluster]));
      if (m_s != 0 && sp.cluster_irreps[lv.parent_cluster] == Irrep::Eu) {
        // Orbital moment of the component inside the parent doublet.
        const Cluster& cl = sp.clusters[lv.parent_cluster];
        const Eigen::MatrixXcd doublet = ref.eig.eigenvectors.middleCols(cl.begin, cl.size);
        const Eigen::VectorXcd c = doublet.adjoint() * sector.eigenvectors.col(j);
        const double l = (c.adjoint() * electronic_matrix(doublet, lz, d) * c)(0, 0).real();
        lv.label += l > 0.0 ? "+" : "-";
      }
    }
    out.push_back(std::move(lv));
  }
  return out;
}

SocLevels soc_levels(const VibronicSolve& ref, double lambda_u0, double lambda_g0, const AnalysisOptions& opt) {
  const LowestLevels low = lowest_levels(ref);
  const Cluster& eu = ref.spectrum.clusters[low.eu_cluster];
  const double e_eu0 = ref.eig.eigenvalues[eu.begin];
  const double e_a2u0 = ref.eig.eigenvalues[low.a2u_state];

  SocLevels out;
  out.lambda_u0 = lambda_u0;
  out.lambda_g0 = lambda_g0;
  out.levels_ms0 = track_levels(ref, ref.eig, 0, opt);

  SectorSpec s1 = ref.spec;
  s1.soc = {lambda_u0, lambda_g0, +1};
  const SparseHermitian h1 = assemble(s1, ref.basis);
  const EigResult r1 = solve_lowest(h1, std::min<int>(opt.k, h1.dim()), opt.solver);
  out.levels_ms1 = track_levels(ref, r1, +1, opt);

  const Eigen::MatrixXd ov = (ref.eig.eigenvectors.adjoint() * r1.eigenvectors).cwiseAbs2();
  int a2u = -1;
  double a2u_w = 0.0;
  std::vector<int> eu_derived;
  for (int j = 0; j < r1.size(); ++j) {
    const double wa = ov(low.a2u_state, j);
    if (wa > a2u_w) a2u_w = wa, a2u = j;
    if (ov.col(j).segment(eu.begin, eu.size).sum() >= opt.min_overlap) eu_derived.push_back(j);
  }
  if (a2u < 0 || a2u_w < opt.min_overlap) {
    std::ostringstream os;
    os << "state tracking failed: best overlap with the A2u level is " << a2u_w;
    throw SolverFailure(os.str());
  }
  if (eu_derived.size() < 2) {
    std::ostringstream os;
    os << "state tracking failed: " << eu_derived.size() << " of 2 Eu-derived levels found at m_s = +1";
    throw SolverFailure(os.str());
  }
  const double e_lo = r1.eigenvalues[eu_derived[0]];
  const double e_hi = r1.eigenvalues[eu_derived[1]];
  const double e_a2u1 = r1.eigenvalues[a2u];
  const double eu_any = std::min(e_lo, e_eu0);
  out.lambda_eff = e_hi - e_lo;
  out.gamma2_soc = eu_any - std::min(e_a2u1, e_a2u0);
  out.gamma2_soc_ms0 = eu_any - e_a2u0;
  out.a2u_ms_split = e_a2u1 - e_a2u0;
  out.zpl_shift_ev = (eu_any - e_eu0) * 1e-3;
  return out;
}

SocCalibration calibrate_soc(const VibronicSolve& ref, double target, double ratio, const AnalysisOptions& opt) {
  if (!(target >= 0.0) || !std::isfinite(target)) throw InvalidInput("calibration target must be non-negative");
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw InvalidInput("calibration ratio must be non-negative");
  SocCalibration out;
  if (target == 0.0) {
    out.levels = soc_levels(ref, 0.0, 0.0, opt);
    return out;
  }
  const auto lam = [&](double s) { return soc_levels(ref, s * ratio, s, opt).lambda_eff; };
  const ReductionFactors p = reduction_factors(ref);
  const double linear = p.p_u * ratio + p.p_g;
  const double s0 = linear > 0.0 ? target / linear : target;

  out.scan.push_back({0.0, 0.0});
  double lo = 0.0, hi = -1.0, f_lo = -target, f_hi = 0.0;
  for (int j = -2; j <= 12; ++j) {
    const double s = std::ldexp(s0, j);
    const double l = lam(s);
    out.scan.push_back({s, l});
    if (l <= out.scan[out.scan.size() - 2].lambda_eff) {
      std::ostringstream os;
      os << "SOC calibration: lambda_eff is not increasing over the scan:";
      for (const auto& q : out.scan) os << " (" << q.s << ", " << q.lambda_eff << ")";
      throw SolverFailure(os.str());
    }
    if (l < target) {
      lo = s;
      f_lo = l - target;
    } else {
      hi = s;
      f_hi = l - target;
      break;
    }
  }
  if (hi < 0.0) {
    std::ostringstream os;
    os << "SOC calibration: no bracket for target " << target << ":";
    for (const auto& q : out.scan) os << " (" << q.s << ", " << q.lambda_eff << ")";
    throw SolverFailure(os.str());
  }
  double s = hi;
  if (f_hi != 0.0) {
    std::uintmax_t iters = 100;
    const auto root = boost::math::tools::toms748_solve([&](double x) { return lam(x) - target; }, lo, hi, f_lo,
                                                        f_hi, boost::math::tools::eps_tolerance<double>(40), iters);
    s = 0.5 * (root.first + root.second);
  }
  out.lambda_u0 = s * ratio;
  out.lambda_g0 = s;
  out.levels = soc_levels(ref, out.lambda_u0, out.lambda_g0, opt);
  out.lambda_eff = out.levels.lambda_eff;
  if (std::abs(out.lambda_eff - target) > 1e-6 * target) {
    std::ostringstream os;
    os << "SOC calibration: reached lambda_eff " << out.lambda_eff << " for target " << target;
    throw SolverFailure(os.str());
  }
  return out;
}

SecondOrderShift second_order_shift(const DefectParams& p, CorrelationPreset preset, int cutoff,
                                    const AnalysisOptions& opt) {
  SecondOrderShift out;
  const SectorSpec s1 = sector_for(p, 1, preset, cutoff);
  const SectorSpec s2 = sector_for(p, 2, preset, cutoff);
  const int k = std::max(1, std::min(opt.k, 2));
  out.lowest_order1 = solve_sector(s1, k, opt.solver).eigenvalues[0];
  out.lowest_order2 = solve_sector(s2, k, opt.solver).eigenvalues[0];
  out.surface_min_order1 = lowest_surface_minimum(s1.couplings, p.lambda, preset).energy;
  out.surface_min_order2 = lowest_surface_minimum(s2.couplings, p.lambda, preset).energy;
  return out;
}

Observable parse_observable(const std::string& name) {
  if (name == "gamma1") return Observable::Gamma1;
  if (name == "gamma2") return Observable::Gamma2;
  if (name == "p_u") return Observable::PU;
  if (name == "p_g") return Observable::PG;
  if (name == "lowest") return Observable::Lowest;
  throw InvalidInput("unknown observable '" + name + "' (gamma1, gamma2, p_u, p_g, lowest)");
}

std::string observable_name(Observable o) {
  switch (o) {
    case Observable::Gamma1: return "gamma1";
    case Observable::Gamma2: return "gamma2";
    case Observable::PU: return "p_u";
    case Observable::PG: return "p_g";
    default: return "lowest";
  }
}

double observable_value(Observable o, const DefectParams& p, CorrelationPreset preset, int cutoff,
                        const AnalysisOptions& opt) {
  const int order = o == Observable::Gamma1 ? 1 : 2;
  const VibronicSolve s = solve_vibronic(sector_for(p, order, preset, cutoff), opt);
  switch (o) {
    case Observable::Gamma1:
    case Observable::Gamma2: return gamma_splitting(s);
    case Observable::PU: return reduction_factors(s).p_u;
    case Observable::PG: return reduction_factors(s).p_g;
    default: return s.eig.eigenvalues[0];
  }
}

}  // namespace pjt
