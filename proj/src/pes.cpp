#include "pjt/pes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "pjt/error.hpp"

namespace pjt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Mat4& sz_u() {
  static const Mat4 m = op_on_u(pauli::sz()).real();
  return m;
}
const Mat4& sz_g() {
  static const Mat4 m = op_on_g(pauli::sz()).real();
  return m;
}

struct Tracked {
  std::vector<Eigen::Vector4d> energy;  // energy[i][track]
  std::vector<Mat4> vectors;            // vectors[i].col(track)
};

bool has_degeneracy(const Eigen::Vector4d& e) {
  for (int j = 1; j < 4; ++j)
    if (e[j] - e[j - 1] < 1e-9 * (1.0 + std::abs(e[j]))) return true;
  return false;
}

// Follows eigenpairs along q by maximal summed overlap with the latest non-degenerate point.
template <class MatrixAt>
Tracked track(const std::vector<double>& q, MatrixAt&& matrix_at) {
  Tracked out;
  out.energy.reserve(q.size());
  out.vectors.reserve(q.size());
  Mat4 ref;
  bool have_ref = false;
  bool ref_clean = false;
  for (double qi : q) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(matrix_at(qi));
    const Eigen::Vector4d e = es.eigenvalues();
    const Mat4 v = es.eigenvectors();
    std::array<int, 4> perm{0, 1, 2, 3};
    if (have_ref) {
      const Mat4 ov = (ref.transpose() * v).cwiseAbs2();
      std::array<int, 4> p{0, 1, 2, 3}, best = p;
      double best_score = -1.0;
      do {
        double s = 0.0;
        for (int t = 0; t < 4; ++t) s += ov(t, p[t]);
        if (s > best_score + 1e-12) {
          best_score = s;
          best = p;
        }
      } while (std::next_permutation(p.begin(), p.end()));
      perm = best;
    }
    Eigen::Vector4d et;
    Mat4 vt;
    for (int t = 0; t < 4; ++t) {
      et[t] = e[perm[t]];
      vt.col(t) = v.col(perm[t]);
      if (have_ref && ref.col(t).dot(vt.col(t)) < 0.0) vt.col(t) = -vt.col(t);
    }
    out.energy.push_back(et);
    out.vectors.push_back(vt);
    const bool clean = !has_degeneracy(e);
    if (!have_ref || clean || !ref_clean) {
      ref = vt;
      have_ref = true;
      ref_clean = clean;
    }
  }
  return out;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double parse_number(const std::string& field, std::size_t line) {
  const std::string f = trim(field);
  if (f.empty()) return kNaN;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
    throw InvalidInput("PES CSV line " + std::to_string(line) + ": cannot parse '" + f + "'");
  return v;
}

std::string shortest(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Mat4 adiabatic_matrix(const Couplings& c, double lambda, CorrelationPreset preset, double qx, double qy) {
  return 0.5 * c.hbar_omega_e * (qx * qx + qy * qy) * Mat4::Identity() + electronic_coupling(c, qx, qy) +
         build_correlation(lambda, preset);
}

Eigen::Vector4d adiabatic_energies(const Couplings& c, double lambda, CorrelationPreset preset, double qx,
                                   double qy) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(adiabatic_matrix(c, lambda, preset, qx, qy), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

PesCurve adiabatic_surfaces(const Couplings& c, double lambda, CorrelationPreset preset,
                            const std::vector<double>& grid) {
  PesCurve out;
  out.qx = grid;
  const Tracked t = track(grid, [&](double q) { return adiabatic_matrix(c, lambda, preset, q, 0.0); });
  for (int s = 0; s < 4; ++s) {
    out.energy[s].resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out.energy[s][i] = t.energy[i][s];
  }
  return out;
}

SurfaceMinimum lowest_surface_minimum(const Couplings& c, double lambda, CorrelationPreset preset) {
  const BranchPair rho = branch_minimum_dimensionless(c);
  const double reach = 3.0 * std::max({1.0, std::abs(rho[0]), std::abs(rho[1])}) + 3.0;
  const auto lowest = [&](double q) { return adiabatic_energies(c, lambda, preset, q, 0.0)[0]; };
  constexpr int kScan = 4000;
  int best = 0;
  double best_e = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double e = lowest(-reach + 2.0 * reach * i / kScan);
    if (e < best_e) {
      best_e = e;
      best = i;
    }
  }
  const double h = 2.0 * reach / kScan;
  const double centre = -reach + h * best;
  const auto [q, e] = boost::math::tools::brent_find_minima(lowest, centre - h, centre + h,
                                                            std::numeric_limits<double>::digits / 2);
  return e < best_e ? SurfaceMinimum{q, e} : SurfaceMinimum{centre, best_e};
}

PesCurve read_pes_csv(std::istream& is) {
  PesCurve out;
  std::string line;
  std::size_t lineno = 0;
  bool have_unit = false, have_columns = false;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!have_unit) {
      if (t == "qx_unit=angstrom")
        out.unit = QxUnit::Angstrom;
      else if (t == "qx_unit=dimensionless")
        out.unit = QxUnit::Dimensionless;
      else
        throw InvalidInput("PES CSV: first line must be qx_unit=angstrom or qx_unit=dimensionless");
      have_unit = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!t.empty() && t.back() == ',') fields.emplace_back();
    if (!have_columns) {
      const std::vector<std::string> expect{"qx", "e1_mev", "e2_mev", "e3_mev", "e4_mev"};
      if (fields.size() != expect.size())
        throw InvalidInput("PES CSV: expected columns qx,e1_mev,e2_mev,e3_mev,e4_mev");
      for (std::size_t i = 0; i < expect.size(); ++i)
        if (trim(fields[i]) != expect[i]) throw InvalidInput("PES CSV: unexpected column '" + fields[i] + "'");
      have_columns = true;
      continue;
    }
    if (fields.size() != 5) throw InvalidInput("PES CSV line " + std::to_string(lineno) + ": expected 5 fields");
    const double q = parse_number(fields[0], lineno);
    if (std::isnan(q)) throw InvalidInput("PES CSV line " + std::to_string(lineno) + ": missing qx");
    out.qx.push_back(q);
    for (int s = 0; s < 4; ++s) out.energy[s].push_back(parse_number(fields[s + 1], lineno));
  }
  if (!have_columns) throw InvalidInput("PES CSV: missing header");
  return out;
}

void write_pes_csv(std::ostream& os, const PesCurve& curve) {
  os << "qx_unit=" << (curve.unit == QxUnit::Angstrom ? "angstrom" : "dimensionless") << '\n';
  os << "qx,e1_mev,e2_mev,e3_mev,e4_mev\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    os << shortest(curve.qx[i]);
    for (int s = 0; s < 4; ++s) os << ',' << shortest(curve.energy[s][i]);
    os << '\n';
  }
}

namespace {

using Theta = Eigen::Matrix<double, 7, 1>;
enum : int { kK = 0, kLambda, kF1, kF2, kG1, kG2, kOffset };

Couplings couplings_of(const Theta& t) { return Couplings::from_branches({t[kF1], t[kF2]}, {t[kG1], t[kG2]}, t[kK]); }

bool feasible(const Theta& t) {
  return t[kK] > 0.0 && std::abs(2.0 * t[kG1]) < t[kK] && std::abs(2.0 * t[kG2]) < t[kK] &&
         t.allFinite();
}

struct Problem {
  std::vector<double> q_input;  // sorted ascending, in the input unit
  std::vector<std::size_t> order;
  std::vector<std::array<double, 4>> data;  // per sorted sample
  bool angstrom = false;
  double mass = kDefaultModeMassAmu;
  CorrelationPreset preset = CorrelationPreset::ERaised;
  std::size_t n_res = 0;
};

double dimensionless_q(const Problem& p, double q, double k) {
  return p.angstrom ? q / dimensionless_length_scale(k, p.mass) : q;
}

// Residuals (model - data) and optionally the Jacobian, both over present samples.
void evaluate(const Problem& p, const Theta& t, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
  const Couplings c = couplings_of(t);
  std::vector<double> q(p.q_input.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = dimensionless_q(p, p.q_input[i], t[kK]);
  const Tracked tr = track(q, [&](double qi) { return adiabatic_matrix(c, t[kLambda], p.preset, qi, 0.0); });
  r.resize(static_cast<Eigen::Index>(p.n_res));
  if (jac) jac->setZero(static_cast<Eigen::Index>(p.n_res), 7);
  const Mat4 w1 = build_correlation(1.0, p.preset);
  const Mat4 sum = sz_u() + sz_g(), diff = sz_u() - sz_g();
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double qi = q[i];
    const Mat4 dq = t[kK] * qi * Mat4::Identity() + c.f_u * sz_u() + c.f_g * sz_g() +
                    2.0 * qi * (c.g_u * sz_u() + c.g_g * sz_g());
    for (int s = 0; s < 4; ++s) {
      const double d = p.data[i][s];
      if (std::isnan(d)) continue;
      r[row] = tr.energy[i][s] + t[kOffset] - d;
      if (jac) {
        const Eigen::Vector4d v = tr.vectors[i].col(s);
        double dk = 0.5 * qi * qi;
        if (p.angstrom) dk += v.dot(dq * v) * qi / (2.0 * t[kK]);
        (*jac)(row, kK) = dk;
        (*jac)(row, kLambda) = v.dot(w1 * v);
        (*jac)(row, kF1) = 0.5 * qi * v.dot(sum * v);
        (*jac)(row, kF2) = 0.5 * qi * v.dot(diff * v);
        (*jac)(row, kG1) = 0.5 * qi * qi * v.dot(sum * v);
        (*jac)(row, kG2) = 0.5 * qi * qi * v.dot(diff * v);
        (*jac)(row, kOffset) = 1.0;
      }
      ++row;
    }
  }
}

void check_identifiable(const Eigen::MatrixXd& jac, double rank_tol) {
  Eigen::MatrixXd scaled = jac;
  std::vector<std::string> dead;
  for (int p = 0; p < 7; ++p) {
    const double n = scaled.col(p).norm();
    if (n == 0.0)
      dead.emplace_back(kFitParameterNames[p]);
    else
      scaled.col(p) /= n;
  }
  if (dead.empty()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    for (int j = 0; j < 7; ++j) {
      if (sv[j] > rank_tol * sv[0]) continue;
      for (int p = 0; p < 7; ++p)
        if (std::abs(svd.matrixV()(p, j)) > 0.3) dead.emplace_back(kFitParameterNames[p]);
    }
  }
  if (dead.empty()) return;
  std::sort(dead.begin(), dead.end());
  dead.erase(std::unique(dead.begin(), dead.end()), dead.end());
  std::string msg = "PES fit: parameters not identifiable from the samples (rank-deficient Jacobian):";
  for (const auto& d : dead) msg += " " + d;
  throw IdentifiabilityError(msg);
}

}  // namespace

FitResult fit_pes(const PesCurve& samples, const DefectParams& initial, const FitOptions& opt) {
  const Couplings c0 = pes_to_couplings(initial);
  Problem p;
  p.angstrom = samples.unit == QxUnit::Angstrom;
  p.mass = initial.effective_mass_amu;
  p.preset = opt.preset;
  for (int s = 0; s < 4; ++s)
    if (samples.energy[s].size() != samples.size()) throw InvalidInput("PES samples: ragged energy columns");

  p.order.resize(samples.size());
  std::iota(p.order.begin(), p.order.end(), std::size_t{0});
  std::stable_sort(p.order.begin(), p.order.end(), [&](auto a, auto b) { return samples.qx[a] < samples.qx[b]; });
  std::size_t points = 0, negative = 0, positive = 0;
  for (std::size_t i : p.order) {
    std::array<double, 4> row;
    bool any = false;
    for (int s = 0; s < 4; ++s) {
      row[s] = samples.energy[s][i];
      if (!std::isnan(row[s])) {
        ++p.n_res;
        any = true;
      }
    }
    p.q_input.push_back(samples.qx[i]);
    p.data.push_back(row);
    if (!any) continue;
    ++points;
    if (samples.qx[i] < 0.0) ++negative;
    if (samples.qx[i] > 0.0) ++positive;
  }
  if (points < opt.min_samples)
    throw InvalidInput("PES fit needs at least " + std::to_string(opt.min_samples) + " samples, got " +
                       std::to_string(points));
  if (negative == 0 || positive == 0)
    throw IdentifiabilityError(
        "PES fit: samples cover only one side of Q_x = 0; the destructive branch (F2, G2) is not identifiable");

  Theta t;
  t << c0.hbar_omega_e, initial.lambda, c0.linear(0), c0.linear(1), c0.quadratic(0), c0.quadratic(1), 0.0;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  evaluate(p, t, r, nullptr);
  t[kOffset] = -r.mean();
  evaluate(p, t, r, &jac);
  double cost = 0.5 * r.squaredNorm();

  FitResult out;
  out.cost_history.push_back(cost);
  double mu = -1.0;
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iterations && !converged; ++it) {
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    const double dmax = a.diagonal().maxCoeff();
    if (mu < 0.0) mu = 1e-3;
    if (g.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + dmax) || cost == 0.0) {
      converged = true;
      break;
    }
    for (;;) {
      Eigen::MatrixXd damped = a;
      for (int d = 0; d < 7; ++d) damped(d, d) += mu * std::max(a(d, d), 1e-12 * dmax);
      const Theta step = damped.ldlt().solve(-g);
      const Theta trial = t + step;
      Eigen::VectorXd rt;
      double ct = std::numeric_limits<double>::infinity();
      if (feasible(trial)) {
        evaluate(p, trial, rt, nullptr);
        ct = 0.5 * rt.squaredNorm();
      }
      if (ct < cost) {
        const double rel = step.norm() / (t.norm() + 1e-300);
        t = trial;
        cost = ct;
        out.cost_history.push_back(cost);
        mu = std::max(mu / 3.0, 1e-15);
        evaluate(p, t, r, &jac);
        if (rel < opt.rel_step_tol) converged = true;
        break;
      }
      mu *= 4.0;
      if (mu > 1e16) {  // no descent direction left at working precision
        converged = true;
        break;
      }
    }
  }
  if (!converged)
    throw SolverFailure("PES fit did not converge in " + std::to_string(opt.max_iterations) +
                        " iterations (cost " + std::to_string(cost) + ")");
  check_identifiable(jac, opt.rank_tol);

  if (t[kF1] < 0.0) t[kF1] = -t[kF1], t[kG1] = -t[kG1];
  const double sign2 = c0.linear(1) < 0.0 ? -1.0 : 1.0;
  if (t[kF2] * sign2 < 0.0) t[kF2] = -t[kF2], t[kG2] = -t[kG2];

  out.couplings = couplings_of(t);
  out.lambda = t[kLambda];
  out.offset = t[kOffset];
  out.params = couplings_to_pes(out.couplings, out.lambda, initial.effective_mass_amu);
  out.params.name = initial.name;
  out.params.zpl_baseline_ev = initial.zpl_baseline_ev;
  out.cost = cost;
  out.iterations = it;

  evaluate(p, t, r, nullptr);
  std::array<double, 4> ss{};
  Eigen::Index row = 0;
  for (const auto& d : p.data)
    for (int s = 0; s < 4; ++s) {
      if (std::isnan(d[s])) continue;
      ss[s] += r[row] * r[row];
      ++out.counts[s];
      ++row;
    }
  for (int s = 0; s < 4; ++s) out.rms[s] = out.counts[s] ? std::sqrt(ss[s] / out.counts[s]) : kNaN;
  return out;
}

}  // namespace pjt
