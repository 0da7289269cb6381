#include "pjt/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pjt/kernels.hpp"
#include "pjt/oscillator.hpp"

namespace pjt {

namespace {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

double sq_norm(const double* x, std::int32_t n) {
  std::span<const double> s(x, n);
  return kernels::dot(s, s);
}
double sq_norm(const cdouble* x, std::int32_t n) {
  std::span<const cdouble> s(x, n);
  return kernels::dotc(s, s).real();
}

void apply(const SparseHermitian& h, const double* x, double* y) {
  h.apply(std::span<const double>(x, h.dim()), std::span<double>(y, h.dim()));
}
void apply(const SparseHermitian& h, const cdouble* x, cdouble* y) {
  h.apply(std::span<const cdouble>(x, h.dim()), std::span<cdouble>(y, h.dim()));
}

void scale_inplace(double a, double* x, std::int32_t n) { kernels::scale(a, std::span<double>(x, n)); }
void scale_inplace(double a, cdouble* x, std::int32_t n) { kernels::scale(cdouble(a), std::span<cdouble>(x, n)); }

template <class T>
void fill_random(Eigen::Ref<Vec<T>> v, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = T(nd(rng));
}

// Subspace state for one solve: orthonormal basis V, its image W = H V.
template <class T>
class BlockLanczos {
 public:
  BlockLanczos(const SparseHermitian& h, int k, const SolverOptions& opt)
      : h_(h), n_(h.dim()), k_(k), opt_(opt), rng_(opt.seed) {
    b_ = opt.block_size > 0 ? opt.block_size : std::clamp(k, 2, 4);
    b_ = std::min<std::int32_t>(b_, n_);
    m_ = opt.max_basis > 0 ? opt.max_basis : std::max({60, 3 * k + 4 * b_});
    m_ = std::min<std::int32_t>(m_, n_);
    keep_ = std::min(m_ - b_, std::max(k_ + b_, m_ / 2));
    keep_ = std::max(keep_, std::min(k_, m_));
    v_.resize(n_, m_);
    w_.resize(n_, m_);
    bound_ = std::max(h.norm_inf(), 1e-300) * opt.tol;
  }

  EigResult run() {
    Mat<T> cand(n_, b_);
    for (int j = 0; j < b_; ++j) fill_random<T>(cand.col(j), rng_);
    int restarts = 0;
    Eigen::VectorXd best;
    for (;;) {
      int added = append(cand);
      if (cols_ < m_ && added > 0) {
        cand = w_.middleCols(cols_ - added, added);
        continue;
      }
      // Basis full (or the space is exhausted): Rayleigh-Ritz.
      ritz();
      const int nk = std::min<int>(k_, cols_);
      best = res_.head(nk);
      if ((best.array() <= bound_).all() || cols_ == n_) return finish(nk, restarts);
      if (++restarts > opt_.max_restarts) break;
      restart(cand);
    }
    std::ostringstream os;
    os << "block Lanczos did not converge after " << opt_.max_restarts << " restarts (dim " << n_
       << ", k " << k_ << "); worst residual " << best.maxCoeff() << " vs bound " << bound_;
    throw ConvergenceFailure(os.str(), best);
  }

 private:
  // Orthonormalizes candidate columns against the basis and appends them.
  int append(const Mat<T>& cand) {
    int added = 0;
    for (Eigen::Index j = 0; j < cand.cols() && cols_ < m_; ++j) {
      Vec<T> c = cand.col(j);
      bool ok = false;
      for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
        if (attempt > 0) fill_random<T>(c, rng_);
        const double norm0 = std::sqrt(sq_norm(c.data(), n_));
        if (norm0 == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
          if (cols_ == 0) break;
          const Vec<T> proj = v_.leftCols(cols_).adjoint() * c;
          c.noalias() -= v_.leftCols(cols_) * proj;
        }
        const double norm = std::sqrt(sq_norm(c.data(), n_));
        if (norm > 1e-10 * norm0) {
          scale_inplace(1.0 / norm, c.data(), n_);
          ok = true;
        }
      }
      if (!ok) break;
      v_.col(cols_) = c;
      apply(h_, v_.col(cols_).data(), w_.col(cols_).data());
      ++cols_;
      ++added;
    }
    return added;
  }

  void ritz() {
    Mat<T> t = v_.leftCols(cols_).adjoint() * w_.leftCols(cols_);
    t = (0.5 * (t + t.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat<T>> es(t);
    theta_ = es.eigenvalues();
    y_ = es.eigenvectors();
    const int p = std::min<int>(std::max(keep_, b_ + k_), cols_);
    x_ = v_.leftCols(cols_) * y_.leftCols(p);
    hx_ = w_.leftCols(cols_) * y_.leftCols(p);
    res_.resize(p);
    for (int j = 0; j < p; ++j) {
      Vec<T> r = hx_.col(j) - theta_[j] * x_.col(j);
      res_[j] = std::sqrt(sq_norm(r.data(), n_));
    }
  }

  // Keeps the lowest Ritz pairs; the next block holds residuals of the lowest unconverged pairs.
  void restart(Mat<T>& cand) {
    const int p = std::min<int>(keep_, static_cast<int>(x_.cols()));
    std::vector<int> pick;
    for (int j = 0; j < static_cast<int>(x_.cols()) && static_cast<int>(pick.size()) < b_; ++j)
      if (res_[j] > bound_) pick.push_back(j);
    for (int j = 0; j < static_cast<int>(x_.cols()) && static_cast<int>(pick.size()) < b_; ++j)
      if (std::find(pick.begin(), pick.end(), j) == pick.end()) pick.push_back(j);
    cand.resize(n_, static_cast<Eigen::Index>(pick.size()));
    for (std::size_t i = 0; i < pick.size(); ++i) {
      const int j = pick[i];
      cand.col(i) = hx_.col(j) - theta_[j] * x_.col(j);
    }
    v_.leftCols(p) = x_.leftCols(p);
    w_.leftCols(p) = hx_.leftCols(p);
    cols_ = p;
  }

  EigResult finish(int nk, int restarts) {
    EigResult r;
    r.eigenvalues = theta_.head(nk);
    r.eigenvectors = x_.leftCols(nk).template cast<cdouble>();
    r.residual_norms = res_.head(nk);
    r.restarts = restarts;
    return r;
  }

  const SparseHermitian& h_;
  std::int32_t n_;
  int k_;
  SolverOptions opt_;
  std::mt19937_64 rng_;
  std::int32_t b_ = 0, m_ = 0;
  int keep_ = 0;
  int cols_ = 0;
  double bound_ = 0.0;
  Mat<T> v_, w_, x_, hx_, y_;
  Eigen::VectorXd theta_, res_;
};

}  // namespace

EigResult dense_solve(const SparseHermitian& h, int k) {
  if (k < 1 || k > h.dim()) throw InvalidInput("dense_solve: k must lie in [1, dim]");
  const Eigen::MatrixXcd hd = h.to_dense();
  EigResult r;
  r.dense = true;
  if (h.real_only()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd.real());
    if (es.info() != Eigen::Success) throw SolverFailure("dense eigensolver failed");
    r.eigenvalues = es.eigenvalues().head(k);
    r.eigenvectors = es.eigenvectors().leftCols(k).cast<cdouble>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hd);
    if (es.info() != Eigen::Success) throw SolverFailure("dense eigensolver failed");
    r.eigenvalues = es.eigenvalues().head(k);
    r.eigenvectors = es.eigenvectors().leftCols(k);
  }
  r.residual_norms.resize(k);
  for (int j = 0; j < k; ++j)
    r.residual_norms[j] = (hd * r.eigenvectors.col(j) - r.eigenvalues[j] * r.eigenvectors.col(j)).norm();
  return r;
}

EigResult solve_lowest(const SparseHermitian& h, int k, const SolverOptions& opt) {
  if (k < 1) throw InvalidInput("solve_lowest: k must be at least 1");
  if (k > h.dim()) throw InvalidInput("solve_lowest: k exceeds the matrix dimension");
  if (!(opt.tol > 0.0)) throw InvalidInput("solve_lowest: tolerance must be positive");
  if (h.dim() <= opt.dense_threshold) return dense_solve(h, k);
  if (h.real_only()) return BlockLanczos<double>(h, k, opt).run();
  return BlockLanczos<cdouble>(h, k, opt).run();
}

EigResult solve_sector(const SectorSpec& spec, int k, const SolverOptions& opt) {
  const OscBasis basis = OscBasis::build(spec.cutoff);
  EigResult r = solve_lowest(assemble(spec, basis), k, opt);
  r.cutoff_used = spec.cutoff;
  return r;
}

DegeneracyClusters cluster_degeneracies(const Eigen::VectorXd& ev, double cluster_tol) {
  DegeneracyClusters out;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (i > 0 && ev[i] - ev[i - 1] < cluster_tol)
      ++out.clusters.back().size;
    else
      out.clusters.push_back({static_cast<int>(i), 1});
  }
  return out;
}

DegeneracyClusters cluster_degeneracies(const EigResult& res, double cluster_tol) {
  return cluster_degeneracies(res.eigenvalues, cluster_tol);
}

ConvergenceResult converge_cutoff(const std::function<double(int)>& observable, const ConvergenceOptions& opt) {
  if (opt.n_start < 0 || opt.n_step < 1 || opt.n_max < opt.n_start || !(opt.rel_tol > 0.0))
    throw InvalidInput("converge_cutoff: invalid cutoff schedule");
  ConvergenceResult out;
  for (int n = opt.n_start; n <= opt.n_max; n += opt.n_step) {
    out.history.push_back({n, observable(n)});
    const std::size_t h = out.history.size();
    if (h < 2) continue;
    const ConvergencePoint& prev = out.history[h - 2];
    const double cur = out.history[h - 1].value;
    const double scale = std::max(std::abs(cur), 1e-300);
    if (std::abs(cur - prev.value) <= opt.rel_tol * scale) {
      out.cutoff = prev.cutoff;
      out.value = prev.value;
      return out;
    }
  }
  std::ostringstream os;
  os << "observable not converged to " << opt.rel_tol << " by cutoff " << opt.n_max << ":";
  for (const auto& p : out.history) os << " N=" << p.cutoff << ":" << p.value;
  throw CutoffNotConverged(os.str(), out.history);
}

}  // namespace pjt
