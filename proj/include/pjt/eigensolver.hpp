#pragma once

// Lowest eigenpairs of SparseHermitian matrices.
//
// solve_lowest() runs a thick-restart block Lanczos iteration with full
// reorthogonalization and falls back to dense diagonalization for small
// matrices. Eigenvectors are always returned as complex columns.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "pjt/error.hpp"
#include "pjt/hamiltonian.hpp"
#include "pjt/sparse.hpp"

namespace pjt {

struct SolverOptions {
  double tol = 1e-10;              // residual bound relative to norm_inf(H)
  std::int32_t dense_threshold = 500;
  int max_restarts = 2000;
  std::uint64_t seed = 20240611;
  int block_size = 0;              // 0: chosen from k
  int max_basis = 0;               // 0: chosen from k and the block size
};

struct EigResult {
  Eigen::VectorXd eigenvalues;     // ascending, meV
  Eigen::MatrixXcd eigenvectors;   // orthonormal columns
  Eigen::VectorXd residual_norms;  // ||H v - lambda v||
  int cutoff_used = -1;
  int restarts = 0;
  bool dense = false;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

// Carries the residuals reached when the iteration gave up.
class ConvergenceFailure : public SolverFailure {
 public:
  ConvergenceFailure(const std::string& what, Eigen::VectorXd residuals)
      : SolverFailure(what), residuals_(std::move(residuals)) {}
  const Eigen::VectorXd& residuals() const { return residuals_; }

 private:
  Eigen::VectorXd residuals_;
};

EigResult solve_lowest(const SparseHermitian& h, int k, const SolverOptions& opt = {});
EigResult dense_solve(const SparseHermitian& h, int k);

// Builds the basis for spec.cutoff, assembles and solves.
EigResult solve_sector(const SectorSpec& spec, int k, const SolverOptions& opt = {});

struct Cluster {
  int begin = 0;
  int size = 0;
  int end() const { return begin + size; }
};

struct DegeneracyClusters {
  std::vector<Cluster> clusters;
  std::size_t count() const { return clusters.size(); }
  const Cluster& operator[](std::size_t i) const { return clusters[i]; }
};

// Neighbouring eigenvalues closer than cluster_tol share a cluster.
DegeneracyClusters cluster_degeneracies(const Eigen::VectorXd& eigenvalues, double cluster_tol);
DegeneracyClusters cluster_degeneracies(const EigResult& res, double cluster_tol);

struct ConvergenceOptions {
  double rel_tol = 0.01;
  int n_start = 20;
  int n_step = 5;
  int n_max = 60;
};

struct ConvergencePoint {
  int cutoff;
  double value;
};

struct ConvergenceResult {
  double value = 0.0;  // value at `cutoff`
  int cutoff = 0;      // first cutoff whose successor agrees within rel_tol
  std::vector<ConvergencePoint> history;
};

// Raised when n_max is reached; carries the history.
class CutoffNotConverged : public SolverFailure {
 public:
  CutoffNotConverged(const std::string& what, std::vector<ConvergencePoint> history)
      : SolverFailure(what), history_(std::move(history)) {}
  const std::vector<ConvergencePoint>& history() const { return history_; }

 private:
  std::vector<ConvergencePoint> history_;
};

ConvergenceResult converge_cutoff(const std::function<double(int)>& observable, const ConvergenceOptions& opt);

}  // namespace pjt
