#pragma once

// Adiabatic potential-energy surfaces of the model at classical displacement
// and the least-squares fit of model parameters to sampled 1D cuts (Q_y = 0).

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pjt/hamiltonian.hpp"
#include "pjt/params.hpp"

namespace pjt {

enum class QxUnit { Dimensionless, Angstrom };

// Four adiabatic energies per coordinate sample. Missing energies are NaN.
struct PesCurve {
  QxUnit unit = QxUnit::Dimensionless;
  std::vector<double> qx;
  std::array<std::vector<double>, 4> energy;

  std::size_t size() const { return qx.size(); }
};

// (hbar_omega/2)(qx^2 + qy^2) 1 + pJT(qx, qy) + W.
Mat4 adiabatic_matrix(const Couplings& c, double lambda, CorrelationPreset preset, double qx, double qy);
// Ascending.
Eigen::Vector4d adiabatic_energies(const Couplings& c, double lambda, CorrelationPreset preset, double qx,
                                   double qy);

// Surfaces along the Q_x cut, continued by eigenvector overlap from ascending order at grid[0].
PesCurve adiabatic_surfaces(const Couplings& c, double lambda, CorrelationPreset preset,
                            const std::vector<double>& grid);

struct SurfaceMinimum {
  double qx = 0.0;
  double energy = 0.0;
};

// Global minimum of the lowest surface on the Q_x axis (one of the three equivalent wells).
SurfaceMinimum lowest_surface_minimum(const Couplings& c, double lambda, CorrelationPreset preset);

PesCurve read_pes_csv(std::istream& is);
void write_pes_csv(std::ostream& os, const PesCurve& curve);

struct FitOptions {
  int max_iterations = 500;
  double rel_step_tol = 1e-13;
  double rank_tol = 1e-8;  // singular-value ratio of the column-scaled Jacobian
  CorrelationPreset preset = CorrelationPreset::ERaised;
  std::size_t min_samples = 20;
};

inline constexpr std::array<const char*, 7> kFitParameterNames = {"hbar_omega_e", "lambda", "F1", "F2",
                                                                  "G1", "G2", "offset"};

struct FitResult {
  Couplings couplings;
  double lambda = 0.0;
  double offset = 0.0;
  DefectParams params;          // couplings_to_pes of the fitted couplings
  std::array<double, 4> rms{};  // per surface, meV; NaN for surfaces without data
  std::array<std::size_t, 4> counts{};
  double cost = 0.0;            // half the sum of squared residuals
  std::vector<double> cost_history;  // accepted steps only
  int iterations = 0;
};

// Levenberg-Marquardt over (hbar_omega, Lambda, F1, F2, G1, G2, offset).
// Throws IdentifiabilityError when a side of Q_x = 0 is not sampled or the
// Jacobian at the solution is rank deficient; SolverFailure on non-convergence.
FitResult fit_pes(const PesCurve& samples, const DefectParams& initial, const FitOptions& opt = {});

}  // namespace pjt
