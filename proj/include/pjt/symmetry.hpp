#pragma once

// D3d labeling of vibronic eigenstates and their electronic-channel analysis.

#include <array>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "pjt/eigensolver.hpp"
#include "pjt/hamiltonian.hpp"
#include "pjt/oscillator.hpp"
#include "pjt/sparse.hpp"

namespace pjt {

using FullOperator = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int32_t>;

// (electronic) x (oscillator) representations of the group generators on the sector space.
struct SymmetryOperators {
  FullOperator c3;
  FullOperator c2prime;

  static SymmetryOperators build(const OscBasis& basis);
};

FullOperator kron_electronic(const Mat4& el, const OscMatrix& osc);

// max |(H R - R H)_ij|.
double commutator_max_norm(const SparseHermitian& h, const FullOperator& r);

enum class Irrep { A1u, A2u, Eu, Mixed };
std::string_view irrep_name(Irrep r);

struct Characters {
  double c3 = 0.0;
  double c2prime = 0.0;
  double imag_defect = 0.0;  // largest |Im chi|; zero for a representation
};

// Traces of the cluster-projected operators.
Characters characters(const Eigen::MatrixXcd& cluster, const SymmetryOperators& ops);

inline constexpr double kCharacterTolerance = 0.05;

// Dimension-1 clusters: A-type if chi(C3) ~ 1, A1u for chi(C2') ~ +1, A2u for ~ -1.
// Dimension-2 clusters with chi(C3) ~ -1 and chi(C2') ~ 0: Eu. Anything else is Mixed.
Irrep irrep_label(const Eigen::MatrixXcd& cluster, const SymmetryOperators& ops,
                  double tol = kCharacterTolerance);

// Channel weights {A1u, A2u, Eu}; Eu sums both partners.
using Composition = std::array<double, 3>;
Composition electronic_composition(const Eigen::VectorXcd& state, std::int32_t dim_osc);

struct Displacement {
  double raw = 0.0;        // sqrt(<X^2 + Y^2>)
  double zp_subtracted = 0.0;  // sqrt(max(0, <X^2 + Y^2> - 1))
  double raw_angstrom = 0.0;
  double zp_subtracted_angstrom = 0.0;
};

Displacement mean_displacement(const Eigen::VectorXcd& state, const OscBasis& basis, double length_scale_angstrom);

struct VibronicState {
  double energy = 0.0;
  Eigen::VectorXcd coefficients;
  Irrep irrep = Irrep::Mixed;
  int cluster = -1;
  Composition composition{};
  Displacement displacement;
};

struct LabeledSpectrum {
  std::vector<VibronicState> states;
  DegeneracyClusters clusters;
  std::vector<Irrep> cluster_irreps;
  std::vector<Characters> cluster_characters;
};

// Labels each degeneracy cluster of a solve on `basis`.
LabeledSpectrum label_spectrum(const EigResult& res, const OscBasis& basis, double length_scale_angstrom,
                               double cluster_tol);

// One row per state: energy, relative energy, label, composition, displacement.
void write_composition_csv(std::ostream& os, const LabeledSpectrum& spectrum);

}  // namespace pjt
