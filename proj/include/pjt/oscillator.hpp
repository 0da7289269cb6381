#pragma once

// Truncated two-dimensional harmonic-oscillator Fock basis {|n_x, n_y>,
// n_x + n_y <= cutoff} and the operators needed by the vibronic Hamiltonian.

#include <cstddef>
#include <cstdint>
#include <utility>

#include <Eigen/SparseCore>

namespace pjt {

// Largest total (electronic x oscillator) dimension accepted by default.
inline constexpr std::size_t kDefaultMatrixBudget = 200000;

class OscBasis {
 public:
  // Rejects (InvalidInput) cutoffs whose 4-fold electronic product exceeds the budget.
  static OscBasis build(int cutoff, std::size_t matrix_budget = kDefaultMatrixBudget);

  int cutoff() const { return cutoff_; }
  std::int32_t dim() const { return dim_; }

  // Enumeration is by shell n = n_x + n_y, then n_x ascending.
  std::int32_t index(int nx, int ny) const { return (nx + ny) * (nx + ny + 1) / 2 + nx; }
  std::pair<int, int> quanta(std::int32_t k) const;
  bool contains(int nx, int ny) const { return nx >= 0 && ny >= 0 && nx + ny <= cutoff_; }

 private:
  int cutoff_ = 0;
  std::int32_t dim_ = 1;
};

enum class OscLabel { X, Y, X2, Y2, XY, N, C3, C2prime };
enum class Axis { X, Y };

using OscMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int32_t>;

struct OscOperator {
  OscLabel label;
  OscMatrix matrix;
};

struct QuadraticOperators {
  OscOperator x2;
  OscOperator y2;
  OscOperator xy;
};

// (a + a^dagger)/sqrt(2) along one axis.
OscOperator position_operator(const OscBasis& basis, Axis axis);
// Exact second-quantized matrix elements projected onto the basis.
QuadraticOperators quadratic_operators(const OscBasis& basis);
OscOperator number_operator(const OscBasis& basis);
// Rotation by 2*pi/3 in the (Q_x, Q_y) plane. Real orthogonal, block-diagonal in n.
OscOperator c3_rotation(const OscBasis& basis);
// Q_y -> -Q_y: diagonal (-1)^{n_y}.
OscOperator c2prime_reflection(const OscBasis& basis);

}  // namespace pjt
