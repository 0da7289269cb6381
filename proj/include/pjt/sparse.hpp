#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pjt/kernels.hpp"

namespace pjt {

using cdouble = std::complex<double>;

struct Triplet {
  std::int32_t row;
  std::int32_t col;
  cdouble value;
};

// Hermitian matrix in CSR form. Values are stored as real doubles when every
// entry is real (real_only), otherwise as complex doubles. Duplicate triplets
// are summed; exact zeros are dropped.
class SparseHermitian {
 public:
  SparseHermitian() = default;
  static SparseHermitian from_triplets(std::int32_t dim, std::vector<Triplet> entries);

  std::int32_t dim() const { return dim_; }
  bool real_only() const { return real_only_; }
  std::size_t nonzeros() const { return col_.size(); }
  std::int32_t max_row_nonzeros() const;

  // y = H x. The real overload requires real_only().
  void apply(std::span<const double> x, std::span<double> y) const;
  void apply(std::span<const cdouble> x, std::span<cdouble> y) const;

  cdouble at(std::int32_t row, std::int32_t col) const;
  Eigen::MatrixXcd to_dense() const;
  // Maximum |H_ij - conj(H_ji)| over stored entries.
  double hermiticity_defect() const;
  // Max absolute row sum, an upper bound on the spectral radius.
  double norm_inf() const;

  // Text dump "row col re im", one entry per line, 0-based, row-major.
  void write_triplets(std::ostream& os) const;

  kernels::CsrView<double> real_view() const { return {row_ptr_, col_, real_values_}; }
  kernels::CsrView<cdouble> complex_view() const { return {row_ptr_, col_, complex_values_}; }

 private:
  std::int32_t dim_ = 0;
  bool real_only_ = true;
  std::vector<std::int32_t> row_ptr_{0};
  std::vector<std::int32_t> col_;
  std::vector<double> real_values_;
  std::vector<cdouble> complex_values_;
};

}  // namespace pjt
