#include "pjt/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pjt/error.hpp"

namespace pjt {

SparseHermitian SparseHermitian::from_triplets(std::int32_t dim, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= dim || t.col < 0 || t.col >= dim) throw InvalidInput("triplet index out of range");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  SparseHermitian h;
  h.dim_ = dim;
  h.row_ptr_.assign(static_cast<std::size_t>(dim) + 1, 0);
  std::vector<cdouble> values;
  values.reserve(entries.size());
  h.col_.reserve(entries.size());

  std::size_t i = 0;
  while (i < entries.size()) {
    const std::int32_t r = entries[i].row;
    const std::int32_t c = entries[i].col;
    cdouble sum = 0.0;
    for (; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i) sum += entries[i].value;
    if (sum == cdouble(0.0)) continue;
    h.col_.push_back(c);
    values.push_back(sum);
    ++h.row_ptr_[static_cast<std::size_t>(r) + 1];
  }
  for (std::int32_t r = 0; r < dim; ++r) h.row_ptr_[r + 1] += h.row_ptr_[r];

  h.real_only_ = std::all_of(values.begin(), values.end(), [](cdouble v) { return v.imag() == 0.0; });
  if (h.real_only_) {
    h.real_values_.reserve(values.size());
    for (cdouble v : values) h.real_values_.push_back(v.real());
  }
  // The complex copy is kept in both cases so complex vectors can be applied to real matrices.
  h.complex_values_ = std::move(values);
  return h;
}

std::int32_t SparseHermitian::max_row_nonzeros() const {
  std::int32_t m = 0;
  for (std::int32_t r = 0; r < dim_; ++r) m = std::max(m, row_ptr_[r + 1] - row_ptr_[r]);
  return m;
}

void SparseHermitian::apply(std::span<const double> x, std::span<double> y) const {
  if (!real_only_) throw InvalidInput("real apply on a complex Hermitian matrix");
  kernels::csr_matvec(real_view(), x, y);
}

void SparseHermitian::apply(std::span<const cdouble> x, std::span<cdouble> y) const {
  kernels::csr_matvec(complex_view(), x, y);
}

cdouble SparseHermitian::at(std::int32_t row, std::int32_t col) const {
  const auto begin = col_.begin() + row_ptr_[row];
  const auto end = col_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return complex_values_[static_cast<std::size_t>(it - col_.begin())];
}

Eigen::MatrixXcd SparseHermitian::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (std::int32_t r = 0; r < dim_; ++r)
    for (std::int32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) m(r, col_[p]) = complex_values_[p];
  return m;
}

double SparseHermitian::hermiticity_defect() const {
  double worst = 0.0;
  for (std::int32_t r = 0; r < dim_; ++r)
    for (std::int32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      worst = std::max(worst, std::abs(complex_values_[p] - std::conj(at(col_[p], r))));
  return worst;
}

double SparseHermitian::norm_inf() const {
  double worst = 0.0;
  for (std::int32_t r = 0; r < dim_; ++r) {
    double s = 0.0;
    for (std::int32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += std::abs(complex_values_[p]);
    worst = std::max(worst, s);
  }
  return worst;
}

void SparseHermitian::write_triplets(std::ostream& os) const {
  const auto old = os.precision(17);
  for (std::int32_t r = 0; r < dim_; ++r)
    for (std::int32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      os << r << ' ' << col_[p] << ' ' << complex_values_[p].real() << ' ' << complex_values_[p].imag() << '\n';
  os.precision(old);
}

}  // namespace pjt
