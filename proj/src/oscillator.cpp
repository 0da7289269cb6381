#include "pjt/oscillator.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "pjt/error.hpp"

namespace pjt {

namespace {

using Entry = Eigen::Triplet<double, std::int32_t>;

OscMatrix from_entries(const OscBasis& basis, const std::vector<Entry>& entries) {
  OscMatrix m(basis.dim(), basis.dim());
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

}  // namespace

OscBasis OscBasis::build(int cutoff, std::size_t matrix_budget) {
  if (cutoff < 0) throw InvalidInput("oscillator cutoff must be non-negative");
  const std::size_t dim = static_cast<std::size_t>(cutoff + 1) * static_cast<std::size_t>(cutoff + 2) / 2;
  if (4 * dim > matrix_budget) {
    throw InvalidInput("cutoff " + std::to_string(cutoff) + " gives total dimension " + std::to_string(4 * dim) +
                       " above the budget of " + std::to_string(matrix_budget));
  }
  OscBasis b;
  b.cutoff_ = cutoff;
  b.dim_ = static_cast<std::int32_t>(dim);
  return b;
}

std::pair<int, int> OscBasis::quanta(std::int32_t k) const {
  int n = static_cast<int>((std::sqrt(8.0 * k + 1.0) - 1.0) / 2.0);
  while (n * (n + 1) / 2 > k) --n;
  while ((n + 1) * (n + 2) / 2 <= k) ++n;
  const int nx = k - n * (n + 1) / 2;
  return {nx, n - nx};
}

OscOperator position_operator(const OscBasis& basis, Axis axis) {
  std::vector<Entry> e;
  const double s = std::numbers::sqrt2 / 2.0;
  for (std::int32_t k = 0; k < basis.dim(); ++k) {
    const auto [nx, ny] = basis.quanta(k);
    const int n = axis == Axis::X ? nx : ny;
    const int dx = axis == Axis::X ? 1 : 0;
    const int dy = 1 - dx;
    if (basis.contains(nx + dx, ny + dy)) e.emplace_back(basis.index(nx + dx, ny + dy), k, s * std::sqrt(n + 1.0));
    if (n > 0) e.emplace_back(basis.index(nx - dx, ny - dy), k, s * std::sqrt(double(n)));
  }
  return {axis == Axis::X ? OscLabel::X : OscLabel::Y, from_entries(basis, e)};
}

QuadraticOperators quadratic_operators(const OscBasis& basis) {
  std::vector<Entry> x2, y2, xy;
  // <m|q^2|n> for one mode: (2n+1)/2 on the diagonal, sqrt((n+1)(n+2))/2 and sqrt(n(n-1))/2 for n -> n+-2.
  auto square = [&](std::vector<Entry>& out, std::int32_t k, int nx, int ny, bool along_x) {
    const int n = along_x ? nx : ny;
    const int dx = along_x ? 2 : 0;
    const int dy = 2 - dx;
    out.emplace_back(k, k, n + 0.5);
    if (basis.contains(nx + dx, ny + dy)) out.emplace_back(basis.index(nx + dx, ny + dy), k, 0.5 * std::sqrt((n + 1.0) * (n + 2.0)));
    if (n >= 2) out.emplace_back(basis.index(nx - dx, ny - dy), k, 0.5 * std::sqrt(n * (n - 1.0)));
  };
  for (std::int32_t k = 0; k < basis.dim(); ++k) {
    const auto [nx, ny] = basis.quanta(k);
    square(x2, k, nx, ny, true);
    square(y2, k, nx, ny, false);
    for (int sx : {-1, 1}) {
      for (int sy : {-1, 1}) {
        const int mx = nx + sx, my = ny + sy;
        if (!basis.contains(mx, my)) continue;
        const double fx = std::sqrt(0.5 * (sx > 0 ? nx + 1 : nx));
        const double fy = std::sqrt(0.5 * (sy > 0 ? ny + 1 : ny));
        xy.emplace_back(basis.index(mx, my), k, fx * fy);
      }
    }
  }
  return {{OscLabel::X2, from_entries(basis, x2)},
          {OscLabel::Y2, from_entries(basis, y2)},
          {OscLabel::XY, from_entries(basis, xy)}};
}

OscOperator number_operator(const OscBasis& basis) {
  std::vector<Entry> e;
  for (std::int32_t k = 0; k < basis.dim(); ++k) {
    const auto [nx, ny] = basis.quanta(k);
    e.emplace_back(k, k, double(nx + ny));
  }
  return {OscLabel::N, from_entries(basis, e)};
}

OscOperator c3_rotation(const OscBasis& basis) {
  // Per shell, diagonalize the angular momentum L = i(a_x^+ a_y - a_y^+ a_x) (the circular basis, integer
  // eigenvalues l = -n, -n+2, ..., n) and apply the phase exp(-i 2 pi l / 3).
  constexpr double theta = 2.0 * std::numbers::pi / 3.0;
  std::vector<Entry> e;
  for (int n = 0; n <= basis.cutoff(); ++n) {
    const int m = n + 1;
    const std::int32_t first = basis.index(0, n);
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(m, m);
    for (int nx = 0; nx < n; ++nx) {
      // a_x^+ a_y |nx, n-nx> = sqrt((nx+1)(n-nx)) |nx+1, n-nx-1>
      const double amp = std::sqrt((nx + 1.0) * (n - nx));
      l(nx + 1, nx) = std::complex<double>(0.0, amp);
      l(nx, nx + 1) = std::complex<double>(0.0, -amp);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l);
    Eigen::VectorXcd phase(m);
    for (int j = 0; j < m; ++j) {
      const double ell = std::round(es.eigenvalues()(j));
      phase(j) = std::polar(1.0, -theta * ell);
    }
    const Eigen::MatrixXcd u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        if (std::abs(u(r, c).real()) > 1e-15) e.emplace_back(first + r, first + c, u(r, c).real());
  }
  return {OscLabel::C3, from_entries(basis, e)};
}

OscOperator c2prime_reflection(const OscBasis& basis) {
  std::vector<Entry> e;
  for (std::int32_t k = 0; k < basis.dim(); ++k) {
    const auto [nx, ny] = basis.quanta(k);
    e.emplace_back(k, k, ny % 2 == 0 ? 1.0 : -1.0);
  }
  return {OscLabel::C2prime, from_entries(basis, e)};
}

}  // namespace pjt
