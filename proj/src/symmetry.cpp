#include "pjt/symmetry.hpp"

#include <cmath>
#include <ostream>

#include "pjt/format.hpp"

namespace pjt {

FullOperator kron_electronic(const Mat4& el, const OscMatrix& osc) {
  const std::int32_t d = static_cast<std::int32_t>(osc.rows());
  std::vector<Eigen::Triplet<double, std::int32_t>> t;
  for (int ep = 0; ep < 4; ++ep)
    for (int e = 0; e < 4; ++e) {
      if (el(ep, e) == 0.0) continue;
      for (std::int32_t kp = 0; kp < d; ++kp)
        for (OscMatrix::InnerIterator it(osc, kp); it; ++it)
          t.emplace_back(ep * d + kp, e * d + it.col(), el(ep, e) * it.value());
    }
  FullOperator m(4 * d, 4 * d);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  return m;
}

SymmetryOperators SymmetryOperators::build(const OscBasis& basis) {
  return {kron_electronic(electronic::c3(), c3_rotation(basis).matrix),
          kron_electronic(electronic::c2prime(), c2prime_reflection(basis).matrix)};
}

double commutator_max_norm(const SparseHermitian& h, const FullOperator& r) {
  using CSparse = Eigen::SparseMatrix<cdouble, Eigen::RowMajor, std::int32_t>;
  std::vector<Eigen::Triplet<cdouble, std::int32_t>> t;
  const auto view = h.complex_view();
  for (std::int32_t i = 0; i < view.rows(); ++i)
    for (std::int32_t p = view.row_ptr[i]; p < view.row_ptr[i + 1]; ++p) t.emplace_back(i, view.col[p], view.values[p]);
  CSparse hs(h.dim(), h.dim());
  hs.setFromTriplets(t.begin(), t.end());
  const CSparse rc = r.cast<cdouble>();
  const CSparse c = CSparse(hs * rc) - CSparse(rc * hs);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < c.outerSize(); ++i)
    for (CSparse::InnerIterator it(c, i); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

std::string_view irrep_name(Irrep r) {
  switch (r) {
    case Irrep::A1u: return "A1u";
    case Irrep::A2u: return "A2u";
    case Irrep::Eu: return "Eu";
    default: return "mixed";
  }
}

Characters characters(const Eigen::MatrixXcd& cluster, const SymmetryOperators& ops) {
  const Eigen::MatrixXcd rc3 = ops.c3.cast<cdouble>() * cluster;
  const Eigen::MatrixXcd rc2 = ops.c2prime.cast<cdouble>() * cluster;
  const cdouble x3 = (cluster.adjoint() * rc3).trace();
  const cdouble x2 = (cluster.adjoint() * rc2).trace();
  return {x3.real(), x2.real(), std::max(std::abs(x3.imag()), std::abs(x2.imag()))};
}

Irrep irrep_label(const Eigen::MatrixXcd& cluster, const SymmetryOperators& ops, double tol) {
  const Characters ch = characters(cluster, ops);
  if (ch.imag_defect > tol) return Irrep::Mixed;
  const auto near = [tol](double a, double b) { return std::abs(a - b) < tol; };
  if (cluster.cols() == 1 && near(ch.c3, 1.0)) {
    if (near(ch.c2prime, 1.0)) return Irrep::A1u;
    if (near(ch.c2prime, -1.0)) return Irrep::A2u;
  }
  if (cluster.cols() == 2 && near(ch.c3, -1.0) && near(ch.c2prime, 0.0)) return Irrep::Eu;
  return Irrep::Mixed;
}

Composition electronic_composition(const Eigen::VectorXcd& state, std::int32_t dim_osc) {
  const Mat4 s = electronic::symmetry_adapted();
  std::array<double, 4> w{};
  for (std::int32_t k = 0; k < dim_osc; ++k)
    for (int c = 0; c < 4; ++c) {
      cdouble amp = 0.0;
      for (int e = 0; e < 4; ++e) amp += s(c, e) * state[e * dim_osc + k];
      w[c] += std::norm(amp);
    }
  const double total = w[0] + w[1] + w[2] + w[3];
  return {w[0] / total, w[1] / total, (w[2] + w[3]) / total};
}

Displacement mean_displacement(const Eigen::VectorXcd& state, const OscBasis& basis, double length_scale) {
  const QuadraticOperators q = quadratic_operators(basis);
  const OscMatrix r2 = q.x2.matrix + q.y2.matrix;
  const std::int32_t d = basis.dim();
  double expect = 0.0;
  for (int e = 0; e < 4; ++e) {
    const Eigen::VectorXcd seg = state.segment(e * d, d);
    expect += seg.dot(r2 * seg).real();
  }
  expect /= state.squaredNorm();
  Displacement out;
  out.raw = std::sqrt(std::max(0.0, expect));
  out.zp_subtracted = std::sqrt(std::max(0.0, expect - 1.0));
  out.raw_angstrom = out.raw * length_scale;
  out.zp_subtracted_angstrom = out.zp_subtracted * length_scale;
  return out;
}

LabeledSpectrum label_spectrum(const EigResult& res, const OscBasis& basis, double length_scale,
                               double cluster_tol) {
  LabeledSpectrum out;
  out.clusters = cluster_degeneracies(res, cluster_tol);
  const SymmetryOperators ops = SymmetryOperators::build(basis);
  for (std::size_t c = 0; c < out.clusters.count(); ++c) {
    const Cluster& cl = out.clusters[c];
    const Eigen::MatrixXcd block = res.eigenvectors.middleCols(cl.begin, cl.size);
    out.cluster_characters.push_back(characters(block, ops));
    out.cluster_irreps.push_back(irrep_label(block, ops));
    for (int j = cl.begin; j < cl.end(); ++j) {
      VibronicState s;
      s.energy = res.eigenvalues[j];
      s.coefficients = res.eigenvectors.col(j);
      s.irrep = out.cluster_irreps.back();
      s.cluster = static_cast<int>(c);
      s.composition = electronic_composition(s.coefficients, basis.dim());
      s.displacement = mean_displacement(s.coefficients, basis, length_scale);
      out.states.push_back(std::move(s));
    }
  }
  return out;
}

void write_composition_csv(std::ostream& os, const LabeledSpectrum& sp) {
  os << "index,energy_mev,energy_rel_mev,cluster,irrep,w_a1u,w_a2u,w_eu,r_raw,r_zp,r_raw_angstrom,r_zp_angstrom\n";
  const double e0 = sp.states.empty() ? 0.0 : sp.states.front().energy;
  for (std::size_t i = 0; i < sp.states.size(); ++i) {
    const VibronicState& s = sp.states[i];
    os << i << ',' << sig6(s.energy) << ',' << sig6(s.energy - e0) << ',' << s.cluster << ','
       << irrep_name(s.irrep) << ',' << sig6(s.composition[0]) << ',' << sig6(s.composition[1]) << ','
       << sig6(s.composition[2]) << ',' << sig6(s.displacement.raw) << ',' << sig6(s.displacement.zp_subtracted)
       << ',' << sig6(s.displacement.raw_angstrom) << ',' << sig6(s.displacement.zp_subtracted_angstrom) << '\n';
  }
}

}  // namespace pjt
