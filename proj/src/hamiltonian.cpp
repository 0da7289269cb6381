#include "pjt/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "pjt/error.hpp"

namespace pjt {

namespace pauli {
Mat2c s0() { return Mat2c::Identity(); }
Mat2c sx() {
  Mat2c m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
Mat2c sy() {
  Mat2c m;
  m << 0.0, cdouble(0.0, -1.0), cdouble(0.0, 1.0), 0.0;
  return m;
}
Mat2c sz() {
  Mat2c m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

Mat4c op_on_u(const Mat2c& a) {
  Mat4c m = Mat4c::Zero();
  for (int gp = 0; gp < 2; ++gp)
    for (int up = 0; up < 2; ++up)
      for (int u = 0; u < 2; ++u) m(2 * gp + up, 2 * gp + u) = a(up, u);
  return m;
}

Mat4c op_on_g(const Mat2c& b) {
  Mat4c m = Mat4c::Zero();
  for (int gp = 0; gp < 2; ++gp)
    for (int g = 0; g < 2; ++g)
      for (int u = 0; u < 2; ++u) m(2 * gp + u, 2 * g + u) = b(gp, g);
  return m;
}

namespace electronic {

Mat4 symmetry_adapted() {
  const double s = std::numbers::sqrt2 / 2.0;
  Mat4 m;
  // columns: e0=|xx>, e1=|yx>, e2=|xy>, e3=|yy>  (|u g>)
  m << 0.0, -s, s, 0.0,  // A1u = (|xy> - |yx>)/sqrt2
      s, 0.0, 0.0, s,    // A2u = (|xx> + |yy>)/sqrt2
      s, 0.0, 0.0, -s,   // Eu1 = (|xx> - |yy>)/sqrt2
      0.0, s, s, 0.0;    // Eu2 = (|xy> + |yx>)/sqrt2
  return m;
}

Mat4 projector(ElectronicState s) {
  const Eigen::Vector4d v = symmetry_adapted().row(static_cast<int>(s)).transpose();
  return v * v.transpose();
}

Mat4 c3() {
  // The pJT coupling is invariant when the doublets rotate opposite to the oscillator rotation
  // of c3_rotation(); verified by the commutator tests.
  const double t = -2.0 * std::numbers::pi / 3.0;
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return op_on_g(r.cast<cdouble>()).real() * op_on_u(r.cast<cdouble>()).real();
}

Mat4 c2prime() {
  Eigen::Matrix2d ru, rg;
  ru << 1.0, 0.0, 0.0, -1.0;
  rg << -1.0, 0.0, 0.0, 1.0;
  return op_on_g(rg.cast<cdouble>()).real() * op_on_u(ru.cast<cdouble>()).real();
}

}  // namespace electronic

std::string_view preset_name(CorrelationPreset p) { return p == CorrelationPreset::ERaised ? "e-raised" : "a-split"; }

CorrelationPreset parse_preset(std::string_view s) {
  if (s == "e-raised" || s == "E_RAISED") return CorrelationPreset::ERaised;
  if (s == "a-split" || s == "A_SPLIT") return CorrelationPreset::ASplit;
  throw InvalidInput("unknown correlation preset '" + std::string(s) + "' (expected e-raised or a-split)");
}

void SectorSpec::validate() const {
  couplings.validate();
  soc.validate();
  if (cutoff < 0) throw InvalidInput("cutoff must be non-negative");
  if (!std::isfinite(lambda)) throw InvalidInput("lambda must be finite");
}

Mat4 build_correlation(double lambda, CorrelationPreset preset) {
  using electronic::projector;
  if (preset == CorrelationPreset::ERaised)
    return lambda * (projector(ElectronicState::Eu1) + projector(ElectronicState::Eu2));
  return lambda * projector(ElectronicState::A1u) - lambda * projector(ElectronicState::A2u);
}

Mat4c build_soc(const SocParams& soc) {
  soc.validate();
  if (soc.m_s == 0) return Mat4c::Zero();
  return double(soc.m_s) * (0.5 * soc.lambda_u0 * op_on_u(pauli::sy()) + 0.5 * soc.lambda_g0 * op_on_g(pauli::sy()));
}

Mat4 electronic_coupling(const Couplings& c, double qx, double qy) {
  const Mat4 zu = op_on_u(pauli::sz()).real(), xu = op_on_u(pauli::sx()).real();
  const Mat4 zg = op_on_g(pauli::sz()).real(), xg = op_on_g(pauli::sx()).real();
  const double rad = qx * qx - qy * qy;
  const double cross = 2.0 * qx * qy;
  return c.f_u * (qx * zu - qy * xu) + c.f_g * (qx * zg - qy * xg) + c.g_u * (rad * zu + cross * xu) +
         c.g_g * (rad * zg + cross * xg);
}

namespace {

// Appends coeff * (el (x) osc) to the triplet list.
void add_product(std::vector<Triplet>& out, const Mat4c& el, const OscMatrix& osc, double coeff) {
  const std::int32_t d = static_cast<std::int32_t>(osc.rows());
  for (int ep = 0; ep < 4; ++ep) {
    for (int e = 0; e < 4; ++e) {
      const cdouble a = el(ep, e);
      if (a == cdouble(0.0)) continue;
      for (std::int32_t kp = 0; kp < d; ++kp)
        for (OscMatrix::InnerIterator it(osc, kp); it; ++it)
          out.push_back({ep * d + kp, e * d + static_cast<std::int32_t>(it.col()), coeff * a * it.value()});
    }
  }
}

void add_pjt(std::vector<Triplet>& out, const Couplings& c, const OscBasis& basis) {
  const Mat4c zu = op_on_u(pauli::sz()), xu = op_on_u(pauli::sx());
  const Mat4c zg = op_on_g(pauli::sz()), xg = op_on_g(pauli::sx());
  const OscMatrix x = position_operator(basis, Axis::X).matrix;
  const OscMatrix y = position_operator(basis, Axis::Y).matrix;
  if (c.f_u != 0.0) {
    add_product(out, zu, x, c.f_u);
    add_product(out, xu, y, -c.f_u);
  }
  if (c.f_g != 0.0) {
    add_product(out, zg, x, c.f_g);
    add_product(out, xg, y, -c.f_g);
  }
  if (c.g_u != 0.0 || c.g_g != 0.0) {
    const QuadraticOperators q = quadratic_operators(basis);
    const OscMatrix radial = q.x2.matrix - q.y2.matrix;
    const OscMatrix cross = 2.0 * q.xy.matrix;
    if (c.g_u != 0.0) {
      add_product(out, zu, radial, c.g_u);
      add_product(out, xu, cross, c.g_u);
    }
    if (c.g_g != 0.0) {
      add_product(out, zg, radial, c.g_g);
      add_product(out, xg, cross, c.g_g);
    }
  }
}

}  // namespace

SparseHermitian build_pjt(const SectorSpec& spec, const OscBasis& basis) {
  spec.validate();
  std::vector<Triplet> t;
  add_pjt(t, spec.couplings, basis);
  return SparseHermitian::from_triplets(4 * basis.dim(), std::move(t));
}

SparseHermitian assemble(const SectorSpec& spec, const OscBasis& basis) {
  spec.validate();
  if (basis.cutoff() != spec.cutoff) throw InvalidInput("basis cutoff does not match the sector spec");
  const std::int32_t d = basis.dim();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(4 * d) * 24);

  const double k = spec.couplings.hbar_omega_e;
  for (int e = 0; e < 4; ++e)
    for (std::int32_t i = 0; i < d; ++i) {
      const auto [nx, ny] = basis.quanta(i);
      t.push_back({e * d + i, e * d + i, k * (nx + ny + 1.0)});
    }

  Mat4c local = build_correlation(spec.lambda, spec.preset).cast<cdouble>() + build_soc(spec.soc);
  for (int ep = 0; ep < 4; ++ep)
    for (int e = 0; e < 4; ++e) {
      if (local(ep, e) == cdouble(0.0)) continue;
      for (std::int32_t i = 0; i < d; ++i) t.push_back({ep * d + i, e * d + i, local(ep, e)});
    }

  add_pjt(t, spec.couplings, basis);
  return SparseHermitian::from_triplets(4 * d, std::move(t));
}

}  // namespace pjt
