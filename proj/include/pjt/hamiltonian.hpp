#pragma once

// Spin-vibronic Hamiltonian of one m_s sector,
//   H = H_osc + H_pJT (linear + quadratic) + W + m_s H_SOC,
// over (electronic x oscillator) space with index e * dim_osc + k.
//
// Electronic ordering: e = 2 * i_g + i_u with i_u, i_g in {x = 0, y = 1}:
//   e0 = |u_x g_x>, e1 = |u_y g_x>, e2 = |u_x g_y>, e3 = |u_y g_y>.
// Symmetry-adapted states (first label u, second g):
//   A2u  = (|xx> + |yy>)/sqrt2     A1u  = (|xy> - |yx>)/sqrt2
//   Eu,1 = (|xx> - |yy>)/sqrt2     Eu,2 = (|xy> + |yx>)/sqrt2

#include <array>
#include <string_view>

#include <Eigen/Dense>

#include "pjt/oscillator.hpp"
#include "pjt/params.hpp"
#include "pjt/sparse.hpp"

namespace pjt {

using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Mat4 = Eigen::Matrix4d;

namespace pauli {
Mat2c s0();
Mat2c sx();
Mat2c sy();
Mat2c sz();
}  // namespace pauli

// A acting on the e_u doublet (fast index), identity on e_g.
Mat4c op_on_u(const Mat2c& a);
// B acting on the e_g doublet (slow index), identity on e_u.
Mat4c op_on_g(const Mat2c& b);

enum class ElectronicState { A1u = 0, A2u = 1, Eu1 = 2, Eu2 = 3 };

namespace electronic {
// Row s holds the product-basis coefficients of symmetry-adapted state s
// (ordered A1u, A2u, Eu1, Eu2). Orthogonal.
Mat4 symmetry_adapted();
Mat4 projector(ElectronicState s);
// Rotation by 2 pi / 3 applied to both doublets; matches c3_rotation() on the oscillator.
Mat4 c3();
// Reflection Q_y -> -Q_y: diag(1,-1) on e_u and diag(-1,1) on e_g.
Mat4 c2prime();
}  // namespace electronic

enum class CorrelationPreset { ERaised, ASplit };

std::string_view preset_name(CorrelationPreset p);
// Accepts "e-raised" / "a-split". Throws InvalidInput otherwise.
CorrelationPreset parse_preset(std::string_view s);

struct SectorSpec {
  Couplings couplings;
  double lambda = 0.0;
  SocParams soc;
  int cutoff = 0;
  CorrelationPreset preset = CorrelationPreset::ERaised;

  void validate() const;
};

// ERaised: Lambda (P_Eu1 + P_Eu2). ASplit: Lambda P_A1u - Lambda P_A2u.
Mat4 build_correlation(double lambda, CorrelationPreset preset);
// m_s (lambda_u0/2 sigma_y x 1 + lambda_g0/2 1 x sigma_y).
Mat4c build_soc(const SocParams& soc);

// Electron-phonon coupling only (no oscillator energy, no W, no SOC).
SparseHermitian build_pjt(const SectorSpec& spec, const OscBasis& basis);
SparseHermitian assemble(const SectorSpec& spec, const OscBasis& basis);

// The 4x4 electronic matrix of the pJT coupling at classical displacement (qx, qy).
Mat4 electronic_coupling(const Couplings& c, double qx, double qy);

}  // namespace pjt
