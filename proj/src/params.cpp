#include "pjt/params.hpp"

#include <cmath>
#include <sstream>

#include "pjt/error.hpp"

namespace pjt {

namespace {

[[noreturn]] void reject(const std::string& what) { throw InvalidInput(what); }

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void DefectParams::validate() const {
  if (!finite(hbar_omega_e) || hbar_omega_e <= 0.0) reject("hbar_omega_e must be positive");
  if (!finite(lambda)) reject("lambda must be finite");
  if (!finite(effective_mass_amu) || effective_mass_amu <= 0.0) reject("effective mass must be positive");
  for (int i = 0; i < 2; ++i) {
    if (!finite(e_jt[i]) || e_jt[i] < 0.0) reject("e_jt must be non-negative");
    if (!finite(delta_jt[i]) || delta_jt[i] < 0.0) reject("delta_jt must be non-negative");
    if (e_jt[i] == 0.0 && delta_jt[i] == 0.0) continue;
    if (delta_jt[i] >= 2.0 * e_jt[i]) {
      std::ostringstream os;
      os << "branch " << i + 1 << ": delta_jt (" << delta_jt[i] << ") must be below 2*e_jt (" << 2.0 * e_jt[i]
         << ")";
      reject(os.str());
    }
  }
}

Couplings Couplings::from_branches(BranchPair f, BranchPair g, double hbar_omega_e) {
  return Couplings{0.5 * (f[0] + f[1]), 0.5 * (f[0] - f[1]), 0.5 * (g[0] + g[1]), 0.5 * (g[0] - g[1]),
                   hbar_omega_e};
}

void Couplings::validate() const {
  if (!finite(hbar_omega_e) || hbar_omega_e <= 0.0) reject("couplings: hbar_omega_e must be positive");
  for (double v : {f_u, f_g, g_u, g_g})
    if (!finite(v)) reject("couplings must be finite");
  for (int i = 0; i < 2; ++i) {
    if (std::abs(2.0 * quadratic(i)) >= hbar_omega_e) reject("couplings: |2 G| must stay below hbar_omega_e");
  }
}

void SocParams::validate() const {
  if (m_s < -1 || m_s > 1) reject("m_s must be -1, 0 or +1");
  if (!finite(lambda_u0) || !finite(lambda_g0) || lambda_u0 < 0.0 || lambda_g0 < 0.0)
    reject("bare spin-orbit splittings must be non-negative");
}

Couplings pes_to_couplings(const DefectParams& p) {
  p.validate();
  const double k = p.hbar_omega_e;
  BranchPair f{}, g{};
  for (int i = 0; i < 2; ++i) {
    const double e = p.e_jt[i];
    const double d = p.delta_jt[i];
    if (e == 0.0) continue;  // validate() guarantees d == 0 here
    g[i] = d * k / (4.0 * e - 2.0 * d);
    const double stiffness = k - 2.0 * g[i];
    if (stiffness <= 0.0) reject("pes_to_couplings: hbar_omega - 2G is not positive");
    f[i] = std::sqrt(2.0 * e * stiffness);
  }
  if (p.rho0_angstrom && (*p.rho0_angstrom)[1] < 0.0) f[1] = -f[1];
  return Couplings::from_branches(f, g, k);
}

BranchPair branch_minimum_dimensionless(const Couplings& c) {
  const double k = c.hbar_omega_e;
  return {c.linear(0) / (k - 2.0 * c.quadratic(0)), c.linear(1) / (k - 2.0 * c.quadratic(1))};
}

DefectParams couplings_to_pes(const Couplings& c, double lambda, double effective_mass_amu) {
  c.validate();
  const double k = c.hbar_omega_e;
  DefectParams p;
  p.hbar_omega_e = k;
  p.lambda = lambda;
  p.effective_mass_amu = effective_mass_amu;
  const BranchPair rho = branch_minimum_dimensionless(c);
  const double ell = dimensionless_length_scale(k, effective_mass_amu);
  BranchPair rho_a{};
  for (int i = 0; i < 2; ++i) {
    const double f = c.linear(i);
    const double g = c.quadratic(i);
    p.e_jt[i] = f * f / (2.0 * (k - 2.0 * g));
    p.delta_jt[i] = 2.0 * f * f * g / (k * k - 4.0 * g * g);
    rho_a[i] = rho[i] * ell;
  }
  p.rho0_angstrom = rho_a;
  return p;
}

Couplings first_order_couplings(const Couplings& second_order) {
  const BranchPair rho = branch_minimum_dimensionless(second_order);
  const double k = second_order.hbar_omega_e;
  return Couplings::from_branches({k * rho[0], k * rho[1]}, {0.0, 0.0}, k);
}

double dimensionless_length_scale(double hbar_omega_mev, double mass_amu) {
  if (!(hbar_omega_mev > 0.0) || !(mass_amu > 0.0)) reject("length scale needs positive energy and mass");
  return kHbarC_eV_Angstrom / std::sqrt(mass_amu * kAmuRestEnergy_eV * hbar_omega_mev * 1e-3);
}

}  // namespace pjt
