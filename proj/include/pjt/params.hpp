#pragma once

// Model parameters of the E_g x (e_u x e_g) product Jahn-Teller problem and the
// map between potential-energy-surface observables and coupling constants.
//
// Energies are meV throughout; lengths in Angstrom unless a name says
// "dimensionless", in which case they are in units of the oscillator length.
// Branch index 0 is the constructive combination F_u + F_g, index 1 the
// destructive combination F_u - F_g.

#include <array>
#include <optional>
#include <string>

namespace pjt {

inline constexpr double kHbarC_eV_Angstrom = 1973.269804;
inline constexpr double kAmuRestEnergy_eV = 931.49410242e6;
inline constexpr double kDefaultModeMassAmu = 12.0;

using BranchPair = std::array<double, 2>;

struct DefectParams {
  std::string name;
  double hbar_omega_e = 0.0;
  double lambda = 0.0;  // correlation splitting at the D3d point
  BranchPair e_jt{0.0, 0.0};
  BranchPair delta_jt{0.0, 0.0};
  std::optional<BranchPair> rho0_angstrom;  // signed; cross-validation and F2 sign
  std::optional<double> zpl_baseline_ev;
  double effective_mass_amu = kDefaultModeMassAmu;

  // Throws InvalidInput on violated invariants.
  void validate() const;
  double coupling_strength() const { return e_jt[0] / hbar_omega_e; }

  bool operator==(const DefectParams&) const = default;
};

struct Couplings {
  double f_u = 0.0;
  double f_g = 0.0;
  double g_u = 0.0;
  double g_g = 0.0;
  double hbar_omega_e = 0.0;

  double linear(int branch) const { return branch == 0 ? f_u + f_g : f_u - f_g; }
  double quadratic(int branch) const { return branch == 0 ? g_u + g_g : g_u - g_g; }
  static Couplings from_branches(BranchPair f, BranchPair g, double hbar_omega_e);

  // Bounded adiabatic surfaces: |2 G_i| < hbar_omega_e for both branches.
  void validate() const;

  bool operator==(const Couplings&) const = default;
};

struct SocParams {
  double lambda_u0 = 0.0;
  double lambda_g0 = 0.0;
  int m_s = 0;

  void validate() const;
  bool active() const { return m_s != 0 && (lambda_u0 != 0.0 || lambda_g0 != 0.0); }
};

Couplings pes_to_couplings(const DefectParams& p);

// Inverse of pes_to_couplings. lambda, mass and name are carried through;
// rho0_angstrom is filled from the dimensionless minima.
DefectParams couplings_to_pes(const Couplings& c, double lambda = 0.0,
                              double effective_mass_amu = kDefaultModeMassAmu);

// Signed position of each branch minimum along Q_x, F_i / (hbar_omega - 2 G_i).
BranchPair branch_minimum_dimensionless(const Couplings& c);

// Couplings of the linear-only model that keeps each branch minimum where the
// quadratic model puts it: F_i' = hbar_omega * rho0_i, G_i' = 0.
Couplings first_order_couplings(const Couplings& second_order);

// hbar / sqrt(M hbar_omega) in Angstrom.
double dimensionless_length_scale(double hbar_omega_mev, double mass_amu);

}  // namespace pjt
