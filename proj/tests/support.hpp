#pragma once

#include <array>
#include <string>

#include "pjt/params.hpp"

namespace pjt::test {

// Table 1 inputs.
inline DefectParams defect(const std::string& name) {
  DefectParams p;
  p.name = name;
  if (name == "SiV0") {
    p.hbar_omega_e = 87.3, p.lambda = 81.6, p.e_jt = {258, 0.289}, p.delta_jt = {82.2, 0.147};
    p.rho0_angstrom = BranchPair{0.171, -0.006}, p.zpl_baseline_ev = 1.361;
  } else if (name == "GeV0") {
    p.hbar_omega_e = 86.6, p.lambda = 86.4, p.e_jt = {244, 4.61}, p.delta_jt = {75.5, 0.307};
    p.rho0_angstrom = BranchPair{0.166, -0.022}, p.zpl_baseline_ev = 1.813;
  } else if (name == "SnV0") {
    p.hbar_omega_e = 87.7, p.lambda = 98.2, p.e_jt = {217, 14.9}, p.delta_jt = {63.5, 0.226};
    p.rho0_angstrom = BranchPair{0.154, -0.038}, p.zpl_baseline_ev = 1.833;
  } else {
    p.hbar_omega_e = 90.8, p.lambda = 112.5, p.e_jt = {200, 29.9}, p.delta_jt = {64.5, 2.18};
    p.rho0_angstrom = BranchPair{0.145, -0.051}, p.zpl_baseline_ev = 2.216;
  }
  return p;
}

inline const std::array<std::string, 4>& defect_names() {
  static const std::array<std::string, 4> n{"SiV0", "GeV0", "SnV0", "PbV0"};
  return n;
}

}  // namespace pjt::test
