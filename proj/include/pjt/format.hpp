#pragma once

#include <cstdio>
#include <string>

namespace pjt {

// Energies in meV and ZPL values in eV are written with 6 significant digits.
inline std::string sig6(double v) {
  char buf[32];
  if (v == 0.0) v = 0.0;  // no "-0"
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace pjt
