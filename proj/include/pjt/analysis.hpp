#pragma once

// Headline observables: vibronic splittings, Ham reduction factors, SOC-resolved
// levels, SOC calibration and the second-order level shift.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pjt/eigensolver.hpp"
#include "pjt/hamiltonian.hpp"
#include "pjt/oscillator.hpp"
#include "pjt/params.hpp"
#include "pjt/symmetry.hpp"

namespace pjt {

struct AnalysisOptions {
  SolverOptions solver;
  int k = 8;                 // eigenpairs per sector solve
  double cluster_tol = 1e-6;  // meV
  double min_overlap = 0.5;  // state tracking across SOC switch-on
};

// Coupling order 1 keeps each branch minimum (F_i = hbar_omega rho0_i, G = 0); order 2 is the full model.
Couplings couplings_at_order(const Couplings& second_order, int order);
SectorSpec sector_for(const DefectParams& p, int order, CorrelationPreset preset, int cutoff);

// A labeled solve of one sector.
struct VibronicSolve {
  SectorSpec spec;
  OscBasis basis;
  EigResult eig;
  LabeledSpectrum spectrum;
};

VibronicSolve solve_vibronic(const SectorSpec& spec, const AnalysisOptions& opt,
                             double length_scale_angstrom = 1.0);

// Indices of the lowest A2u state and the lowest Eu cluster. Throws SolverFailure
// when the lowest state is not A-type or either level is missing.
struct LowestLevels {
  int a2u_state = -1;
  int eu_cluster = -1;
};
LowestLevels lowest_levels(const VibronicSolve& s);

double gamma_splitting(const VibronicSolve& s);
// spec must have m_s = 0; order rescales the couplings as in couplings_at_order.
double gamma_splitting(const SectorSpec& second_order_spec, int order, const AnalysisOptions& opt);

struct ReductionFactors {
  double p_u = 0.0;
  double p_g = 0.0;
};
ReductionFactors reduction_factors(const VibronicSolve& s);
ReductionFactors reduction_factors(const SectorSpec& spec, const AnalysisOptions& opt);

// One tracked level of an SOC sector.
struct Level {
  int m_s = 0;
  double energy = 0.0;
  std::string label;     // parent irrep, with +/- for Eu-derived levels at m_s != 0
  int parent_cluster = -1;
  double overlap = 0.0;  // weight on the parent cluster of the lambda0 = 0 solve
};

struct SocLevels {
  double lambda_u0 = 0.0;
  double lambda_g0 = 0.0;
  double lambda_eff = 0.0;      // splitting of the two Eu-derived levels at m_s = +1
  double gamma2_soc = 0.0;      // lowest Eu-derived minus lowest A2u-derived, any m_s
  double gamma2_soc_ms0 = 0.0;  // lowest Eu-derived (any m_s) minus A2u at m_s = 0
  double a2u_ms_split = 0.0;    // E(A2u, m_s = +1) - E(A2u, m_s = 0)
  double zpl_shift_ev = 0.0;    // lowest Eu-derived level with SOC minus Eu without SOC
  std::vector<Level> levels_ms0;
  std::vector<Level> levels_ms1;
};

// Tracks the m_s = +1 solve against the lambda0 = 0 reference (which is the m_s = 0 spectrum).
SocLevels soc_levels(const VibronicSolve& reference, double lambda_u0, double lambda_g0,
                     const AnalysisOptions& opt);

// Levels of an SOC sector labeled by maximal overlap with the reference clusters.
std::vector<Level> track_levels(const VibronicSolve& reference, const EigResult& sector, int m_s,
                                const AnalysisOptions& opt);

struct CalibrationScanPoint {
  double s;
  double lambda_eff;
};

struct SocCalibration {
  double lambda_u0 = 0.0;
  double lambda_g0 = 0.0;
  double lambda_eff = 0.0;
  std::vector<CalibrationScanPoint> scan;
  SocLevels levels;
};

// Solves lambda_eff(s * ratio, s) = target for s.
SocCalibration calibrate_soc(const VibronicSolve& reference, double target_lambda_eff, double ratio,
                             const AnalysisOptions& opt);

struct SecondOrderShift {
  double lowest_order1 = 0.0;
  double lowest_order2 = 0.0;
  double surface_min_order1 = 0.0;
  double surface_min_order2 = 0.0;
  double raw() const { return lowest_order2 - lowest_order1; }
  // Shift of the lowest eigenvalue measured from each model's own adiabatic minimum.
  double relative_to_minimum() const {
    return (lowest_order2 - surface_min_order2) - (lowest_order1 - surface_min_order1);
  }
};

SecondOrderShift second_order_shift(const DefectParams& p, CorrelationPreset preset, int cutoff,
                                    const AnalysisOptions& opt);

// Named observables for the cutoff-convergence driver.
enum class Observable { Gamma1, Gamma2, PU, PG, Lowest };
Observable parse_observable(const std::string& name);
std::string observable_name(Observable o);
double observable_value(Observable o, const DefectParams& p, CorrelationPreset preset, int cutoff,
                        const AnalysisOptions& opt);

}  // namespace pjt
