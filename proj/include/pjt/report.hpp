#pragma once

// Per-defect orchestration (solves, SOC calibration) and the report files.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pjt/analysis.hpp"
#include "pjt/config.hpp"

namespace pjt {

struct SocSummary {
  SocMode mode = SocMode::Off;
  SocLevels levels;
  std::vector<Level> levels_msm1;
  std::vector<CalibrationScanPoint> calibration_scan;
  double target_lambda_eff = 0.0;
  double ratio = 1.0;
};

struct SpectrumReport {
  std::string name;
  CorrelationPreset preset = CorrelationPreset::ERaised;
  int order = 2;
  int cutoff = 0;
  std::optional<ConvergenceResult> convergence;
  std::string convergence_observable;

  double coupling_strength = 0.0;
  double length_scale_angstrom = 0.0;
  BranchPair rho0_dimensionless{};
  BranchPair rho0_angstrom{};
  std::optional<BranchPair> rho0_input;

  double gamma1 = 0.0;
  double gamma2 = 0.0;
  ReductionFactors p;
  SecondOrderShift shift;

  LabeledSpectrum spectrum;  // of the selected order, m_s = 0
  std::vector<Level> levels_ms0;
  std::optional<double> zpl_baseline_ev;
  std::optional<SocSummary> soc;
};

SpectrumReport analyze_defect(const RunConfig& cfg);

void write_report_json(std::ostream& os, const SpectrumReport& r);
// m_s, index, absolute and relative energies, label, overlap.
void write_levels_csv(std::ostream& os, const SpectrumReport& r);
// level, label, m_s, energy relative to the lowest level.
void write_level_diagram_csv(std::ostream& os, const SpectrumReport& r);
// report.json, levels.csv, composition.csv, level_diagram.csv.
void write_outputs(const SpectrumReport& r, const std::filesystem::path& dir);

struct ReferenceRow {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma2_soc = 0.0;
  double zpl_ev = 0.0;
  double zpl_soc_ev = 0.0;
  double p_u = 0.0;
  double p_g = 0.0;
  double lambda_eff = 0.0;
  double zpl_shift_ev() const { return zpl_soc_ev - zpl_ev; }
};

std::map<std::string, ReferenceRow> read_reference_table(std::istream& is);
std::map<std::string, ReferenceRow> load_reference_table(const std::filesystem::path& path);
std::filesystem::path default_reference_path();

struct Table1Row {
  std::string name;
  bool failed = false;
  std::string error;
  std::vector<std::string> flags;  // quantities outside their tolerance band
  std::optional<SpectrumReport> report;
  std::optional<ReferenceRow> reference;
};

// Deviation bands used to flag a row.
struct Table1Bands {
  double gamma1_rel = 0.15;
  double gamma2_rel = 0.25;
  double p_abs = 0.01;
  double lambda_eff_rel = 1e-4;
  double zpl_shift_rel = 0.30;
};

Table1Row table1_row(const RunConfig& cfg, const std::map<std::string, ReferenceRow>& refs,
                     const Table1Bands& bands = {});
void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows);

}  // namespace pjt
