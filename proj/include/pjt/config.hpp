#pragma once

// Run configuration: a sectioned key = value file ([defect], [model], [solver], [soc], [output]).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "pjt/analysis.hpp"
#include "pjt/hamiltonian.hpp"
#include "pjt/params.hpp"

namespace pjt {

enum class SocMode { Off, Explicit, Calibrate };
std::string_view soc_mode_name(SocMode m);

struct SolverSection {
  std::optional<int> cutoff = 40;  // empty: "auto", chosen by the convergence driver
  int k = 8;
  double tol = 1e-10;
  std::int32_t dense_threshold = 500;
  std::uint64_t seed = 20240611;
  int max_restarts = 2000;
  double cluster_tol = 1e-6;
  double auto_rel_tol = 0.01;
  int auto_n_start = 20;
  int auto_n_step = 5;
  int auto_n_max = 60;
  std::string auto_observable = "gamma2";

  bool operator==(const SolverSection&) const = default;
};

struct SocSection {
  SocMode mode = SocMode::Off;
  double lambda_u0 = 0.0;  // explicit
  double lambda_g0 = 0.0;
  double target_lambda_eff = 0.0;  // calibrate
  double ratio = 1.0;

  bool operator==(const SocSection&) const = default;
};

struct RunConfig {
  DefectParams defect;
  CorrelationPreset preset = CorrelationPreset::ERaised;
  int order = 2;
  SolverSection solver;
  SocSection soc;
  std::string output_directory = "pjt-out";

  void validate() const;
  AnalysisOptions analysis_options() const;
  bool operator==(const RunConfig&) const = default;
};

// Throws InvalidInput on syntax errors, unknown keys and violated invariants.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& os, const RunConfig& cfg);

}  // namespace pjt
