#include "pjt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pjt/error.hpp"

namespace pjt {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"defect",
       {"name", "hbar_omega_e", "lambda", "e_jt", "delta_jt", "rho0_angstrom", "zpl_baseline_ev",
        "effective_mass_amu"}},
      {"model", {"correlation_preset", "order"}},
      {"solver",
       {"cutoff", "k", "tol", "dense_threshold", "seed", "max_restarts", "cluster_tol", "auto_rel_tol",
        "auto_n_start", "auto_n_step", "auto_n_max", "auto_observable"}},
      {"soc", {"mode", "lambda_u0", "lambda_g0", "target_lambda_eff", "ratio"}},
      {"output", {"directory"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw InvalidInput("config " + key + ": " + why);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad(key, "not a number: '" + v + "'");
  return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  Int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, "not an integer: '" + v + "'");
  return out;
}

BranchPair to_pair(const std::string& key, const std::string& raw) {
  const auto comma = raw.find(',');
  if (comma == std::string::npos || raw.find(',', comma + 1) != std::string::npos)
    bad(key, "expected two comma-separated values");
  return {to_double(key, raw.substr(0, comma)), to_double(key, raw.substr(comma + 1))};
}

std::string num(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

std::string_view soc_mode_name(SocMode m) {
  switch (m) {
    case SocMode::Explicit: return "explicit";
    case SocMode::Calibrate: return "calibrate";
    default: return "off";
  }
}

void RunConfig::validate() const {
  defect.validate();
  pes_to_couplings(defect).validate();
  if (defect.name.empty()) throw InvalidInput("config defect.name: must not be empty");
  if (order != 1 && order != 2) throw InvalidInput("config model.order: must be 1 or 2");
  if (solver.cutoff && *solver.cutoff < 0) throw InvalidInput("config solver.cutoff: must be non-negative");
  if (solver.k < 1) throw InvalidInput("config solver.k: must be at least 1");
  if (!(solver.tol > 0.0)) throw InvalidInput("config solver.tol: must be positive");
  if (solver.dense_threshold < 0) throw InvalidInput("config solver.dense_threshold: must be non-negative");
  if (solver.max_restarts < 1) throw InvalidInput("config solver.max_restarts: must be positive");
  if (!(solver.cluster_tol >= 0.0)) throw InvalidInput("config solver.cluster_tol: must be non-negative");
  if (!solver.cutoff) {
    if (!(solver.auto_rel_tol > 0.0)) throw InvalidInput("config solver.auto_rel_tol: must be positive");
    if (solver.auto_n_start < 0 || solver.auto_n_step < 1 || solver.auto_n_max < solver.auto_n_start)
      throw InvalidInput("config solver.auto_n_*: invalid cutoff schedule");
    parse_observable(solver.auto_observable);
  }
  switch (soc.mode) {
    case SocMode::Off: break;
    case SocMode::Explicit: SocParams{soc.lambda_u0, soc.lambda_g0, 1}.validate(); break;
    case SocMode::Calibrate:
      if (!(soc.target_lambda_eff >= 0.0)) throw InvalidInput("config soc.target_lambda_eff: must be non-negative");
      if (!(soc.ratio >= 0.0)) throw InvalidInput("config soc.ratio: must be non-negative");
      break;
  }
  if (output_directory.empty()) throw InvalidInput("config output.directory: must not be empty");
}

AnalysisOptions RunConfig::analysis_options() const {
  AnalysisOptions a;
  a.k = solver.k;
  a.cluster_tol = solver.cluster_tol;
  a.solver.tol = solver.tol;
  a.solver.dense_threshold = solver.dense_threshold;
  a.solver.seed = solver.seed;
  a.solver.max_restarts = solver.max_restarts;
  return a;
}

RunConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidInput(std::string("config syntax: ") + e.what());
  }
  const auto& known = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw InvalidInput("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw InvalidInput("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw InvalidInput("config: unknown key " + section + "." + key);
  }
  const auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };
  const auto require = [&](const std::string& path) {
    auto v = get(path);
    if (!v) throw InvalidInput("config: missing required key " + path);
    return *v;
  };

  RunConfig c;
  c.defect.name = require("defect.name");
  c.defect.hbar_omega_e = to_double("defect.hbar_omega_e", require("defect.hbar_omega_e"));
  c.defect.lambda = to_double("defect.lambda", require("defect.lambda"));
  c.defect.e_jt = to_pair("defect.e_jt", require("defect.e_jt"));
  c.defect.delta_jt = to_pair("defect.delta_jt", require("defect.delta_jt"));
  if (auto v = get("defect.rho0_angstrom")) c.defect.rho0_angstrom = to_pair("defect.rho0_angstrom", *v);
  if (auto v = get("defect.zpl_baseline_ev")) c.defect.zpl_baseline_ev = to_double("defect.zpl_baseline_ev", *v);
  if (auto v = get("defect.effective_mass_amu")) c.defect.effective_mass_amu = to_double("defect.effective_mass_amu", *v);

  if (auto v = get("model.correlation_preset")) c.preset = parse_preset(*v);
  if (auto v = get("model.order")) c.order = to_int<int>("model.order", *v);

  SolverSection& s = c.solver;
  if (auto v = get("solver.cutoff")) s.cutoff = *v == "auto" ? std::nullopt : std::optional(to_int<int>("solver.cutoff", *v));
  if (auto v = get("solver.k")) s.k = to_int<int>("solver.k", *v);
  if (auto v = get("solver.tol")) s.tol = to_double("solver.tol", *v);
  if (auto v = get("solver.dense_threshold")) s.dense_threshold = to_int<std::int32_t>("solver.dense_threshold", *v);
  if (auto v = get("solver.seed")) s.seed = to_int<std::uint64_t>("solver.seed", *v);
  if (auto v = get("solver.max_restarts")) s.max_restarts = to_int<int>("solver.max_restarts", *v);
  if (auto v = get("solver.cluster_tol")) s.cluster_tol = to_double("solver.cluster_tol", *v);
  if (auto v = get("solver.auto_rel_tol")) s.auto_rel_tol = to_double("solver.auto_rel_tol", *v);
  if (auto v = get("solver.auto_n_start")) s.auto_n_start = to_int<int>("solver.auto_n_start", *v);
  if (auto v = get("solver.auto_n_step")) s.auto_n_step = to_int<int>("solver.auto_n_step", *v);
  if (auto v = get("solver.auto_n_max")) s.auto_n_max = to_int<int>("solver.auto_n_max", *v);
  if (auto v = get("solver.auto_observable")) s.auto_observable = *v;

  const auto mode = get("soc.mode").value_or("off");
  const bool has_explicit = get("soc.lambda_u0") || get("soc.lambda_g0");
  const bool has_calibrate = get("soc.target_lambda_eff") || get("soc.ratio");
  if (mode == "off") {
    c.soc.mode = SocMode::Off;
    if (has_explicit || has_calibrate) throw InvalidInput("config soc: mode = off admits no other soc keys");
  } else if (mode == "explicit") {
    c.soc.mode = SocMode::Explicit;
    if (has_calibrate) throw InvalidInput("config soc: explicit mode cannot carry calibration keys");
    c.soc.lambda_u0 = to_double("soc.lambda_u0", require("soc.lambda_u0"));
    c.soc.lambda_g0 = to_double("soc.lambda_g0", require("soc.lambda_g0"));
  } else if (mode == "calibrate") {
    c.soc.mode = SocMode::Calibrate;
    if (has_explicit) throw InvalidInput("config soc: calibrate mode cannot carry explicit lambda_u0/lambda_g0");
    c.soc.target_lambda_eff = to_double("soc.target_lambda_eff", require("soc.target_lambda_eff"));
    if (auto v = get("soc.ratio")) c.soc.ratio = to_double("soc.ratio", *v);
  } else {
    throw InvalidInput("config soc.mode: expected off, explicit or calibrate, got '" + mode + "'");
  }

  if (auto v = get("output.directory")) c.output_directory = *v;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& os, const RunConfig& c) {
  const DefectParams& d = c.defect;
  os << "[defect]\n";
  os << "name = " << d.name << '\n';
  os << "hbar_omega_e = " << num(d.hbar_omega_e) << '\n';
  os << "lambda = " << num(d.lambda) << '\n';
  os << "e_jt = " << num(d.e_jt[0]) << ", " << num(d.e_jt[1]) << '\n';
  os << "delta_jt = " << num(d.delta_jt[0]) << ", " << num(d.delta_jt[1]) << '\n';
  if (d.rho0_angstrom) os << "rho0_angstrom = " << num((*d.rho0_angstrom)[0]) << ", " << num((*d.rho0_angstrom)[1]) << '\n';
  if (d.zpl_baseline_ev) os << "zpl_baseline_ev = " << num(*d.zpl_baseline_ev) << '\n';
  os << "effective_mass_amu = " << num(d.effective_mass_amu) << "\n\n";

  os << "[model]\n";
  os << "correlation_preset = " << preset_name(c.preset) << '\n';
  os << "order = " << c.order << "\n\n";

  const SolverSection& s = c.solver;
  os << "[solver]\n";
  os << "cutoff = " << (s.cutoff ? std::to_string(*s.cutoff) : std::string("auto")) << '\n';
  os << "k = " << s.k << '\n';
  os << "tol = " << num(s.tol) << '\n';
  os << "dense_threshold = " << s.dense_threshold << '\n';
  os << "seed = " << s.seed << '\n';
  os << "max_restarts = " << s.max_restarts << '\n';
  os << "cluster_tol = " << num(s.cluster_tol) << '\n';
  os << "auto_rel_tol = " << num(s.auto_rel_tol) << '\n';
  os << "auto_n_start = " << s.auto_n_start << '\n';
  os << "auto_n_step = " << s.auto_n_step << '\n';
  os << "auto_n_max = " << s.auto_n_max << '\n';
  os << "auto_observable = " << s.auto_observable << "\n\n";

  os << "[soc]\n";
  os << "mode = " << soc_mode_name(c.soc.mode) << '\n';
  if (c.soc.mode == SocMode::Explicit) {
    os << "lambda_u0 = " << num(c.soc.lambda_u0) << '\n';
    os << "lambda_g0 = " << num(c.soc.lambda_g0) << '\n';
  } else if (c.soc.mode == SocMode::Calibrate) {
    os << "target_lambda_eff = " << num(c.soc.target_lambda_eff) << '\n';
    os << "ratio = " << num(c.soc.ratio) << '\n';
  }
  os << "\n[output]\n";
  os << "directory = " << c.output_directory << '\n';
}

}  // namespace pjt
