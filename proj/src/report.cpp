#include "pjt/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pjt/error.hpp"
#include "pjt/format.hpp"
#include "pjt/pes.hpp"

namespace pjt {

namespace {

using ojson = nlohmann::ordered_json;

double r6(double v) { return std::strtod(sig6(v).c_str(), nullptr); }

ojson levels_json(const std::vector<Level>& levels) {
  ojson a = ojson::array();
  for (const Level& l : levels)
    a.push_back({{"m_s", l.m_s}, {"energy_mev", r6(l.energy)}, {"label", l.label}, {"overlap", r6(l.overlap)}});
  return a;
}

}  // namespace

SpectrumReport analyze_defect(const RunConfig& cfg) {
  cfg.validate();
  const AnalysisOptions opt = cfg.analysis_options();
  const DefectParams& d = cfg.defect;

  SpectrumReport r;
  r.name = d.name;
  r.preset = cfg.preset;
  r.order = cfg.order;
  r.coupling_strength = d.coupling_strength();
  r.length_scale_angstrom = dimensionless_length_scale(d.hbar_omega_e, d.effective_mass_amu);
  const Couplings c2 = pes_to_couplings(d);
  r.rho0_dimensionless = branch_minimum_dimensionless(c2);
  for (int i = 0; i < 2; ++i) r.rho0_angstrom[i] = r.rho0_dimensionless[i] * r.length_scale_angstrom;
  r.rho0_input = d.rho0_angstrom;
  r.zpl_baseline_ev = d.zpl_baseline_ev;

  if (cfg.solver.cutoff) {
    r.cutoff = *cfg.solver.cutoff;
  } else {
    const Observable obs = parse_observable(cfg.solver.auto_observable);
    ConvergenceOptions co{cfg.solver.auto_rel_tol, cfg.solver.auto_n_start, cfg.solver.auto_n_step,
                          cfg.solver.auto_n_max};
    r.convergence = converge_cutoff([&](int n) { return observable_value(obs, d, cfg.preset, n, opt); }, co);
    r.convergence_observable = observable_name(obs);
    r.cutoff = r.convergence->cutoff;
  }

  const VibronicSolve s1 = solve_vibronic(sector_for(d, 1, cfg.preset, r.cutoff), opt, r.length_scale_angstrom);
  const VibronicSolve s2 = solve_vibronic(sector_for(d, 2, cfg.preset, r.cutoff), opt, r.length_scale_angstrom);
  const VibronicSolve& main = cfg.order == 1 ? s1 : s2;
  r.gamma1 = gamma_splitting(s1);
  r.gamma2 = gamma_splitting(s2);
  r.p = reduction_factors(main);
  r.shift.lowest_order1 = s1.eig.eigenvalues[0];
  r.shift.lowest_order2 = s2.eig.eigenvalues[0];
  r.shift.surface_min_order1 = lowest_surface_minimum(s1.spec.couplings, d.lambda, cfg.preset).energy;
  r.shift.surface_min_order2 = lowest_surface_minimum(s2.spec.couplings, d.lambda, cfg.preset).energy;
  r.spectrum = main.spectrum;
  r.levels_ms0 = track_levels(main, main.eig, 0, opt);

  if (cfg.soc.mode != SocMode::Off) {
    SocSummary soc;
    soc.mode = cfg.soc.mode;
    if (cfg.soc.mode == SocMode::Calibrate) {
      soc.target_lambda_eff = cfg.soc.target_lambda_eff;
      soc.ratio = cfg.soc.ratio;
      SocCalibration cal = calibrate_soc(main, cfg.soc.target_lambda_eff, cfg.soc.ratio, opt);
      soc.levels = std::move(cal.levels);
      soc.calibration_scan = std::move(cal.scan);
    } else {
      soc.levels = soc_levels(main, cfg.soc.lambda_u0, cfg.soc.lambda_g0, opt);
    }
    SectorSpec sm = main.spec;
    sm.soc = {soc.levels.lambda_u0, soc.levels.lambda_g0, -1};
    const SparseHermitian hm = assemble(sm, main.basis);
    soc.levels_msm1 = track_levels(main, solve_lowest(hm, std::min<int>(opt.k, hm.dim()), opt.solver), -1, opt);
    r.soc = std::move(soc);
  }
  return r;
}

void write_report_json(std::ostream& os, const SpectrumReport& r) {
  ojson j;
  j["defect"] = r.name;
  j["correlation_preset"] = std::string(preset_name(r.preset));
  j["order"] = r.order;
  j["cutoff"] = r.cutoff;
  if (r.convergence) {
    ojson h = ojson::array();
    for (const auto& p : r.convergence->history) h.push_back({{"cutoff", p.cutoff}, {"value", r6(p.value)}});
    j["convergence"] = {{"observable", r.convergence_observable}, {"cutoff", r.convergence->cutoff},
                        {"value", r6(r.convergence->value)}, {"history", h}};
  }
  j["coupling_strength"] = r6(r.coupling_strength);
  j["length_scale_angstrom"] = r6(r.length_scale_angstrom);
  j["rho0_dimensionless"] = {r6(r.rho0_dimensionless[0]), r6(r.rho0_dimensionless[1])};
  j["rho0_angstrom"] = {r6(r.rho0_angstrom[0]), r6(r.rho0_angstrom[1])};
  if (r.rho0_input) j["rho0_angstrom_input"] = {r6((*r.rho0_input)[0]), r6((*r.rho0_input)[1])};
  j["gamma1_mev"] = r6(r.gamma1);
  j["gamma2_mev"] = r6(r.gamma2);
  j["p_u"] = r6(r.p.p_u);
  j["p_g"] = r6(r.p.p_g);
  j["second_order_shift"] = {{"raw_mev", r6(r.shift.raw())},
                             {"relative_to_surface_minimum_mev", r6(r.shift.relative_to_minimum())},
                             {"lowest_order1_mev", r6(r.shift.lowest_order1)},
                             {"lowest_order2_mev", r6(r.shift.lowest_order2)},
                             {"surface_min_order1_mev", r6(r.shift.surface_min_order1)},
                             {"surface_min_order2_mev", r6(r.shift.surface_min_order2)}};
  if (r.zpl_baseline_ev) j["zpl_baseline_ev"] = r6(*r.zpl_baseline_ev);
  if (r.soc) {
    const SocLevels& l = r.soc->levels;
    ojson s;
    s["mode"] = std::string(soc_mode_name(r.soc->mode));
    if (r.soc->mode == SocMode::Calibrate) {
      s["target_lambda_eff_mev"] = r.soc->target_lambda_eff;
      s["ratio"] = r.soc->ratio;
    }
    s["lambda_u0_mev"] = l.lambda_u0;
    s["lambda_g0_mev"] = l.lambda_g0;
    s["lambda_eff_mev"] = r6(l.lambda_eff);
    s["gamma2_soc_mev"] = r6(l.gamma2_soc);
    s["gamma2_soc_ms0_mev"] = r6(l.gamma2_soc_ms0);
    s["a2u_ms_split_mev"] = r6(l.a2u_ms_split);
    s["zpl_shift_ev"] = r6(l.zpl_shift_ev);
    if (r.zpl_baseline_ev) s["zpl_ev"] = r6(*r.zpl_baseline_ev + l.zpl_shift_ev);
    if (!r.soc->calibration_scan.empty()) {
      ojson scan = ojson::array();
      for (const auto& p : r.soc->calibration_scan) scan.push_back({r6(p.s), r6(p.lambda_eff)});
      s["calibration_scan"] = scan;
    }
    j["soc"] = s;
  }
  ojson levels = levels_json(r.levels_ms0);
  if (r.soc) {
    for (auto& e : levels_json(r.soc->levels.levels_ms1)) levels.push_back(e);
    for (auto& e : levels_json(r.soc->levels_msm1)) levels.push_back(e);
  }
  j["levels"] = levels;
  os << j.dump(2) << '\n';
}

namespace {

std::vector<Level> all_levels(const SpectrumReport& r) {
  std::vector<Level> out = r.levels_ms0;
  if (r.soc) {
    out.insert(out.end(), r.soc->levels.levels_ms1.begin(), r.soc->levels.levels_ms1.end());
    out.insert(out.end(), r.soc->levels_msm1.begin(), r.soc->levels_msm1.end());
  }
  return out;
}

double lowest_energy(const std::vector<Level>& levels) {
  double e = std::numeric_limits<double>::infinity();
  for (const Level& l : levels) e = std::min(e, l.energy);
  return levels.empty() ? 0.0 : e;
}

}  // namespace

void write_levels_csv(std::ostream& os, const SpectrumReport& r) {
  const std::vector<Level> levels = all_levels(r);
  const double e0 = lowest_energy(levels);
  os << "m_s,index,energy_mev,energy_rel_mev,label,overlap\n";
  int index = 0, last_ms = 2;
  for (const Level& l : levels) {
    if (l.m_s != last_ms) index = 0, last_ms = l.m_s;
    os << l.m_s << ',' << index++ << ',' << sig6(l.energy) << ',' << sig6(l.energy - e0) << ',' << l.label << ','
       << sig6(l.overlap) << '\n';
  }
}

void write_level_diagram_csv(std::ostream& os, const SpectrumReport& r) {
  std::vector<Level> levels = all_levels(r);
  const double e0 = lowest_energy(levels);
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.energy < b.energy; });
  os << "level,label,m_s,energy_mev\n";
  for (std::size_t i = 0; i < levels.size(); ++i)
    os << i << ',' << levels[i].label << ',' << levels[i].m_s << ',' << sig6(levels[i].energy - e0) << '\n';
}

void write_outputs(const SpectrumReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw InvalidInput("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("report.json");
    write_report_json(f, r);
  }
  {
    auto f = open("levels.csv");
    write_levels_csv(f, r);
  }
  {
    auto f = open("composition.csv");
    write_composition_csv(f, r.spectrum);
  }
  {
    auto f = open("level_diagram.csv");
    write_level_diagram_csv(f, r);
  }
}

std::map<std::string, ReferenceRow> read_reference_table(std::istream& is) {
  std::map<std::string, ReferenceRow> out;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    if (header.empty()) {
      header = f;
      continue;
    }
    if (f.size() != header.size()) throw InvalidInput("reference table: ragged row '" + line + "'");
    ReferenceRow row;
    const std::map<std::string, double*> slots{
        {"gamma1_mev", &row.gamma1}, {"gamma2_mev", &row.gamma2}, {"gamma2_soc_mev", &row.gamma2_soc},
        {"zpl_ev", &row.zpl_ev},     {"zpl_soc_ev", &row.zpl_soc_ev}, {"p_u", &row.p_u},
        {"p_g", &row.p_g},           {"lambda_eff_mev", &row.lambda_eff}};
    for (std::size_t i = 1; i < f.size(); ++i) {
      const auto it = slots.find(header[i]);
      if (it == slots.end()) throw InvalidInput("reference table: unknown column " + header[i]);
      const auto [p, e] = std::from_chars(f[i].data(), f[i].data() + f[i].size(), *it->second);
      if (e != std::errc()) throw InvalidInput("reference table: bad value '" + f[i] + "'");
    }
    out[f[0]] = row;
  }
  return out;
}

std::map<std::string, ReferenceRow> load_reference_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open reference table " + path.string());
  return read_reference_table(in);
}

std::filesystem::path default_reference_path() {
  if (const char* env = std::getenv("PJT_DATA_DIR")) return std::filesystem::path(env) / "table1_reference.csv";
  return std::filesystem::path(PJT_DATA_DIR) / "table1_reference.csv";
}

Table1Row table1_row(const RunConfig& cfg, const std::map<std::string, ReferenceRow>& refs, const Table1Bands& b) {
  Table1Row row;
  row.name = cfg.defect.name;
  if (auto it = refs.find(row.name); it != refs.end()) row.reference = it->second;
  try {
    row.report = analyze_defect(cfg);
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
    return row;
  }
  if (!row.reference) return row;
  const ReferenceRow& ref = *row.reference;
  const SpectrumReport& r = *row.report;
  const auto rel = [](double v, double ref) { return std::abs(v - ref) / std::abs(ref); };
  if (rel(r.gamma1, ref.gamma1) > b.gamma1_rel) row.flags.emplace_back("gamma1");
  if (rel(r.gamma2, ref.gamma2) > b.gamma2_rel) row.flags.emplace_back("gamma2");
  if (std::abs(r.p.p_u - ref.p_u) > b.p_abs) row.flags.emplace_back("p_u");
  if (std::abs(r.p.p_g - ref.p_g) > b.p_abs) row.flags.emplace_back("p_g");
  if (r.soc) {
    if (rel(r.soc->levels.lambda_eff, ref.lambda_eff) > b.lambda_eff_rel) row.flags.emplace_back("lambda_eff");
    if (rel(r.soc->levels.zpl_shift_ev, ref.zpl_shift_ev()) > b.zpl_shift_rel) row.flags.emplace_back("zpl_shift");
  }
  return row;
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  os << "defect,status,flags,gamma1_mev,gamma1_ref,gamma1_dev,gamma2_mev,gamma2_ref,gamma2_dev,"
        "p_u,p_u_ref,p_u_dev,p_g,p_g_ref,p_g_dev,lambda_eff_mev,lambda_eff_ref,lambda_eff_dev,"
        "zpl_shift_ev,zpl_shift_ref_ev,zpl_shift_dev,gamma2_soc_mev,gamma2_soc_ref,gamma2_soc_dev,"
        "gamma2_soc_ms0_mev,a2u_ms_split_mev,lambda_u0_mev,lambda_g0_mev,cutoff\n";
  const auto cell = [](std::optional<double> v) { return v ? sig6(*v) : std::string(); };
  const auto rel = [](double v, double ref) { return (v - ref) / std::abs(ref); };
  for (const Table1Row& row : rows) {
    os << row.name << ',';
    if (row.failed) {
      std::string msg = row.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      os << "FAILED," << msg << std::string(26, ',') << '\n';
      continue;
    }
    std::string flags;
    for (const auto& f : row.flags) flags += (flags.empty() ? "" : ";") + f;
    os << (row.flags.empty() ? "ok" : "flagged") << ',' << flags;
    const SpectrumReport& r = *row.report;
    const std::optional<ReferenceRow>& ref = row.reference;
    const auto triple = [&](std::optional<double> v, std::optional<double> rv, bool absolute) {
      os << ',' << cell(v) << ',' << cell(rv) << ',';
      if (v && rv) os << sig6(absolute ? *v - *rv : rel(*v, *rv));
    };
    const auto refv = [&](auto member) -> std::optional<double> {
      if (!ref) return std::nullopt;
      return (*ref).*member;
    };
    triple(r.gamma1, refv(&ReferenceRow::gamma1), false);
    triple(r.gamma2, refv(&ReferenceRow::gamma2), false);
    triple(r.p.p_u, refv(&ReferenceRow::p_u), true);
    triple(r.p.p_g, refv(&ReferenceRow::p_g), true);
    std::optional<double> le, zs, g2s, g2s0, a2u, lu, lg;
    if (r.soc) {
      const SocLevels& l = r.soc->levels;
      le = l.lambda_eff, zs = l.zpl_shift_ev, g2s = l.gamma2_soc, g2s0 = l.gamma2_soc_ms0, a2u = l.a2u_ms_split;
      lu = l.lambda_u0, lg = l.lambda_g0;
    }
    triple(le, refv(&ReferenceRow::lambda_eff), false);
    triple(zs, ref ? std::optional(ref->zpl_shift_ev()) : std::nullopt, false);
    triple(g2s, refv(&ReferenceRow::gamma2_soc), false);
    os << ',' << cell(g2s0) << ',' << cell(a2u) << ',' << cell(lu) << ',' << cell(lg) << ',' << r.cutoff << '\n';
  }
}

}  // namespace pjt
