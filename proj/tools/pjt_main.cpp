// pjt: batch front-end for the product Jahn-Teller spin-vibronic model.
//
//   pjt solve <config>          reports for one defect
//   pjt fit <csv> <config>      fit model parameters to PES samples
//   pjt table1 <dir>            side-by-side comparison for every *.conf in dir
//   pjt surfaces <config>       adiabatic surfaces along Q_x as CSV
//
// Exit codes: 0 success, 2 invalid input, 3 solver failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pjt/config.hpp"
#include "pjt/error.hpp"
#include "pjt/format.hpp"
#include "pjt/kernels.hpp"
#include "pjt/pes.hpp"
#include "pjt/report.hpp"

namespace fs = std::filesystem;
using namespace pjt;

namespace {

constexpr const char* kOutEnv = "PJT_OUT_DIR";

struct Overrides {
  std::optional<int> cutoff;
  std::optional<int> order;
  std::optional<std::string> preset;
  std::optional<int> threads;
  std::optional<std::string> out;
};

void apply(const Overrides& o, RunConfig& cfg) {
  if (o.cutoff) cfg.solver.cutoff = *o.cutoff;
  if (o.order) cfg.order = *o.order;
  if (o.preset) cfg.preset = parse_preset(*o.preset);
  cfg.validate();
}

fs::path output_dir(const Overrides& o, const std::string& from_config) {
  if (o.out) return *o.out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return from_config;
}

RunConfig load(const std::string& path, const Overrides& o) {
  RunConfig cfg = load_config(path);
  apply(o, cfg);
  return cfg;
}

void print_summary(const SpectrumReport& r) {
  std::cout << r.name << " (" << preset_name(r.preset) << ", order " << r.order << ", cutoff " << r.cutoff << ")\n";
  std::cout << "  gamma1 = " << sig6(r.gamma1) << " meV, gamma2 = " << sig6(r.gamma2) << " meV\n";
  std::cout << "  p_u = " << sig6(r.p.p_u) << ", p_g = " << sig6(r.p.p_g) << '\n';
  if (r.soc) {
    const SocLevels& l = r.soc->levels;
    std::cout << "  lambda_u0 = " << sig6(l.lambda_u0) << " meV, lambda_g0 = " << sig6(l.lambda_g0)
              << " meV, lambda_eff = " << sig6(l.lambda_eff) << " meV\n";
    std::cout << "  gamma2+SOC = " << sig6(l.gamma2_soc) << " meV (to m_s=0 A2u: " << sig6(l.gamma2_soc_ms0)
              << "), A2u m_s split = " << sig6(l.a2u_ms_split) << " meV, ZPL shift = " << sig6(l.zpl_shift_ev)
              << " eV\n";
  }
}

int cmd_solve(const std::string& config, const Overrides& o, const std::string& dump) {
  const RunConfig cfg = load(config, o);
  if (!dump.empty()) {
    const int n = cfg.solver.cutoff.value_or(cfg.solver.auto_n_start);
    const SectorSpec s = sector_for(cfg.defect, cfg.order, cfg.preset, n);
    std::ofstream f(dump);
    if (!f) throw InvalidInput("cannot write " + dump);
    assemble(s, OscBasis::build(n)).write_triplets(f);
  }
  const SpectrumReport r = analyze_defect(cfg);
  const fs::path dir = output_dir(o, cfg.output_directory);
  write_outputs(r, dir);
  print_summary(r);
  std::cout << "  wrote " << dir.string() << '\n';
  return 0;
}

int cmd_fit(const std::string& csv, const std::string& config, const Overrides& o) {
  RunConfig cfg = load(config, o);
  std::ifstream in(csv);
  if (!in) throw InvalidInput("cannot open " + csv);
  const PesCurve samples = read_pes_csv(in);
  FitOptions fo;
  fo.preset = cfg.preset;
  const FitResult fit = fit_pes(samples, cfg.defect, fo);
  cfg.defect = fit.params;
  const fs::path dir = output_dir(o, cfg.output_directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create " + dir.string());
  std::ofstream f(dir / "fitted.conf");
  if (!f) throw InvalidInput("cannot write " + (dir / "fitted.conf").string());
  write_config(f, cfg);
  std::cout << "fit converged in " << fit.iterations << " iterations, cost " << fit.cost << '\n';
  for (int s = 0; s < 4; ++s)
    std::cout << "  surface " << s + 1 << ": rms " << (fit.counts[s] ? sig6(fit.rms[s]) : std::string("-"))
              << " meV over " << fit.counts[s] << " samples\n";
  std::cout << "  offset " << sig6(fit.offset) << " meV\n";
  std::cout << "  wrote " << (dir / "fitted.conf").string() << '\n';
  return 0;
}

int cmd_table1(const std::string& dir_arg, const Overrides& o, const std::string& reference) {
  const fs::path dir(dir_arg);
  if (!fs::is_directory(dir)) throw InvalidInput("not a directory: " + dir_arg);
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".conf") configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) throw InvalidInput("no *.conf files in " + dir_arg);
  const auto refs = load_reference_table(reference.empty() ? default_reference_path() : fs::path(reference));

  const fs::path out = output_dir(o, "pjt-out");
  std::vector<Table1Row> rows;
  for (const auto& path : configs) {
    const RunConfig cfg = load(path.string(), o);
    Table1Row row = table1_row(cfg, refs);
    if (row.report) write_outputs(*row.report, out / row.name);
    std::cerr << row.name << ": " << (row.failed ? "FAILED: " + row.error : row.flags.empty() ? "ok" : "flagged")
              << '\n';
    rows.push_back(std::move(row));
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  std::ofstream f(out / "table1.csv");
  if (!f) throw InvalidInput("cannot write " + (out / "table1.csv").string());
  write_table1_csv(f, rows);
  write_table1_csv(std::cout, rows);
  const bool any_failed = std::any_of(rows.begin(), rows.end(), [](const Table1Row& r) { return r.failed; });
  return any_failed ? 3 : 0;
}

int cmd_surfaces(const std::string& config, const Overrides& o, double qmin, double qmax, int points,
                 const std::string& unit) {
  const RunConfig cfg = load(config, o);
  if (points < 2) throw InvalidInput("--points must be at least 2");
  if (!(qmax > qmin)) throw InvalidInput("--qmax must exceed --qmin");
  const Couplings c = couplings_at_order(pes_to_couplings(cfg.defect), cfg.order);
  const double ell = dimensionless_length_scale(cfg.defect.hbar_omega_e, cfg.defect.effective_mass_amu);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = qmin + (qmax - qmin) * i / (points - 1);
  PesCurve curve = adiabatic_surfaces(c, cfg.defect.lambda, cfg.preset, grid);
  if (unit == "angstrom") {
    curve.unit = QxUnit::Angstrom;
    for (double& q : curve.qx) q *= ell;
  }
  const fs::path dir = output_dir(o, cfg.output_directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream f(dir / "surfaces.csv");
  if (!f) throw InvalidInput("cannot write " + (dir / "surfaces.csv").string());
  write_pes_csv(f, curve);
  std::cout << "wrote " << (dir / "surfaces.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Product Jahn-Teller spin-vibronic solver"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--cutoff", o.cutoff, "oscillator cutoff N (total quanta)")->check(CLI::NonNegativeNumber);
  app.add_option("--order", o.order, "electron-phonon coupling order")->check(CLI::IsMember({1, 2}));
  app.add_option("--preset", o.preset, "correlation preset")->check(CLI::IsMember({"e-raised", "a-split"}));
  app.add_option("--threads", o.threads, "worker threads for matrix-vector products")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, std::string("output directory (overrides ") + kOutEnv + " and the config)");

  std::string config, csv, dir, dump, reference, unit = "dimensionless";
  double qmin = -6.0, qmax = 6.0;
  int points = 241;

  auto* solve = app.add_subcommand("solve", "solve one defect and write reports");
  solve->add_option("config", config, "config file")->required();
  solve->add_option("--dump-matrix", dump, "write the m_s = 0 Hamiltonian as 'row col re im' triplets");

  auto* fit = app.add_subcommand("fit", "fit model parameters to PES samples");
  fit->add_option("csv", csv, "PES sample CSV")->required();
  fit->add_option("config", config, "config with the initial guess")->required();

  auto* table1 = app.add_subcommand("table1", "compare every *.conf in a directory with the reference table");
  table1->add_option("dir", dir, "directory of defect configs")->required();
  table1->add_option("--reference", reference, "reference CSV (default: bundled table)");

  auto* surfaces = app.add_subcommand("surfaces", "adiabatic surfaces along Q_x (Q_y = 0)");
  surfaces->add_option("config", config, "config file")->required();
  surfaces->add_option("--qmin", qmin, "lower end of the dimensionless grid");
  surfaces->add_option("--qmax", qmax, "upper end of the dimensionless grid");
  surfaces->add_option("--points", points, "grid points");
  surfaces->add_option("--unit", unit, "qx column unit")->check(CLI::IsMember({"dimensionless", "angstrom"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

#ifdef _OPENMP
  if (o.threads) omp_set_num_threads(*o.threads);
#endif

  try {
    if (*solve) return cmd_solve(config, o, dump);
    if (*fit) return cmd_fit(csv, config, o);
    if (*table1) return cmd_table1(dir, o, reference);
    if (*surfaces) return cmd_surfaces(config, o, qmin, qmax, points, unit);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
