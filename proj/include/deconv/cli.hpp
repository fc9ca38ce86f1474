#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "experiment.hpp"
#include "io.hpp"
#include "verify.hpp"

namespace deconv {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitIo = 3 };

inline SolverConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

inline int cmd_simulate(const std::string& config_path, const std::string& out_path,
                        const std::string& snapshot_out, long snapshot_every,
                        const std::string& resume_path, std::ostream& out, std::ostream& err) {
  const SolverConfig cfg = load_config(config_path);
  std::optional<Snapshot> resume;
  if (!resume_path.empty()) resume = read_snapshot(resume_path);
  const ModelParams meta{cfg.nu, cfg.filter(), {}, {}};
  std::function<void(const SolverState&, long)> hook;
  if (snapshot_every > 0 && !snapshot_out.empty()) {
    hook = [&](const SolverState& s, long step) {
      if (step % snapshot_every == 0)
        write_snapshot(s, meta, snapshot_out + "." + std::to_string(step));
    };
  }
  try {
    const auto result = simulate(cfg, resume, hook);
    if (!out_path.empty()) write_timeseries(result.trajectory, out_path);
    if (!snapshot_out.empty()) write_snapshot(result.final_state, meta, snapshot_out);
    const auto& last = result.trajectory.back();
    out << "simulate: t=" << fmt(last.t) << " samples=" << result.trajectory.size()
        << " ||w||^2=" << fmt(last.h0_sq) << " ||w||_1^2=" << fmt(last.h1_sq)
        << " energy_residual=" << fmt(last.energy_residual) << "\n";
    return kExitOk;
  } catch (const SimulationBlowUp& e) {
    if (!out_path.empty()) write_timeseries(e.partial(), out_path);
    err << "blow-up: " << e.what() << " (last valid t = " << e.last_valid_time() << ")\n";
    return kExitNumerical;
  }
}

inline int cmd_verify(int K, int fields, std::uint64_t seed, std::ostream& out) {
  const auto results = verify_operators(K, fields, seed);
  bool all = true;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << "  worst=" << fmt(r.worst)
        << " tol=" << fmt(r.tolerance) << "\n";
    all = all && r.pass;
  }
  return all ? kExitOk : kExitNumerical;
}

struct ProbeArgs {
  std::string config;
  std::size_t members = 8;
  double R = 0.0;
  double R_factor = 4.0;
  double rho_prime = 0.0;
  double rho_prime_sq_factor = 2.0;
  double window = 1.0;
  std::string out_dir;
};

inline int cmd_probe(const ProbeArgs& a, std::ostream& out) {
  const SolverConfig cfg = load_config(a.config);
  const Experiment e = make_experiment(cfg);
  const double r0 = e.rho0();
  const double R = a.R > 0.0 ? a.R : a.R_factor * r0;
  const double rho_prime = a.rho_prime > 0.0 ? a.rho_prime : std::sqrt(a.rho_prime_sq_factor) * r0;
  if (!(R > 0.0) || !(rho_prime > 0.0))
    throw ValidationError("zero forcing: pass --R and --rho-prime explicitly");
  const auto rep = ensemble_absorb_probe(R, rho_prime, a.members, cfg);
  out << "absorb-probe: rho0=" << fmt(r0) << " rho0'=" << fmt(rho_prime) << " R=" << fmt(R)
      << " T0=" << fmt(rep.T0) << " horizon=" << fmt(rep.horizon) << "\n";
  if (!a.out_dir.empty()) std::filesystem::create_directories(a.out_dir);
  for (const auto& m : rep.members) {
    out << "  member " << m.index << ": ||u0||=" << fmt(m.u0_norm)
        << " ||H_N u0||=" << fmt(m.initial_norm) << " entry="
        << (m.entry_time ? fmt(*m.entry_time) : std::string("never"))
        << " stays=" << (m.stays_inside ? "yes" : "no")
        << " max ||w||^2/bound=" << fmt(m.max_bound_ratio);
    if (rep.horizon >= rep.T0 + a.window) {
      const auto h1 = h1_absorbing_report(m.trajectory, rep.params, a.window);
      out << " sup_h1=" << fmt(h1.sup_h1) << " empirical_k2=" << fmt(h1.empirical_k2);
    }
    out << "\n";
    if (!a.out_dir.empty())
      write_timeseries(m.trajectory, (std::filesystem::path(a.out_dir) /
                                      ("member_" + std::to_string(m.index) + ".csv")).string());
  }
  out << (rep.pass ? "PASS" : "FAIL") << " absorbing ball entered by T0*(1+" << fmt(rep.epsilon)
      << ") and never left\n";
  return rep.pass ? kExitOk : kExitNumerical;
}

inline int cmd_table(double delta, int N, int k2max, const std::string& out_path, std::ostream& out) {
  if (k2max < 0) throw ValidationError("k2max must be nonnegative");
  const SymbolTable table(FilterParams{delta, N}, k2max);
  std::string csv = "k2,g_hat,hn_hat\n";
  for (const auto& [k2, e] : table.by_k2) {
    detail::append_double(csv, k2);
    csv += ',';
    detail::append_double(csv, e.g);
    csv += ',';
    detail::append_double(csv, e.hn);
    csv += '\n';
  }
  if (out_path.empty()) {
    out << csv;
  } else {
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot open '" + out_path + "' for writing");
    f << csv;
  }
  return kExitOk;
}

inline int cmd_energy(const std::string& config_path, int levels, std::ostream& out) {
  const SolverConfig cfg = load_config(config_path);
  const auto rep = energy_check(cfg, levels);
  out << "energy-check: T=" << fmt(cfg.T) << "\n";
  for (const auto& l : rep.levels)
    out << "  dt=" << fmt(l.dt) << " residual=" << std::setprecision(6) << std::scientific
        << l.residual << std::defaultfloat << "\n";
  for (std::size_t i = 0; i < rep.orders.size(); ++i)
    out << "  observed order (level " << i << "->" << i + 1 << ") = " << fmt(rep.orders[i]) << "\n";
  return kExitOk;
}

}  // namespace detail

/// Command-line entry point. Exit codes: 0 success, 1 validation error,
/// 2 numerical failure (blow-up or failed check), 3 IO error.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Deconvolution turbulence model: simulation and estimate diagnostics"};
  app.require_subcommand(1);

  std::string config, out_path, snapshot_out, resume;
  long snapshot_every = 0;
  auto* sim = app.add_subcommand("simulate", "Run one trajectory and write its time series");
  sim->add_option("-c,--config", config, "Config file")->required();
  sim->add_option("-o,--out", out_path, "Time series CSV");
  sim->add_option("--snapshot-out", snapshot_out, "Final snapshot path");
  sim->add_option("--snapshot-every", snapshot_every, "Also write <snapshot-out>.<step> every n steps");
  sim->add_option("--resume", resume, "Start from a snapshot");

  int vK = 16, vfields = 20;
  std::uint64_t vseed = 1;
  auto* ver = app.add_subcommand("verify-operators", "Run the operator property suite");
  ver->add_option("--K", vK, "Grid resolution");
  ver->add_option("--fields", vfields, "Random fields per check");
  ver->add_option("--seed", vseed, "Base seed");

  detail::ProbeArgs pa;
  auto* probe = app.add_subcommand("absorb-probe", "Ensemble absorbing-ball probe");
  probe->add_option("-c,--config", pa.config, "Config file (template)")->required();
  probe->add_option("--members", pa.members, "Ensemble size");
  probe->add_option("--R", pa.R, "Initial-data radius (overrides --R-factor)");
  probe->add_option("--R-factor", pa.R_factor, "R as a multiple of rho0");
  probe->add_option("--rho-prime", pa.rho_prime, "Absorbing radius (overrides the factor)");
  probe->add_option("--rho-prime-sq-factor", pa.rho_prime_sq_factor, "rho0'^2 as a multiple of rho0^2");
  probe->add_option("--window", pa.window, "Window length r for the H_1 report");
  probe->add_option("--out-dir", pa.out_dir, "Directory for per-member time series");

  double tdelta = 1.0;
  int tN = 0, tk2max = 16;
  std::string tout;
  auto* table = app.add_subcommand("deconv-table", "Emit k2, G_hat, H_N_hat as CSV");
  table->add_option("--delta", tdelta, "Filter width")->required();
  table->add_option("--N", tN, "Deconvolution order")->required();
  table->add_option("--k2max", tk2max, "Largest |k|^2");
  table->add_option("-o,--out", tout, "Output file (default stdout)");

  std::string econfig;
  int elevels = 3;
  auto* energy = app.add_subcommand("energy-check", "dt-refinement study of the energy equality");
  energy->add_option("-c,--config", econfig, "Config file")->required();
  energy->add_option("--levels", elevels, "Number of dt halvings + 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*sim) return detail::cmd_simulate(config, out_path, snapshot_out, snapshot_every, resume, out, err);
    if (*ver) return detail::cmd_verify(vK, vfields, vseed, out);
    if (*probe) return detail::cmd_probe(pa, out);
    if (*table) return detail::cmd_table(tdelta, tN, tk2max, tout, out);
    if (*energy) return detail::cmd_energy(econfig, elevels, out);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const BlowUpError& e) {
    err << "blow-up: " << e.what() << " (last valid t = " << e.last_valid_time() << ")\n";
    return kExitNumerical;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace deconv
