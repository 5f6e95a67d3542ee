// ifsm: command line front end for the IFSm laboratory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ifsm/chaos.hpp"
#include "ifsm/holonomy.hpp"
#include "ifsm/io.hpp"
#include "ifsm/spectral.hpp"
#include "ifsm/thermo.hpp"
#include "ifsm/transfer.hpp"
#include "ifsm/verify.hpp"

using namespace ifsm;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct Common {
  std::string config;
  std::optional<int> grid;
  std::optional<std::string> interp;
  double tol = 1e-12;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "System config (JSON)")->required();
  cmd->add_option("--grid", c.grid, "Nodes per axis (overrides the config)")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--interp", c.interp, "nearest or multilinear (overrides the config)");
  cmd->add_option("--tol", c.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "Write the JSON report here instead of stdout");
}

struct Loaded {
  Config cfg;
  Grid grid;
  Interpolation mode;
};

Loaded load(const Common& c) {
  Config cfg = load_config(c.config);
  GridSettings gs = cfg.grid;
  if (c.grid) gs.nodes = {*c.grid, *c.grid};
  if (c.interp) gs.interpolation = parse_interpolation(*c.interp);
  Grid grid = gs.make(cfg.spec.domain());
  return {std::move(cfg), std::move(grid), gs.interpolation};
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(c.out, text);
  }
}

ThermoOptions thermo_options(const Loaded& l, const Common& c) {
  ThermoOptions o;
  o.interpolation = l.mode;
  o.tol = c.tol;
  return o;
}

int exit_code_for(const Error& e) {
  switch (classify(e.code())) {
    case ErrorClass::Validation:
      return kExitValidation;
    case ErrorClass::Numeric:
      return kExitNumeric;
    case ErrorClass::Io:
      return kExitIo;
    case ErrorClass::Usage:
      return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IFSm numerical laboratory"};
  app.require_subcommand(1);

  Common validate_c, spectral_c, invariant_c, entropy_c, pressure_c, equilibrium_c, probe_c, chaos_c, verify_c;

  auto* validate = app.add_subcommand("validate", "Check the hypotheses on q and the maps");
  add_common(validate, validate_c);

  int gelfand = 0;
  std::string export_csv, export_bin;
  auto* spectral = app.add_subcommand("spectral", "Spectral radius and eigenfunction of B_q");
  add_common(spectral, spectral_c);
  spectral->add_option("--gelfand", gelfand, "Also print the Gelfand table up to this N");
  spectral->add_option("--export-csv", export_csv, "Dump the dense transfer matrix as CSV");
  spectral->add_option("--export-bin", export_bin, "Dump the dense transfer matrix as binary");

  auto* invariant = app.add_subcommand("invariant", "Invariant measure of the normalized system");
  add_common(invariant, invariant_c);

  auto* entropy = app.add_subcommand("entropy", "Variational and average entropy of the equilibrium lift");
  add_common(entropy, entropy_c);

  auto* pressure_cmd = app.add_subcommand("pressure", "Topological pressure ln rho with its variational bound");
  add_common(pressure_cmd, pressure_c);

  auto* equilibrium = app.add_subcommand("equilibrium", "Equilibrium state and its marginal");
  add_common(equilibrium, equilibrium_c);

  int directions = 5;
  std::uint64_t probe_seed = 1;
  auto* probe = app.add_subcommand("probe-pressure", "One-sided derivatives and convexity of p(phi)");
  add_common(probe, probe_c);
  probe->add_option("--directions", directions, "Number of random directions")->check(CLI::PositiveNumber);
  probe->add_option("--seed", probe_seed, "Seed for the directions");

  std::size_t steps = 1000000;
  std::uint64_t chaos_seed = 42;
  int level = 2;
  std::size_t burn_in = 1000;
  std::string pgm;
  int block = 1;
  std::vector<double> start;
  auto* chaos = app.add_subcommand("chaos", "Chaos game histogram and PC plot");
  add_common(chaos, chaos_c);
  chaos->add_option("--steps", steps, "Orbit length N")->check(CLI::PositiveNumber);
  chaos->add_option("--seed", chaos_seed, "RNG seed");
  chaos->add_option("--level", level, "Dyadic level M")->check(CLI::Range(1, 24));
  chaos->add_option("--burn-in", burn_in, "Steps discarded before counting");
  chaos->add_option("--pgm", pgm, "Write the PC plot here");
  chaos->add_option("--block", block, "Pixels per cell side")->check(CLI::Range(1, 1024));
  chaos->add_option("--start", start, "Start point (defaults to the box centre)")->delimiter(',');

  std::string csv;
  double threshold = 1e-4;
  std::string column;
  std::string emit_path;
  std::string ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Symbolize a CSV price series into A-D");
  ingest->add_option("csv", csv, "CSV file")->required();
  ingest->add_option("--threshold", threshold, "Relative change threshold")->check(CLI::NonNegativeNumber);
  ingest->add_option("--column", column, "Column name or zero-based index");
  ingest->add_option("--emit-config", emit_path, "Write a four-map config with the observed frequencies");
  ingest->add_option("--out", ingest_out, "Write the JSON report here instead of stdout");

  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  add_common(verify, verify_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) {
      const Config cfg = load_config(validate_c.config, false);
      emit(validate_c, report_json(cfg.validation));
      return cfg.validation.passes ? 0 : kExitValidation;
    }
    if (*spectral) {
      Loaded l = load(spectral_c);
      const TransferMatrix B = assemble_transfer(l.cfg.spec, l.grid, l.mode);
      if (!export_csv.empty()) B.export_csv(export_csv);
      if (!export_bin.empty()) B.export_binary(export_bin);
      const SpectralResult s = power_iteration(B, spectral_c.tol);
      std::vector<GelfandPoint> table;
      if (gelfand > 0) table = spectral_radius_gelfand(B, gelfand);
      emit(spectral_c, report_json(s, table));
      return 0;
    }
    if (*invariant) {
      Loaded l = load(invariant_c);
      const TransferMatrix B = assemble_transfer(l.cfg.spec, l.grid, l.mode);
      const SpectralResult s = power_iteration(B, invariant_c.tol);
      const SystemSpec n = normalize_system(l.cfg.spec, s);
      const EigenmeasureResult em = eigenmeasure(assemble_transfer(n, l.grid, l.mode), invariant_c.tol);
      emit(invariant_c, report_json(em));
      return 0;
    }
    if (*entropy) {
      Loaded l = load(entropy_c);
      ThermoOptions o = thermo_options(l, entropy_c);
      auto [lift, rep] = equilibrium_state(l.cfg.spec, l.grid, o);
      const SpectralResult s = power_iteration(assemble_transfer(l.cfg.spec, l.grid, l.mode), entropy_c.tol);
      const EntropyReport er = entropy_variational(lift, normalize_system(l.cfg.spec, s), o.optimizer);
      emit(entropy_c, report_json(er));
      return 0;
    }
    if (*pressure_cmd) {
      Loaded l = load(pressure_c);
      ThermoReport rep = pressure(l.cfg.spec, l.grid, thermo_options(l, pressure_c));
      emit(pressure_c, report_json(rep));
      return 0;
    }
    if (*equilibrium) {
      Loaded l = load(equilibrium_c);
      auto [lift, rep] = equilibrium_state(l.cfg.spec, l.grid, thermo_options(l, equilibrium_c));
      emit(equilibrium_c, report_json(rep));
      return 0;
    }
    if (*probe) {
      Loaded l = load(probe_c);
      const Potential* psi = l.cfg.spec.potential();
      if (!psi) throw Error(ErrorCode::ValidationError, "probe-pressure needs a potential weighting");
      const DiscreteFunction phi = DiscreteFunction::sample(l.grid, [&](const Point& x) { return std::log((*psi)(x)); });
      ThermoOptions o = thermo_options(l, probe_c);
      const SystemSpec base = l.cfg.spec.with_weighting(log_tabulated_potential(phi, l.mode));
      auto [lift, rep] = equilibrium_state(base, l.grid, o);
      OrbitRng rng(probe_seed, 0);
      std::vector<DiscreteFunction> dirs;
      for (int k = 0; k < directions; ++k) {
        dirs.push_back(DiscreteFunction::sample(l.grid, [&](const Point&) { return 2.0 * rng.uniform() - 1.0; }));
      }
      const auto result = pressure_functional_probe(base, phi, dirs, {}, &rep.marginal, o);
      emit(probe_c, report_json(result));
      return 0;
    }
    if (*chaos) {
      Loaded l = load(chaos_c);
      const DomainBox& box = l.cfg.spec.domain();
      Point z0{};
      if (start.empty()) {
        for (int a = 0; a < box.dimension; ++a) z0[a] = 0.5 * (box.lower[a] + box.upper[a]);
      } else {
        if (start.size() != static_cast<std::size_t>(box.dimension)) {
          throw Error(ErrorCode::InvalidArgument, "--start needs one coordinate per axis");
        }
        for (int a = 0; a < box.dimension; ++a) z0[a] = start[a];
      }
      const OrbitRecord orbit = sample_orbit(l.cfg.spec, z0, steps, chaos_seed);
      const CellHistogram h = empirical_measure(orbit, l.cfg.spec, level, burn_in);
      if (!pgm.empty()) write_pgm(pc_plot(h, block), pgm);
      emit(chaos_c, report_json(h, orbit));
      return 0;
    }
    if (*ingest) {
      ColumnSelector sel;
      if (!column.empty()) {
        const bool numeric = column.find_first_not_of("0123456789") == std::string::npos;
        if (numeric) {
          sel.index = std::stoul(column);
        } else {
          sel.name = column;
        }
      }
      const SymbolSeries s = ingest_timeseries(csv, threshold, sel);
      if (!emit_path.empty()) write_text(emit_path, emit_config(s, std::filesystem::path(csv).stem().string()));
      const std::string text = report_json(s);
      if (ingest_out.empty()) {
        std::cout << text;
      } else {
        write_text(ingest_out, text);
      }
      return 0;
    }
    if (*verify) {
      Loaded l = load(verify_c);
      VerifyOptions o;
      o.interpolation = l.mode;
      o.tol = verify_c.tol;
      const auto checks = run_invariant_suite(l.cfg.spec, l.grid, o);
      emit(verify_c, format_checks(checks));
      for (const auto& c : checks) {
        if (!c.passed) return kExitValidation;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "ifsm: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "ifsm: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
