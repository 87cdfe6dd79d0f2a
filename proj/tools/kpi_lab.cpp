// kpi_lab: command-line front end for the KP-I soliton lab.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kpi/field_io.hpp"
#include "kpi/verify.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridFlags {
  int nx = 1024;
  double lx = 80.0;
  int ny = 32;

  void add(CLI::App* app) {
    app->add_option("--nx", nx, "x points (even, factors 2,3,5,7)")->capture_default_str();
    app->add_option("--lx", lx, "x box length")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--ny", ny, "y points on [0, 2pi)")->capture_default_str();
  }

  kpi::Grid grid() const {
    try {
      return kpi::make_grid(nx, lx, ny);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--nx/--lx/--ny: ") + e.what());
    }
  }
};

void emit(const kpi::json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot open " + out + " for writing");
  os << j.dump(2) << "\n";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Splices key=value lines from --config FILE into argv as --key value, skipping
/// keys already given on the command line (flags override the file).
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config: missing file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  std::ifstream is(path);
  if (!is) throw UsageError("--config: cannot open " + path);
  std::set<std::string> given;
  for (const auto& a : rest) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (given.count(key)) continue;
    if (value == "true") {
      injected.push_back("--" + key);
    } else if (value != "false") {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  // Options belong to the subcommand, so they go after it.
  auto sub = std::find_if(rest.begin(), rest.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
  if (sub == rest.end()) throw UsageError("--config: no subcommand given");
  rest.insert(sub + 1, injected.begin(), injected.end());
  return rest;
}

kpi::Field read_input(const std::string& path, const char* flag) {
  try {
    return kpi::load_field(path);
  } catch (const std::exception& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KP-I soliton lab on R x T"};
  app.require_subcommand(1, 1);
  std::string out;

  // soliton
  auto* sol = app.add_subcommand("soliton", "sample a scaled soliton Z(a, gamma) and report its invariants");
  GridFlags sol_grid;
  sol_grid.add(sol);
  double sol_a1 = 0.0, sol_a2 = 0.0, sol_gamma = 1.0, sol_rho = 0.0;
  std::string sol_field;
  sol->add_option("--a", sol_a1, "branch parameter a1")->capture_default_str()->check(CLI::Range(-0.99, 0.99));
  sol->add_option("--a2", sol_a2, "branch parameter a2")->capture_default_str()->check(CLI::Range(-0.99, 0.99));
  sol->add_option("--gamma", sol_gamma, "scale")->capture_default_str()->check(CLI::PositiveNumber);
  sol->add_option("--rho", sol_rho, "x translation")->capture_default_str();
  sol->add_option("--field-out", sol_field, "write the sampled field (.csv or .bin)");
  sol->add_option("--out", out, "report path (default stdout)");

  // functionals
  auto* fun = app.add_subcommand("functionals", "mass, energy and action of a soliton or a stored field");
  GridFlags fun_grid;
  fun_grid.add(fun);
  double fun_a = 0.0, fun_speed = 0.0;
  std::string fun_input;
  fun->add_option("--a", fun_a, "soliton Z(a) to evaluate")->capture_default_str()->check(CLI::Range(0.0, 0.99));
  fun->add_option("--input", fun_input, "field file (.csv or .bin) instead of Z(a)");
  fun->add_option("--speed", fun_speed, "action speed c (default c(a))")->check(CLI::PositiveNumber);
  fun->add_option("--out", out, "report path (default stdout)");

  // verify
  auto* ver = app.add_subcommand("verify", "run acceptance checks and report pass/fail");
  std::string suite = "all";
  std::vector<int> only;
  bool timing = false;
  std::set<std::string> suite_names;
  for (const auto& [name, ids] : kpi::suites()) suite_names.insert(name);
  ver->add_option("--suite", suite, "check suite")->capture_default_str()->check(CLI::IsMember(suite_names));
  ver->add_option("--criterion", only, "single criteria by number (repeatable)")->check(CLI::Range(1, 15));
  ver->add_flag("--timing", timing, "include wall-clock times and runtime checks in the report");
  ver->add_option("--out", out, "report path (default stdout)");

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "eigenvalues of the linearized operators at a line soliton");
  GridFlags spec_grid;
  spec_grid.nx = 512;
  spec_grid.ny = 8;
  spec_grid.add(spec);
  int mode = 0, count = 8;
  double spec_speed = kpi::critical_speed;
  bool fourth = false;
  std::string constraints = "none";
  spec->add_option("--mode", mode, "transverse mode n of L_n")->capture_default_str()->check(CLI::NonNegativeNumber);
  spec->add_option("--speed", spec_speed, "line soliton speed c")->capture_default_str()->check(CLI::PositiveNumber);
  spec->add_option("--count", count, "number of smallest eigenvalues")->capture_default_str()->check(CLI::PositiveNumber);
  spec->add_flag("--fourth-order", fourth, "use -d L_1 d instead of L_n");
  spec->add_option("--constraints", constraints, "coercivity constraint set")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "translation", "full"}));
  spec->add_option("--out", out, "report path (default stdout)");

  // modulate
  auto* mod = app.add_subcommand("modulate", "modulation decomposition u(.+rho) = Z(a, gamma) + eta");
  GridFlags mod_grid;
  mod_grid.nx = 512;
  mod_grid.add(mod);
  double mod_l = 0.0, mod_delta = 5e-3;
  std::uint64_t mod_seed = 0;
  std::string mod_input;
  mod->add_option("--l", mod_l, "branch point of the equal-mass sample")->capture_default_str()->check(CLI::Range(0.0, 0.3));
  mod->add_option("--delta", mod_delta, "perturbation size")->capture_default_str()->check(CLI::Range(0.0, 0.1));
  mod->add_option("--seed", mod_seed, "sample seed")->capture_default_str();
  mod->add_option("--input", mod_input, "decompose a stored field instead of a seeded sample");
  mod->add_option("--out", out, "report path (default stdout)");

  // evolve
  auto* evo = app.add_subcommand("evolve", "evolve Z(a) + delta*noise and monitor invariants");
  GridFlags evo_grid;
  evo_grid.add(evo);
  double evo_a = 0.0, evo_delta = 0.0, evo_t = 10.0, evo_dt = 1e-3;
  std::uint64_t evo_seed = 0;
  int stride = 100, snapshot_every = 0;
  bool evo_mod = false;
  std::string snapshot_prefix = "snapshot";
  evo->add_option("--a", evo_a, "soliton parameter")->capture_default_str()->check(CLI::Range(0.0, 0.9));
  evo->add_option("--delta", evo_delta, "perturbation size")->capture_default_str()->check(CLI::Range(0.0, 0.1));
  evo->add_option("--seed", evo_seed, "perturbation seed")->capture_default_str();
  evo->add_option("--t-end", evo_t, "final time")->capture_default_str()->check(CLI::PositiveNumber);
  evo->add_option("--dt", evo_dt, "time step")->capture_default_str()->check(CLI::PositiveNumber);
  evo->add_option("--observer-stride", stride, "steps between observations")->capture_default_str()->check(CLI::PositiveNumber);
  evo->add_flag("--modulation", evo_mod, "also record the modulation decomposition at each observation");
  evo->add_option("--snapshot-every", snapshot_every, "dump the field every k observations (0: never)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  evo->add_option("--snapshot-prefix", snapshot_prefix, "snapshot path prefix")->capture_default_str();
  evo->add_option("--out", out, "report path (default stdout)");

  // stability
  auto* stab = app.add_subcommand("stability", "max_dist/delta for delta and delta/2 from the same seed");
  GridFlags stab_grid;
  stab_grid.nx = 512;
  stab_grid.add(stab);
  double stab_a = 0.0, stab_delta = 1e-3, stab_t = 20.0, stab_dt = 2e-3;
  std::uint64_t stab_seed = 7;
  stab->add_option("--a", stab_a, "soliton parameter")->capture_default_str()->check(CLI::Range(0.0, 0.3));
  stab->add_option("--delta", stab_delta, "perturbation size")->capture_default_str()->check(CLI::Range(1e-4, 1e-2));
  stab->add_option("--seed", stab_seed, "perturbation seed")->capture_default_str();
  stab->add_option("--t-end", stab_t, "final time")->capture_default_str()->check(CLI::PositiveNumber);
  stab->add_option("--dt", stab_dt, "time step")->capture_default_str()->check(CLI::PositiveNumber);
  stab->add_option("--out", out, "report path (default stdout)");

  app.footer("Options may also come from --config FILE with key=value lines; flags on the command line win.");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (*sol) {
      const kpi::Grid g = sol_grid.grid();
      const kpi::SolitonParams p{sol_a1, sol_a2, sol_gamma, sol_rho};
      if (!(p.a_norm() < 1.0)) throw UsageError("--a/--a2: |a| must be < 1");
      const kpi::Field z = kpi::scaled_zaitsev(p, g);
      kpi::json j = kpi::schema_header("soliton");
      j["grid"] = kpi::to_json(g);
      j["params"] = kpi::to_json(p);
      j["max"] = kpi::max_abs(z);
      j["mass"] = kpi::mass(z);
      j["energy"] = kpi::energy(z);
      // Only gamma = 1 is a traveling wave on R x T.
      if (sol_gamma == 1.0) {
        const double c = kpi::speed(p.a_norm());
        j["speed"] = c;
        const kpi::Field centered = kpi::scaled_zaitsev({sol_a1, sol_a2, 1.0, 0.0}, g);
        j["stationary_residual"] = kpi::max_abs(kpi::stationary_residual(centered, c));
      }
      if (!sol_field.empty()) kpi::save_field(sol_field, z);
      emit(j, out);
      return exit_pass;
    }

    if (*fun) {
      kpi::Field u = fun_input.empty() ? kpi::zaitsev(fun_a, fun_grid.grid()) : read_input(fun_input, "--input");
      const double c = fun_speed > 0.0 ? fun_speed : kpi::speed(fun_a);
      kpi::json j = kpi::to_json(kpi::action(u, c));
      j["grid"] = kpi::to_json(u.grid);
      emit(j, out);
      return exit_pass;
    }

    if (*ver) {
      std::vector<int> ids = only.empty() ? kpi::suites().at(suite) : only;
      std::vector<kpi::CriterionResult> results;
      for (int id : ids) {
        results.push_back(kpi::run_criterion(id));
        std::cerr << (results.back().pass() ? "PASS" : "FAIL") << "  criterion " << id << "  " << results.back().title
                  << "\n";
      }
      const kpi::json j = kpi::to_json(results, only.empty() ? suite : "criteria", timing);
      emit(j, out);
      return j["pass"].get<bool>() ? exit_pass : exit_fail;
    }

    if (*spec) {
      const kpi::Grid g = spec_grid.grid();
      if (fourth && constraints != "none") throw UsageError("--constraints: only 'none' applies with --fourth-order");
      const kpi::OperatorMatrix m = fourth ? kpi::build_fourth_order(spec_speed, g) : kpi::build_L(mode, spec_speed, g);
      const kpi::Profile1D q = kpi::line_soliton_profile(spec_speed, g);
      std::optional<kpi::Profile1D> kernel;
      if (fourth && spec_speed == kpi::critical_speed) kernel = kpi::g_mu_dx(1.0, g);
      if (!fourth && mode == 0) kernel = kpi::deriv_x(q, 1);
      kpi::json j = kpi::to_json(kpi::spectrum(m, count, kernel));
      j["grid"] = kpi::to_json(g);
      if (constraints != "none") {
        std::vector<kpi::Profile1D> cs;
        if (constraints == "translation") {
          cs.push_back(kpi::deriv_x(q, 1));
        } else if (mode == 0) {
          cs = {q, kpi::deriv_x(q, 1)};
        } else if (mode == 1) {
          cs = {kpi::vstar(g)};
        }
        j["constraints"] = constraints;
        j["coercivity"] = kpi::coercivity_constant(m, cs);
      }
      emit(j, out);
      return exit_pass;
    }

    if (*mod) {
      const kpi::Grid g = mod_grid.grid();
      if (!mod_input.empty()) {
        const kpi::Field u = read_input(mod_input, "--input");
        const kpi::ModulationState st = kpi::decompose(u);
        kpi::json j = kpi::to_json(st);
        j["bound_ratio"] = kpi::number(kpi::modulation_bound_ratio(u, st));
        emit(j, out);
        return exit_pass;
      }
      const kpi::PerturbedSample s = kpi::perturbed_sample(mod_l, mod_delta, mod_seed, g);
      const kpi::GapCheck gap = kpi::lemma6_gap_check(s.u, mod_l, s.base);
      const kpi::LyapunovCheck ly = kpi::lyapunov_inequality_check(s.u, mod_l, s.base);
      kpi::json j = kpi::to_json(gap.state);
      j["grid"] = kpi::to_json(g);
      j["sample"] = {{"l", mod_l}, {"delta", mod_delta}, {"seed", mod_seed}, {"base", kpi::to_json(s.base)}};
      j["gap"] = {{"gap", gap.gap}, {"eta_mass", gap.eta_mass}, {"ratio", gap.ratio}, {"gamma_excess", gap.gamma_excess}};
      j["lyapunov"] = {{"lhs", ly.lhs}, {"a_term", ly.a_term}, {"eta_z1_sq", ly.eta_z1_sq}, {"k", ly.k}};
      j["bound_ratio"] = kpi::number(kpi::modulation_bound_ratio(s.u, gap.state));
      emit(j, out);
      return gap.gamma_excess >= -1e-10 && ly.k > 0.0 ? exit_pass : exit_fail;
    }

    if (*evo) {
      const kpi::Grid g = evo_grid.grid();
      kpi::EvolutionConfig cfg;
      cfg.dt = evo_dt;
      cfg.t_end = evo_t;
      cfg.observer_stride = stride;
      cfg.observe_modulation = evo_mod;
      const kpi::Field u0 = evo_delta > 0.0 ? kpi::perturbed_soliton(evo_a, evo_delta, evo_seed, g) : kpi::zaitsev(evo_a, g);
      const kpi::KpSolver solver(g);
      const double cfl = evo_dt * kpi::max_abs(u0) * solver.xi_max();
      std::cerr << "dt = " << evo_dt << ", cfl dt*max|u|*xi_max = " << cfl << (cfl > 1.0 ? "  (above 1: reduce dt)" : "")
                << "\n";
      if (snapshot_every > 0) {
        cfg.on_observe = [&](int index, double, const kpi::Field& u) {
          if (index % snapshot_every == 0) kpi::save_field(snapshot_prefix + "_" + std::to_string(index) + ".bin", u);
        };
      }
      const kpi::TrajectoryReport rep = kpi::run(u0, cfg, evo_a);
      kpi::json j = kpi::to_json(rep);
      j["grid"] = kpi::to_json(g);
      j["initial"] = {{"a", evo_a}, {"delta", evo_delta}, {"seed", evo_seed}};
      emit(j, out);
      return exit_pass;
    }

    if (*stab) {
      kpi::EvolutionConfig cfg;
      cfg.dt = stab_dt;
      cfg.observer_stride = 100;
      const kpi::StabilityReport rep =
          kpi::stability_experiment(stab_a, stab_delta, stab_t, stab_seed, cfg, stab_grid.grid());
      kpi::json j = kpi::to_json(rep);
      j["grid"] = kpi::to_json(stab_grid.grid());
      emit(j, out);
      return rep.ratio_controlled ? exit_pass : exit_fail;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return exit_usage;
  } catch (const kpi::EvolutionError& e) {
    std::cerr << "evolution stopped at t = " << e.time << ": " << e.what() << "\n";
    return exit_fail;
  } catch (const kpi::ModulationError& e) {
    std::cerr << e.what() << "\n";
    return exit_fail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_fail;
  }
  return exit_usage;
}
