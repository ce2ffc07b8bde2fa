// symmax: run scenarios and structural checks from the command line.
//
//   symmax run <scenario> [overrides]
//   symmax check <irregularity|redundancy|brackets|adjoint|all> [scenario]
//   symmax list-scenarios
//
// Exit codes: 0 success, 1 check failed, 2 usage or configuration error,
// 3 numerical blow-up or solver divergence.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "symmax/scenario.hpp"

namespace fs = std::filesystem;
using namespace symmax;

namespace {

constexpr int exit_ok = 0, exit_fail = 1, exit_usage = 2, exit_numeric = 3;

struct Overrides {
  std::optional<long> steps, monitor_every, snapshot_every, max_iter;
  std::optional<double> dt, c, tol;
  std::optional<std::string> method, output_dir;
  std::optional<std::uint64_t> seed;
};

std::string scenario_dir(const std::string &flag) {
  if (!flag.empty())
    return flag;
  if (const char *env = std::getenv("SYMMAX_SCENARIO_DIR"))
    return env;
#ifdef SYMMAX_SCENARIO_DIR
  return SYMMAX_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

// A path, or the name of a shipped scenario.
std::string resolve(const std::string &arg, const std::string &dir) {
  if (fs::is_regular_file(arg))
    return arg;
  const fs::path named = fs::path(dir) / (arg + ".scenario");
  if (fs::is_regular_file(named))
    return named.string();
  return arg;
}

Scenario load_with_overrides(const std::string &path, const Overrides &o) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError({path + ": cannot open scenario file"});
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), path);
  if (o.steps) s.steps = *o.steps;
  if (o.monitor_every) s.monitor_every = *o.monitor_every;
  if (o.snapshot_every) s.snapshot_every = *o.snapshot_every;
  if (o.max_iter) s.stepper.midpoint_max_iter = static_cast<int>(*o.max_iter);
  if (o.dt) s.stepper.dt = *o.dt;
  if (o.c) s.c = *o.c;
  if (o.tol) s.stepper.midpoint_tol = *o.tol;
  if (o.method) s.stepper.method = *o.method == "rk4" ? Method::rk4 : Method::implicit_midpoint;
  if (o.output_dir) s.output_dir = *o.output_dir;
  if (o.seed) s.initial.seed = *o.seed;
  auto problems = validate_scenario(s);
  if (!problems.empty())
    throw ConfigError(std::move(problems));
  return s;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

void print_record(const MonitorRecord &r) {
  std::cout << "final t=" << fmt(r.t) << " hamiltonian=" << fmt(r.hamiltonian)
            << " energy=" << fmt(r.energy) << " div_b=" << fmt(r.div_b)
            << " div_d=" << fmt(r.div_d) << '\n';
}

std::string snapshot_name(long k) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.csv", k);
  return buf;
}

int cmd_run(const Scenario &s) {
  const MaxwellOperator op = make_operator(s);
  const Grid3 &g = op.grid();
  const DoubledState st0 = make_initial_state(s, g);
  if (auto w = cfl_warning(s.stepper, g.min_spacing(), s.c, op.wave_speed_gain()))
    std::cerr << "warning: " << *w << '\n';

  fs::create_directories(s.output_dir);
  const fs::path out(s.output_dir);
  if (s.snapshot_every > 0)
    write_snapshot((out / snapshot_name(0)).string(), st0.q);
  StepObserver observer = nullptr;
  if (s.snapshot_every > 0)
    observer = [&](long k, double, const DoubledState &st) {
      if (k % s.snapshot_every == 0)
        write_snapshot((out / snapshot_name(k)).string(), st.q);
    };

  const RunResult result = run(op, st0, s.stepper, s.steps, s.monitor_every, observer);

  std::ofstream csv(out / "monitors.csv");
  if (!csv)
    throw ConfigError({"cannot write " + (out / "monitors.csv").string()});
  write_monitor_csv(csv, result.series,
                    {"scenario = " + s.name, "seed = " + std::to_string(s.initial.seed),
                     "prng = mt19937_64",
                     std::string("method = ") + method_name(s.stepper.method) +
                         ", dt = " + fmt(s.stepper.dt) + ", steps = " + std::to_string(s.steps)});
  print_record(result.series.back());
  std::cout << "wrote " << (out / "monitors.csv").string() << '\n';
  return exit_ok;
}

// Checks ---------------------------------------------------------------------

bool report(const std::string &name, bool pass) {
  std::cout << "RESULT " << name << ' ' << (pass ? "PASS" : "FAIL") << '\n';
  return pass;
}

bool check_irregularity(double c) {
  const IrregularityReport r = irregularity_report(c);
  std::cout << "Hessian of the vacuum Lagrangian, c = " << fmt(c) << " (fixed probe):\n";
  for (const auto &row : r.hessians.front()) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "   %13.6e %13.6e %13.6e %13.6e\n", row[0], row[1], row[2],
                  row[3]);
    std::cout << buf;
  }
  std::cout << "  expected spatial block 1/(4 pi c^2) = " << fmt_short(r.expected_block) << '\n'
            << "  probes: " << r.probes.size() << ", max |row/col 0| = " << fmt_short(r.max_row0)
            << ", max |det| = " << fmt_short(r.max_abs_det)
            << ", max block error (rel) = " << fmt_short(r.max_block_error) << '\n';
  return report("irregularity", r.pass);
}

bool check_redundancy(const MaxwellOperator &op, std::uint64_t seed) {
  const FieldState q = random_field(op.grid(), seed);
  const RedundancyReport r = verify_redundancy(op, q);
  std::cout << "Divergence constraints along the flow (random q, seed " << seed << "):\n"
            << "  d/dt div B = " << fmt_short(r.ddt_div_b)
            << ", d/dt div D = " << fmt_short(r.ddt_div_d) << '\n'
            << "  telescoping E = " << fmt_short(r.mixed_e)
            << ", telescoping H = " << fmt_short(r.mixed_h) << '\n'
            << "  bound = " << fmt_short(r.tolerance * r.scale) << '\n';
  return report("redundancy", r.pass);
}

bool check_brackets(const MaxwellOperator &op, std::uint64_t seed) {
  const DoubledState st(random_field(op.grid(), seed), random_field(op.grid(), seed + 1));
  const BracketReport b = check_bracket_axioms(op, st, seed);
  const FirstGroupReport f = check_first_group_identity(op, st.q);
  std::cout << "Poisson bracket on the doubled phase space:\n"
            << "  canonical relations error = " << fmt_short(b.canonical_error) << '\n'
            << "  antisymmetry defect = " << fmt_short(b.antisymmetry_defect) << '\n'
            << "  Jacobi defect (rel) = " << fmt_short(b.jacobi_defect) << '\n'
            << "  {xi, H} vs Hamilton equations (rel) = " << fmt_short(b.flow_error) << '\n'
            << "  first group identity difference = " << fmt_short(f.max_difference) << '\n';
  return report("brackets", b.pass && f.pass);
}

bool check_adjoint(const MaxwellOperator &op, std::uint64_t seed) {
  const TransposeReport t = check_transpose(op, 100, seed);
  std::cout << "Transpose contract <p, Lq> = <L^T p, q> on " << t.pairs
            << " random pairs: max relative defect = " << fmt_short(t.max_relative_defect)
            << '\n';
  return report("adjoint", t.pass);
}

MaxwellOperator default_check_operator() {
  return MaxwellOperator(Chart::cartesian(), Medium::vacuum(),
                         Grid3({8, 8, 8}, {0, 0, 0}, {1, 1, 1}), 1.0);
}

int cmd_check(const std::string &which, const std::optional<Scenario> &s) {
  const MaxwellOperator op = s ? make_operator(*s) : default_check_operator();
  const std::uint64_t seed = s ? s->initial.seed : 2015;
  const double c = op.light_speed();
  bool ok = true;
  if (which == "irregularity" || which == "all")
    ok = check_irregularity(c) && ok;
  if (which == "redundancy" || which == "all")
    ok = check_redundancy(op, seed) && ok;
  if (which == "brackets" || which == "all")
    ok = check_brackets(op, seed) && ok;
  if (which == "adjoint" || which == "all")
    ok = check_adjoint(op, seed) && ok;
  return ok ? exit_ok : exit_fail;
}

int cmd_list(const std::string &dir) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: scenario directory not found: " << dir << '\n';
    return exit_usage;
  }
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.path().extension() == ".scenario")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto &f : files) {
    std::ifstream in(f);
    std::string first;
    std::getline(in, first);
    const std::string note = first.rfind("# ", 0) == 0 ? first.substr(2) : "";
    std::cout << f.stem().string() << "\t" << note << '\n';
  }
  return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Doubled-variable Hamiltonian Maxwell solver"};
  app.require_subcommand(1);
  std::string dir_flag;
  app.add_option("--scenario-dir", dir_flag, "Directory of shipped scenarios");

  Overrides o;
  std::string run_target;
  auto *run_cmd = app.add_subcommand("run", "Run a scenario");
  run_cmd->add_option("scenario", run_target, "Scenario file or shipped name")->required();
  run_cmd->add_option("--steps", o.steps, "Number of time steps");
  run_cmd->add_option("--dt", o.dt, "Time step");
  run_cmd->add_option("--method", o.method, "rk4 or implicit_midpoint")
      ->check(CLI::IsMember({"rk4", "implicit_midpoint"}));
  run_cmd->add_option("--monitor-every", o.monitor_every, "Monitor cadence in steps");
  run_cmd->add_option("--snapshot-every", o.snapshot_every, "Snapshot cadence (0 = none)");
  run_cmd->add_option("--output-dir", o.output_dir, "Output directory");
  run_cmd->add_option("--c", o.c, "Light speed");
  run_cmd->add_option("--seed", o.seed, "Seed for random momenta");
  run_cmd->add_option("--tol", o.tol, "Implicit midpoint tolerance");
  run_cmd->add_option("--max-iter", o.max_iter, "Implicit midpoint iteration cap");

  std::string which, check_target;
  auto *check_cmd = app.add_subcommand("check", "Run structural checks");
  check_cmd->add_option("which", which, "irregularity, redundancy, brackets, adjoint or all")
      ->required()
      ->check(CLI::IsMember({"irregularity", "redundancy", "brackets", "adjoint", "all"}));
  check_cmd->add_option("scenario", check_target, "Scenario file or shipped name");

  auto *list_cmd = app.add_subcommand("list-scenarios", "List shipped scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  const std::string dir = scenario_dir(dir_flag);
  try {
    if (*run_cmd)
      return cmd_run(load_with_overrides(resolve(run_target, dir), o));
    if (*check_cmd) {
      std::optional<Scenario> s;
      if (!check_target.empty())
        s = load_with_overrides(resolve(check_target, dir), {});
      return cmd_check(which, s);
    }
    if (*list_cmd)
      return cmd_list(dir);
  } catch (const ConfigError &e) {
    std::cerr << "error: invalid configuration\n";
    for (const auto &p : e.problems())
      std::cerr << "  " << p << '\n';
    return exit_usage;
  } catch (const BlowUpError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const DivergenceError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const StepError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const fs::filesystem_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
