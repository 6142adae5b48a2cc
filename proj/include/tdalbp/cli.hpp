#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 invalid or
// infeasible input, 3 a search limit was hit before optimality was proven.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tdalbp/bounds.hpp"
#include "tdalbp/expansion.hpp"
#include "tdalbp/generator.hpp"
#include "tdalbp/hoffmann.hpp"
#include "tdalbp/instance.hpp"
#include "tdalbp/instance_io.hpp"
#include "tdalbp/milp.hpp"
#include "tdalbp/oracle.hpp"
#include "tdalbp/solver.hpp"

namespace tdalbp::cli {

enum ExitCode { kOk = 0, kUsage = 1, kInvalid = 2, kLimit = 3 };

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunReport {
  std::string instance;
  std::string mode;  // SALBP-1 or TDALBP
  int c = 0;
  int n = 0;
  int m = 0;
  int penalty = 0;
  double le = 0;
  int lt = 0;
  bool optimal = false;
  double seconds = 0;
};

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Tab-separated by default, space-aligned with pretty = true.
inline std::string render_table(const std::vector<std::vector<std::string>>& rows, bool pretty) {
  std::ostringstream os;
  std::vector<std::size_t> width;
  if (pretty)
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (width.size() <= i) width.push_back(0);
        width[i] = std::max(width[i], r[i].size());
      }
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i > 0) os << (pretty ? "  " : "\t");
      os << r[i];
      if (pretty && i + 1 < r.size()) os << std::string(width[i] - r[i].size(), ' ');
    }
    os << '\n';
  }
  return os.str();
}

inline std::vector<std::string> report_header() {
  return {"instance", "mode", "c", "n", "m", "F", "LE", "LT", "optimal", "cpu_s"};
}

inline std::vector<std::string> report_row(const RunReport& r, bool timing = true) {
  return {r.instance,
          r.mode,
          std::to_string(r.c),
          std::to_string(r.n),
          std::to_string(r.m),
          std::to_string(r.penalty),
          fixed(r.le, 2),
          std::to_string(r.lt),
          r.optimal ? "yes" : "no",
          timing ? fixed(r.seconds, 3) : "-"};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

inline Instance load_instance(const std::string& path, std::optional<int> cycle, bool salbp) {
  const Instance inst = parse_instance(read_file(path), cycle);
  return salbp ? inst.without_divisions() : inst;
}

inline std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

inline double default_time_limit() {
  if (const char* env = std::getenv("TDALBP_TIME_LIMIT")) {
    try {
      return std::stod(env);
    } catch (const std::exception&) {
    }
  }
  return 300.0;
}

inline RunReport make_report(const std::string& name, const Instance& inst, const SolveResult& r) {
  RunReport rep;
  rep.instance = name;
  rep.mode = inst.divisible_tasks().empty() ? "SALBP-1" : "TDALBP";
  rep.c = inst.cycle_time();
  rep.n = inst.n() - (inst.has_dummy_terminal() ? 1 : 0);
  rep.m = r.best.station_count();
  rep.penalty = r.best.penalty_total;
  rep.le = r.best.le;
  rep.lt = r.best.lt;
  rep.optimal = r.optimal;
  rep.seconds = r.seconds;
  return rep;
}

struct InstanceArgs {
  std::string file;
  std::optional<int> cycle;
  bool salbp = false;
  bool tdalbp = false;
};

inline void add_instance_args(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("instance", a.file, "instance file (alb or tdalb)")->required();
  cmd->add_option("-c,--cycle-time", a.cycle, "cycle time (overrides the CYCLE header)")
      ->check(CLI::PositiveNumber);
  auto* s = cmd->add_flag("--salbp", a.salbp, "ignore divisions");
  auto* t = cmd->add_flag("--tdalbp", a.tdalbp, "use divisions from the file (default)");
  s->excludes(t);
}

inline bool batch_candidate(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".alb" || ext == ".tdalb" || ext == ".IN2" || ext == ".in2";
}

// Every instance is solved as SALBP-1 and, when it has (or gets) divisions,
// as TDALBP. Rows come out in file-name order whatever the job count.
inline int run_batch(const std::string& dir, const std::string& method, double delta, std::uint64_t seed, int jobs,
                     std::optional<int> cycle, const SolverConfig& cfg, bool timing, bool pretty, std::ostream& out,
                     std::ostream& err) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && batch_candidate(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());

  struct Outcome {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> warnings;
    std::string error;
    bool limit = false;
  };
  std::vector<Outcome> results(files.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      Outcome& o = results[i];
      const std::string name = files[i].stem().string();
      try {
        const Instance inst = parse_instance(read_file(files[i].string()), cycle);
        const Instance base = inst.without_divisions();
        Instance divided = inst;
        if (method != "none") {
          GenConfig g;
          g.method = method == "m" ? GenMethod::kM : GenMethod::kR;
          g.delta = delta;
          g.seed = seed;
          GenResult gr = generate(base, g);
          o.warnings = gr.warnings;
          divided = gr.instance;
        }
        const SolveResult r1 = solve(base, cfg);
        o.rows.push_back(report_row(make_report(name, base, r1), timing));
        o.limit |= !r1.optimal && r1.limits_hit.any();
        if (!divided.divisible_tasks().empty()) {
          const SolveResult r2 = solve(divided, cfg);
          o.rows.push_back(report_row(make_report(name, divided, r2), timing));
          o.limit |= !r2.optimal && r2.limits_hit.any();
        }
      } catch (const std::exception& e) {
        o.error = name + ": " + e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<std::vector<std::string>> table{report_header()};
  int code = kOk;
  for (const Outcome& o : results) {
    for (const auto& w : o.warnings) err << "warning: " << w << '\n';
    if (!o.error.empty()) {
      err << "error: " << o.error << '\n';
      code = kInvalid;
      continue;
    }
    for (const auto& r : o.rows) table.push_back(r);
    if (o.limit && code == kOk) code = kLimit;
  }
  out << render_table(table, pretty);
  return code;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Assembly line balancing with task division", "tdalbp"};
  app.require_subcommand(1);

  // solve
  InstanceArgs solve_in;
  SolverConfig scfg;
  scfg.time_limit = default_time_limit();
  std::string bound_mode = "safe";
  bool pretty = false;
  std::string solution_out;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance exactly");
  add_instance_args(solve_cmd, solve_in);
  solve_cmd->add_option("--lambda", scfg.lambda, "weight of unassigned tasks in the priority")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--max-loads", scfg.max_loads, "loads generated per station in best-first search")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-queue", scfg.max_queue, "states kept per level")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--time-limit", scfg.time_limit, "seconds (0: none; default TDALBP_TIME_LIMIT or 300)");
  solve_cmd->add_option("--bound-mode", bound_mode, "safe or paper_literal")
      ->check(CLI::IsMember({"safe", "paper_literal"}));
  solve_cmd->add_flag("--min-penalty-postpass", scfg.min_penalty_postpass,
                  "among optimal solutions, minimize total penalty");
  solve_cmd->add_flag("--heuristic-only", scfg.heuristic_only, "stop after the heuristic");
  solve_cmd->add_flag("--pretty", pretty, "aligned columns");
  solve_cmd->add_option("--solution-out", solution_out, "write the station loads to a file");

  // bounds
  InstanceArgs bounds_in;
  std::string bounds_mode = "safe";
  auto* bounds = app.add_subcommand("bounds", "lower bounds on the station count");
  add_instance_args(bounds, bounds_in);
  bounds->add_option("--bound-mode", bounds_mode, "safe or paper_literal")
      ->check(CLI::IsMember({"safe", "paper_literal"}));
  bounds->add_flag("--pretty", pretty, "aligned columns");

  // oracle
  InstanceArgs oracle_in;
  int cap = 18;
  auto* oracle = app.add_subcommand("oracle", "exhaustive solve of a small instance");
  add_instance_args(oracle, oracle_in);
  oracle->add_option("--cap", cap, "largest expanded node count accepted")->check(CLI::Range(1, 24));

  // generate
  InstanceArgs gen_in;
  std::string method = "m";
  double delta = 1.5;
  std::uint64_t seed = 1;
  int penalty = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "add divisions to an instance");
  add_instance_args(gen, gen_in);
  gen->add_option("--method", method, "m (median) or r (random)")->check(CLI::IsMember({"m", "r", "M", "R"}));
  gen->add_option("--delta", delta, "Method-M threshold factor (> 1)");
  gen->add_option("--seed", seed, "Method-R seed");
  gen->add_option("--penalty", penalty, "penalty per subtask")->check(CLI::PositiveNumber);
  gen->add_option("-o,--out", gen_out, "output file (default stdout)");

  // export-lp
  InstanceArgs lp_in;
  std::optional<int> m_prime;
  std::string lp_out;
  auto* lp = app.add_subcommand("export-lp", "write the binary program in LP format");
  add_instance_args(lp, lp_in);
  lp->add_option("--m-prime", m_prime, "station bound (default: heuristic solution)")->check(CLI::PositiveNumber);
  lp->add_option("-o,--out", lp_out, "output file (default stdout)");

  // import-lp
  InstanceArgs imp_in;
  std::optional<int> imp_m_prime;
  std::string values_file;
  auto* imp = app.add_subcommand("import-lp", "read solver values for an exported program");
  add_instance_args(imp, imp_in);
  imp->add_option("values", values_file, "file with `name value` lines")->required();
  imp->add_option("--m-prime", imp_m_prime, "station bound used for the export")->check(CLI::PositiveNumber);

  // validate
  InstanceArgs val_in;
  std::string solution_file;
  auto* val = app.add_subcommand("validate", "check a solution against an instance");
  add_instance_args(val, val_in);
  val->add_option("solution", solution_file, "solution file, one station per line")->required();

  // batch
  std::string batch_dir;
  std::string batch_method = "none";
  double batch_delta = 1.5;
  std::uint64_t batch_seed = 1;
  int jobs = 1;
  bool no_timing = false;
  std::optional<int> batch_cycle;
  SolverConfig bcfg;
  bcfg.time_limit = default_time_limit();
  auto* batch = app.add_subcommand("batch", "solve every instance in a directory (SALBP-1 and TDALBP)");
  batch->add_option("directory", batch_dir, "directory of .alb/.tdalb/.IN2 files")->required()->check(CLI::ExistingDirectory);
  batch->add_option("--method", batch_method, "divisions: none (from file), m or r")
      ->check(CLI::IsMember({"none", "m", "r"}));
  batch->add_option("--delta", batch_delta, "Method-M threshold factor");
  batch->add_option("--seed", batch_seed, "Method-R seed");
  batch->add_option("-j,--jobs", jobs, "parallel solves")->check(CLI::Range(1, 256));
  batch->add_option("-c,--cycle-time", batch_cycle, "cycle time for files without one")->check(CLI::PositiveNumber);
  batch->add_option("--time-limit", bcfg.time_limit, "seconds per solve");
  batch->add_option("--max-loads", bcfg.max_loads, "loads generated per station")->check(CLI::PositiveNumber);
  batch->add_flag("--no-timing", no_timing, "print '-' instead of cpu seconds");
  batch->add_flag("--pretty", pretty, "aligned columns");

  // dump-expanded
  InstanceArgs dump_in;
  std::optional<int> dump_m;
  auto* dump = app.add_subcommand("dump-expanded", "print the expanded graph with station intervals");
  add_instance_args(dump, dump_in);
  dump->add_option("--m-prime", dump_m, "station bound")->check(CLI::PositiveNumber);

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto station_bound = [](const Instance& inst, std::optional<int> m) {
    if (m) return *m;
    HeuristicConfig h;
    h.division_policy = inst.divisible_tasks().empty() ? DivisionPolicy::kNever : DivisionPolicy::kGreedyWhenBlocked;
    return mhh(inst, h).station_count();
  };

  try {
    if (solve_cmd->parsed()) {
      const Instance inst = load_instance(solve_in.file, solve_in.cycle, solve_in.salbp);
      scfg.bound_mode = bound_mode == "safe" ? BoundMode::kSafe : BoundMode::kPaperLiteral;
      const SolveResult r = tdalbp::solve(inst, scfg);
      out << render_table({report_header(), report_row(make_report(stem(solve_in.file), inst, r))}, pretty);
      out << write_solution(inst, r.best);
      if (!solution_out.empty()) write_output(solution_out, write_solution(inst, r.best), out);
      if (!r.optimal && r.limits_hit.any()) {
        err << "search limit reached before optimality was proven\n";
        return kLimit;
      }
      return kOk;
    }
    if (bounds->parsed()) {
      const Instance inst = load_instance(bounds_in.file, bounds_in.cycle, bounds_in.salbp);
      const BoundReport b =
          bound_report(inst, bounds_mode == "safe" ? BoundMode::kSafe : BoundMode::kPaperLiteral);
      out << render_table({{"lb1", "lb2", "lb3", "lb_bin", "lb_max", "mode"},
                           {std::to_string(b.lb1), std::to_string(b.lb2), std::to_string(b.lb3),
                            std::to_string(b.lb_bin), std::to_string(b.lb_max), to_string(b.mode)}},
                          pretty);
      return kOk;
    }
    if (oracle->parsed()) {
      const Instance inst = load_instance(oracle_in.file, oracle_in.cycle, oracle_in.salbp);
      const OracleResult r = brute_force(inst, cap);
      out << render_table({{"m_opt", "min_penalty", "count_optima"},
                           {std::to_string(r.m_opt), std::to_string(r.min_penalty_among_optima),
                            std::to_string(r.count_optima)}},
                          false);
      return kOk;
    }
    if (gen->parsed()) {
      const Instance inst = load_instance(gen_in.file, gen_in.cycle, true);
      GenConfig g;
      g.method = (method == "m" || method == "M") ? GenMethod::kM : GenMethod::kR;
      g.delta = delta;
      g.seed = seed;
      g.penalty_per_subtask = penalty;
      const GenResult r = generate(inst, g);
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
      write_output(gen_out, write_instance(r.instance, Format::kTdalb), out);
      return kOk;
    }
    if (lp->parsed()) {
      const Instance inst = load_instance(lp_in.file, lp_in.cycle, lp_in.salbp);
      const MilpModel model = build_model(expand(inst, station_bound(inst, m_prime)));
      write_output(lp_out, write_lp(model), out);
      return kOk;
    }
    if (imp->parsed()) {
      const Instance inst = load_instance(imp_in.file, imp_in.cycle, imp_in.salbp);
      const MilpModel model = build_model(expand(inst, station_bound(inst, imp_m_prime)));
      const Solution sol = parse_lp_solution(model, read_file(values_file));
      out << "m=" << sol.station_count() << " F=" << sol.penalty_total << " LE=" << fixed(sol.le, 2)
          << " LT=" << sol.lt << '\n';
      out << write_solution(inst, sol);
      return kOk;
    }
    if (val->parsed()) {
      const Instance inst = load_instance(val_in.file, val_in.cycle, val_in.salbp);
      const Solution sol = parse_solution(inst, read_file(solution_file));
      const ValidationReport rep = validate_solution(inst, sol);
      if (!rep.ok()) {
        out << "INVALID\n";
        for (const Violation& v : rep.violations) out << v.message << '\n';
        return kInvalid;
      }
      out << "OK m=" << sol.station_count() << " F=" << sol.penalty_total << " LE=" << fixed(sol.le, 2)
          << " LT=" << sol.lt << '\n';
      return kOk;
    }
    if (batch->parsed()) {
      return run_batch(batch_dir, batch_method, batch_delta, batch_seed, jobs, batch_cycle, bcfg, !no_timing,
                       pretty, out, err);
    }
    if (dump->parsed()) {
      const Instance inst = load_instance(dump_in.file, dump_in.cycle, dump_in.salbp);
      out << (dump_m ? expand(inst, *dump_m) : expand(inst)).dump();
      return kOk;
    }
  } catch (const OracleError& e) {
    err << "oracle: " << e.what() << '\n';
    return kInvalid;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const InstanceError& e) {
    err << "invalid instance: " << e.what() << '\n';
    return kInvalid;
  } catch (const MilpError& e) {
    err << "lp: " << e.what() << '\n';
    return kInvalid;
  } catch (const HeuristicError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace tdalbp::cli
