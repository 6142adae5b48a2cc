// Acceptance checks. One line per criterion: `criterion N: PASS|FAIL  detail`.
// Usage: acceptance [--criterion N]...   (no argument runs all of them)

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/fixtures.hpp"
#include "tdalbp/tdalbp.hpp"

namespace fs = std::filesystem;
using namespace tdalbp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Command {
  int status = -1;
  std::string out;
};

Command run_command(const std::string& cmd) {
  Command c;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return c;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) c.out.append(buf, got);
  const int s = pclose(p);
  c.status = WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  return c;
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char ch : s) q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
  return q + "'";
}

fs::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  fs::path p = fs::temp_directory_path() / ("tdalbp_acc_" + tag + "_" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<Instance> small_battery(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  for (int k = 0; k < count; ++k) out.push_back(fixtures::random_instance(rng));
  return out;
}

// 1 ------------------------------------------------------------------------

Outcome sample23_golden() {
  std::ostringstream d;
  bool ok = true;
  const Instance td = fixtures::sample23();
  const Instance salbp = td.without_divisions();

  auto t0 = std::chrono::steady_clock::now();
  const SolveResult a = solve(salbp);
  const double ta = seconds_since(t0);
  ok &= a.optimal && a.best.station_count() == 12 && ta < 60;
  d << "SALBP-1 m=" << a.best.station_count() << (a.optimal ? " optimal" : " not proven") << " in " << fmt(ta, 2)
    << "s; ";

  t0 = std::chrono::steady_clock::now();
  const SolveResult b = solve(td);
  const double tb = seconds_since(t0);
  ok &= b.optimal && b.best.station_count() == 11 && tb < 60;
  d << "TDALBP m=" << b.best.station_count() << (b.optimal ? " optimal" : " not proven") << " in " << fmt(tb, 2)
    << "s; ";

  SolverConfig cfg;
  cfg.min_penalty_postpass = true;
  const SolveResult c = solve(td, cfg);
  ok &= c.optimal && c.penalty_minimized && c.best.station_count() == 11 && c.best.penalty_total == 2 &&
        validate_solution(td, c.best).ok();
  d << "min-penalty optimum F=" << c.best.penalty_total;
  return {ok, d.str()};
}

// 2 ------------------------------------------------------------------------

Outcome sample23_layouts() {
  const Instance inst = fixtures::sample23();
  const std::pair<const char*, int> layouts[] = {
      {fixtures::kSample23F8, 8}, {fixtures::kSample23F4, 4}, {fixtures::kSample23F2, 2}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& [text, f] : layouts) {
    const Solution sol = parse_solution(inst, text);
    const ValidationReport rep = validate_solution(inst, sol);
    const bool good = rep.ok() && sol.station_count() == 11 && sol.penalty_total == f;
    ok &= good;
    d << "F=" << f << (good ? " valid" : " INVALID") << "; ";
  }
  return {ok, d.str()};
}

// 3 and 9 ------------------------------------------------------------------

fs::path benchmark_dir() {
  if (const char* env = std::getenv("TDALBP_BENCHMARK_DIR")) return env;
  return TDALBP_BENCHMARK_DEFAULT;
}

std::optional<fs::path> find_benchmark(const std::string& name) {
  const fs::path dir = benchmark_dir();
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return std::nullopt;
  auto upper = [](std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
  };
  for (const auto& e : fs::recursive_directory_iterator(dir, ec)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = upper(e.path().extension().string());
    if (upper(e.path().stem().string()) == upper(name) && (ext == ".IN2" || ext == ".ALB")) return e.path();
  }
  return std::nullopt;
}

Outcome benchmark_table() {
  struct Row {
    const char* name;
    int c;
    int m;
  };
  const Row rows[] = {{"BOWMAN8", 20, 5},  {"MERTENS", 8, 5},   {"JAESCHKE", 7, 7}, {"GUNTHER", 49, 11},
                      {"GUNTHER", 41, 14}, {"SAWYER30", 30, 12}, {"LUTZ3", 150, 12}};
  bool ok = true;
  std::ostringstream d;
  for (const Row& r : rows) {
    const auto path = find_benchmark(r.name);
    d << r.name << " c=" << r.c << ": ";
    if (!path) {
      ok = false;
      d << "file missing; ";
      continue;
    }
    try {
      const Instance inst = parse_instance(fixtures::slurp(path->string()), r.c).without_divisions();
      SolverConfig cfg;
      cfg.time_limit = 300;
      const auto t0 = std::chrono::steady_clock::now();
      const SolveResult s = solve(inst, cfg);
      const double t = seconds_since(t0);
      const bool good = s.optimal && s.best.station_count() == r.m && t < 300;
      ok &= good;
      d << "m=" << s.best.station_count() << (s.optimal ? "" : " (not proven)") << " expected " << r.m << " "
        << fmt(t, 2) << "s; ";
    } catch (const std::exception& e) {
      ok = false;
      d << "error " << e.what() << "; ";
    }
  }
  if (!ok && !find_benchmark("SAWYER30"))
    d << "(benchmark files are looked up in " << benchmark_dir().string() << " or $TDALBP_BENCHMARK_DIR)";
  return {ok, d.str()};
}

Outcome sawyer_metrics() {
  const auto path = find_benchmark("SAWYER30");
  if (!path)
    return {false, "SAWYER30 file missing (looked in " + benchmark_dir().string() + " and $TDALBP_BENCHMARK_DIR)"};
  const Instance inst = parse_instance(fixtures::slurp(path->string()), 30).without_divisions();
  const SolveResult s = solve(inst);
  const bool ok = s.optimal && s.best.station_count() == 12 && std::abs(s.best.le - 90.00) <= 0.01;
  return {ok, "m=" + std::to_string(s.best.station_count()) + " LE=" + fmt(s.best.le, 2) +
                  " LT=" + std::to_string(s.best.lt) + " (expected m=12, LE=90.00)"};
}

// 4 ------------------------------------------------------------------------

Outcome oracle_equivalence() {
  int compared = 0;
  int mismatches = 0;
  int unproven = 0;
  int divisible = 0;
  for (const Instance& inst : small_battery(20240601, 400)) {
    if (expanded_node_count(inst) > 18) continue;
    divisible += inst.divisible_tasks().empty() ? 0 : 1;
    const OracleResult o = brute_force(inst);
    const SolveResult r = solve(inst);
    if (!validate_solution(inst, r.best).ok()) {
      ++mismatches;
      continue;
    }
    if (!r.optimal) {
      ++unproven;
      continue;
    }
    ++compared;
    if (r.best.station_count() != o.m_opt) ++mismatches;
  }
  const bool ok = compared >= 200 && mismatches == 0;
  return {ok, std::to_string(compared) + " instances compared (" + std::to_string(divisible) +
                  " with divisions), " + std::to_string(mismatches) + " mismatches, " +
                  std::to_string(unproven) + " not proven"};
}

// 5 ------------------------------------------------------------------------

Outcome monotonicity() {
  std::mt19937_64 rng(777);
  fixtures::RandomSpec spec;
  spec.division_prob = 0;
  spec.n_min = 6;
  spec.n_max = 16;
  spec.c_min = 8;
  spec.c_max = 20;
  spec.max_nodes = 100;
  std::vector<Instance> bases;
  for (int k = 0; k < 150; ++k) bases.push_back(fixtures::random_instance(rng, spec));
  bases.push_back(fixtures::sample23_salbp());

  int checked = 0;
  int violations = 0;
  int skipped = 0;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    const SolveResult plain = solve(bases[k]);
    std::vector<GenConfig> gens;
    for (double delta : {1.2, 1.5}) {
      GenConfig g;
      g.method = GenMethod::kM;
      g.delta = delta;
      gens.push_back(g);
    }
    GenConfig r;
    r.method = GenMethod::kR;
    r.seed = k + 1;
    gens.push_back(r);
    for (const GenConfig& g : gens) {
      const Instance td = generate(bases[k], g).instance;
      const SolveResult s = solve(td);
      if (!plain.optimal || !s.optimal) {
        ++skipped;
        continue;
      }
      ++checked;
      if (s.best.station_count() > plain.best.station_count()) ++violations;
    }
  }
  return {checked > 0 && violations == 0, std::to_string(checked) + " pairs checked, " + std::to_string(violations) +
                                              " violations, " + std::to_string(skipped) + " skipped (not proven)"};
}

// 6 ------------------------------------------------------------------------

Outcome bound_admissibility() {
  int checked = 0;
  int safe_violations = 0;
  int literal_violations = 0;
  for (std::uint64_t seed : {20240601ULL, 31337ULL}) {
    for (const Instance& inst : small_battery(seed, 400)) {
      const int opt = brute_force(inst).m_opt;
      ++checked;
      if (bound_report(inst, BoundMode::kSafe).lb_max > opt) ++safe_violations;
      if (bound_report(inst, BoundMode::kPaperLiteral).lb_max > opt) ++literal_violations;
    }
  }
  return {safe_violations == 0, std::to_string(checked) + " instances, safe violations " +
                                    std::to_string(safe_violations) + ", literal-reading violations " +
                                    std::to_string(literal_violations) + " (logged only)"};
}

// 7 ------------------------------------------------------------------------

bool highs_available() {
  const std::string py = TDALBP_PYTHON;
  if (py.empty()) return false;
  return run_command(quote(py) + " -c 'import highspy' 2>/dev/null").status == 0;
}

Outcome milp_crosscheck() {
  std::vector<std::pair<std::string, Instance>> cases{{"sample23", fixtures::sample23()}};
  {
    std::mt19937_64 rng(4242);
    fixtures::RandomSpec spec;
    spec.division_prob = 0;
    spec.n_min = 6;
    spec.n_max = 9;
    int made = 0;
    for (int k = 0; made < 5; ++k) {
      GenConfig g;
      g.method = k % 2 == 0 ? GenMethod::kM : GenMethod::kR;
      g.seed = static_cast<std::uint64_t>(k + 1);
      const Instance base = fixtures::random_instance(rng, spec);
      try {
        const Instance td = generate(base, g).instance;
        if (td.divisible_tasks().empty()) continue;
        cases.emplace_back("generated" + std::to_string(++made), td);
      } catch (const GeneratorError&) {
      }
    }
  }

  const bool external = highs_available();
  const fs::path dir = scratch_dir("milp");
  bool ok = true;
  std::ostringstream d;
  d << (external ? "HiGHS: " : "no external solver, row check: ");
  for (const auto& [name, inst] : cases) {
    const SolveResult r = solve(inst);
    const int opt = r.best.station_count();
    // m' from the heuristic, as the export command does.
    const int ub = mhh(inst).station_count();
    const MilpModel model = build_model(expand(inst, ub));
    const std::vector<std::string> violated = evaluate(model, encode(model, r.best));
    bool good = r.optimal && violated.empty();
    d << name << " opt=" << opt;
    if (!violated.empty()) d << " violated=" << violated.size();
    if (external) {
      const fs::path lp = dir / (name + ".lp");
      const fs::path sol = dir / (name + ".sol");
      write_text(lp, write_lp(model));
      const Command c = run_command(quote(TDALBP_PYTHON) + " " + quote(std::string(TDALBP_TOOLS_DIR) + "/highs_solve.py") +
                                    " " + quote(lp.string()) + " " + quote(sol.string()) + " 2>&1");
      if (c.status != 0) {
        good = false;
        d << " highs failed (" << c.status << ")";
      } else {
        try {
          const Solution s = parse_lp_solution(model, fixtures::slurp(sol.string()));
          good &= s.station_count() == opt;
          d << " milp=" << s.station_count();
        } catch (const std::exception& e) {
          good = false;
          d << " decode error: " << e.what();
        }
      }
    }
    d << (good ? "; " : " MISMATCH; ");
    ok &= good;
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return {ok, d.str()};
}

// 8 ------------------------------------------------------------------------

Outcome batch_determinism() {
  const fs::path dir = scratch_dir("batch");
  fs::copy_file(fixtures::data_path("sample23.alb"), dir / "sample23.alb");
  std::mt19937_64 rng(99);
  fixtures::RandomSpec spec;
  spec.division_prob = 0;
  spec.n_min = 8;
  spec.n_max = 14;
  spec.max_nodes = 100;
  for (int k = 0; k < 6; ++k)
    write_text(dir / ("rand" + std::to_string(k) + ".alb"), write_instance(fixtures::random_instance(rng, spec), Format::kAlb));

  bool ok = true;
  std::ostringstream d;
  for (const char* method : {"m", "r"}) {
    const std::string cmd = quote(TDALBP_CLI) + " batch " + quote(dir.string()) + " --method " + method +
                            " --seed 12345 --no-timing -j 4 2>/dev/null";
    const Command a = run_command(cmd);
    const Command b = run_command(cmd);
    const bool same = a.status == 0 && b.status == 0 && a.out == b.out && !a.out.empty();
    ok &= same;
    int rows = 0;
    for (char ch : a.out) rows += ch == '\n';
    d << "method " << method << ": " << (rows - 1) << " rows, " << (same ? "identical" : "DIFFERENT") << "; ";
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> criteria{
      {1, sample23_golden},    {2, sample23_layouts}, {3, benchmark_table},
      {4, oracle_equivalence}, {5, monotonicity},     {6, bound_admissibility},
      {7, milp_crosscheck},    {8, batch_determinism}, {9, sawyer_metrics}};

  std::vector<int> chosen;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      chosen.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 1;
    }
  }
  if (chosen.empty())
    for (const auto& [n, fn] : criteria) chosen.push_back(n);

  bool all = true;
  for (int n : chosen) {
    auto it = criteria.find(n);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << n << '\n';
      return 1;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    all &= o.pass;
  }
  return all ? 0 : 1;
}
