#pragma once

// Exact station-oriented branch, bound and remember search.
//   Step I   heuristic incumbent
//   Step II  cyclic best-first search with bounded queues and load lists
//   Step III plain breadth-first search, run only when Step II was truncated

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tdalbp/bounds.hpp"
#include "tdalbp/expansion.hpp"
#include "tdalbp/hoffmann.hpp"
#include "tdalbp/instance.hpp"
#include "tdalbp/search.hpp"

namespace tdalbp {

struct SolverConfig {
  double lambda = 0.002;
  std::int64_t max_loads = 10'000;
  std::size_t max_queue = 300'000;
  double time_limit = 300.0;  // seconds, <= 0 means none
  BoundMode bound_mode = BoundMode::kSafe;
  bool min_penalty_postpass = false;
  bool heuristic_only = false;
  RuleSet rules;
  bool use_memo = true;
  std::size_t memo_capacity = 20'000'000;
  std::size_t max_bfs_states = 4'000'000;
  std::int64_t heuristic_max_loads = 10'000;
};

enum class Phase { kI = 1, kII = 2, kIII = 3 };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::kI:
      return "I";
    case Phase::kII:
      return "II";
    case Phase::kIII:
      return "III";
  }
  return "?";
}

struct LimitFlags {
  bool load_truncated = false;
  bool queue_overflow = false;
  bool memo_overflow = false;
  bool time_limit = false;
  bool bfs_limit = false;
  bool postpass_incomplete = false;

  bool any() const {
    return load_truncated || queue_overflow || memo_overflow || time_limit || bfs_limit || postpass_incomplete;
  }
};

struct SolveResult {
  Solution best;
  bool optimal = false;
  int lower_bound = 0;
  std::int64_t nodes_explored = 0;
  Phase phase_reached = Phase::kI;
  LimitFlags limits_hit;
  std::vector<int> incumbent_history;  // station counts, in order found
  bool optimality_test_fired = false;
  bool penalty_minimized = false;
  double seconds = 0.0;
};

// T_oc: total idle time when penalty time counts as idle. If it is below the
// lightest station load, no solution with one station less exists (that
// would need total work > (m - 1) c).
inline bool optimality_test(std::span<const int> loads, std::span<const int> penalties, int c) {
  if (loads.empty() || loads.size() != penalties.size()) return false;
  std::int64_t toc = 0;
  for (std::size_t k = 0; k < loads.size(); ++k) toc += c - (loads[k] - penalties[k]);
  return toc < *std::min_element(loads.begin(), loads.end());
}

inline bool optimality_test(const Instance& inst, const Solution& sol) {
  std::vector<int> loads;
  std::vector<int> pens;
  for (const auto& s : sol.stations) {
    loads.push_back(station_time(inst, s));
    pens.push_back(station_penalty(inst, s));
  }
  return optimality_test(loads, pens, inst.cycle_time());
}

namespace detail {

class Clock {
 public:
  explicit Clock(double limit) : limit_(limit), start_(std::chrono::steady_clock::now()) {}
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  bool expired() const { return limit_ > 0 && elapsed() >= limit_; }

 private:
  double limit_;
  std::chrono::steady_clock::time_point start_;
};

class BbrSearch {
 public:
  BbrSearch(const SearchModel& model, const SolverConfig& cfg, const Clock& clock, SolveResult& result,
            PartialSolution incumbent)
      : md_(model), cfg_(cfg), clock_(clock), res_(result), incumbent_(std::move(incumbent)) {
    ub_ = incumbent_.m;
  }

  const PartialSolution& incumbent() const { return incumbent_; }
  int upper_bound() const { return ub_; }

  // Returns true when the search space was exhausted without truncation.
  bool cbfs() {
    res_.phase_reached = Phase::kII;
    MemoStore memo(cfg_.memo_capacity);
    using Queue = std::map<std::pair<double, std::uint64_t>, PartialSolution>;
    std::vector<Queue> levels(1);
    std::uint64_t seq = 0;
    PartialSolution root = root_state(md_);
    levels[0].emplace(std::make_pair(0.0, seq++), root);
    bool complete_search = true;
    StationExpander ex(md_);
    EnumerationOptions opt{DivisionPolicy::kAlways, cfg_.rules, cfg_.max_loads};

    for (;;) {
      bool any = false;
      for (std::size_t level = 0; level < levels.size(); ++level) {
        if (levels[level].empty()) continue;
        any = true;
        auto it = levels[level].begin();
        PartialSolution e = std::move(it->second);
        levels[level].erase(it);
        if (e.lower_bound >= ub_) continue;
        ++res_.nodes_explored;
        ex.reset(e);
        bool truncated = false;
        std::vector<PartialSolution> kids;
        ex.enumerate(
            opt,
            [&](const StationExpander& view) {
              if (cfg_.rules.bbr && view.bbr_violation()) return true;
              if (view.incomplete_tasks() == 0) {
                if (e.m + 1 < ub_) improve(view.make_child());
                return true;
              }
              if (e.m + 1 + view.remaining_bound() >= ub_) return true;
              if (cfg_.use_memo && !memo.remember(view.child_key(), e.m + 1)) return true;
              kids.push_back(view.make_child());
              return true;
            },
            &truncated);
        if (truncated) {
          res_.limits_hit.load_truncated = true;
          complete_search = false;
        }
        if (proven()) return true;
        if (!kids.empty()) {
          if (levels.size() <= level + 1) levels.resize(level + 2);
          Queue& q = levels[level + 1];
          for (auto& k : kids) {
            const double p = priority(k, cfg_.lambda);
            q.emplace(std::make_pair(p, seq++), std::move(k));
            if (q.size() > cfg_.max_queue) {
              q.erase(std::prev(q.end()));
              res_.limits_hit.queue_overflow = true;
              complete_search = false;
            }
          }
        }
        if (clock_.expired()) {
          res_.limits_hit.time_limit = true;
          return false;
        }
      }
      if (!any) break;
    }
    if (memo.overflowed()) res_.limits_hit.memo_overflow = true;
    return complete_search;
  }

  // Level-by-level exhaustive search with a fresh memo.
  bool bfs() {
    res_.phase_reached = Phase::kIII;
    std::unordered_set<DynamicBitset, DynamicBitsetHash> seen;
    std::vector<PartialSolution> frontier{root_state(md_)};
    StationExpander ex(md_);
    EnumerationOptions opt{DivisionPolicy::kAlways, cfg_.rules, INT64_MAX};
    while (!frontier.empty()) {
      std::vector<PartialSolution> next;
      for (const PartialSolution& e : frontier) {
        if (e.lower_bound >= ub_) continue;
        ++res_.nodes_explored;
        ex.reset(e);
        bool found = false;
        bool overflow = false;
        ex.enumerate(opt, [&](const StationExpander& view) {
          if (cfg_.rules.bbr && view.bbr_violation()) return true;
          if (view.incomplete_tasks() == 0) {
            if (e.m + 1 < ub_) improve(view.make_child());
            found = true;
            return false;
          }
          if (e.m + 1 + view.remaining_bound() >= ub_) return true;
          if (cfg_.use_memo && !seen.insert(view.child_key()).second) return true;
          next.push_back(view.make_child());
          if (next.size() > cfg_.max_bfs_states) {
            overflow = true;
            return false;
          }
          return true;
        });
        // All states in one level have the same station count, so the first
        // complete child is optimal.
        if (found || proven()) return true;
        if (overflow) {
          res_.limits_hit.bfs_limit = true;
          return false;
        }
        if (clock_.expired()) {
          res_.limits_hit.time_limit = true;
          return false;
        }
      }
      frontier = std::move(next);
    }
    return true;
  }

  // Among solutions with the target station count, find the least total
  // penalty (depth-first, penalty and station bounds, memo on A).
  bool min_penalty(int target, PartialSolution& best) {
    std::unordered_map<DynamicBitset, int, DynamicBitsetHash> seen;
    int best_f = best.penalty;
    bool complete_search = true;
    EnumerationOptions opt{DivisionPolicy::kAlways, RuleSet{false, false, false}, INT64_MAX};
    StationExpander ex(md_);
    auto dfs = [&](auto&& self, const PartialSolution& e) -> void {
      if (!complete_search) return;
      if (clock_.expired()) {
        res_.limits_hit.time_limit = true;
        complete_search = false;
        return;
      }
      ex.reset(e);
      if (e.penalty + ex.penalty_lower_bound() >= best_f) return;
      std::vector<std::pair<int, PartialSolution>> kids;
      ex.enumerate(opt, [&](const StationExpander& view) {
        const int f = e.penalty + view.load_penalty();
        if (view.incomplete_tasks() == 0) {
          if (f < best_f) {
            best_f = f;
            best = view.make_child();
          }
          return true;
        }
        if (e.m + 1 + view.remaining_bound() > target) return true;
        if (f + view.penalty_lower_bound() >= best_f) return true;
        const DynamicBitset key = view.child_key();
        auto it = seen.find(key);
        if (it != seen.end() && it->second <= e.m + 1) return true;
        seen[key] = e.m + 1;
        kids.emplace_back(f, view.make_child());
        return true;
      });
      std::stable_sort(kids.begin(), kids.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [f, kid] : kids) {
        if (f >= best_f) break;
        self(self, kid);
        if (!complete_search) return;
      }
    };
    dfs(dfs, root_state(md_));
    return complete_search;
  }

 private:
  void improve(PartialSolution sol) {
    incumbent_ = std::move(sol);
    ub_ = incumbent_.m;
    res_.incumbent_history.push_back(ub_);
  }

  bool proven() const { return ub_ <= res_.lower_bound; }

  const SearchModel& md_;
  const SolverConfig& cfg_;
  const Clock& clock_;
  SolveResult& res_;
  PartialSolution incumbent_;
  int ub_ = 0;
};

}  // namespace detail

inline SolveResult solve(const Instance& inst, const SolverConfig& cfg = {}) {
  if (cfg.lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (cfg.max_loads < 1) throw std::invalid_argument("max_loads must be >= 1");
  if (cfg.max_queue < 1) throw std::invalid_argument("max_queue must be >= 1");
  detail::Clock clock(cfg.time_limit);
  SolveResult res;

  const ExpandedGraph g0 = expand(inst);
  HeuristicConfig hcfg;
  hcfg.max_loads_per_station = cfg.heuristic_max_loads;
  hcfg.division_policy =
      inst.divisible_tasks().empty() ? DivisionPolicy::kNever : DivisionPolicy::kGreedyWhenBlocked;
  PartialSolution start;
  {
    const SearchModel m0(g0, cfg.bound_mode);
    start = detail::mhh_state(m0, hcfg);
  }
  res.incumbent_history.push_back(start.m);
  res.lower_bound = bound_report(inst, cfg.bound_mode).lb_max;

  const SearchModel model(g0.with_station_bound(std::max(start.m, 1)), cfg.bound_mode);
  detail::BbrSearch search(model, cfg, clock, res, start);

  auto finish_check = [&]() {
    const Solution s = to_solution(model, search.incumbent());
    if (search.upper_bound() <= res.lower_bound) return true;
    if (optimality_test(inst, s)) {
      res.optimality_test_fired = true;
      return true;
    }
    return false;
  };

  bool optimal = finish_check();
  if (!optimal && !cfg.heuristic_only) {
    optimal = search.cbfs();
    if (!optimal) optimal = finish_check();
    if (!optimal && !res.limits_hit.time_limit) optimal = search.bfs();
  }
  if (optimal) res.lower_bound = search.upper_bound();

  PartialSolution best = search.incumbent();
  if (cfg.min_penalty_postpass && optimal && !cfg.heuristic_only) {
    res.penalty_minimized = search.min_penalty(best.m, best);
    if (!res.penalty_minimized) res.limits_hit.postpass_incomplete = true;
  }

  res.best = to_solution(model, best);
  res.optimal = optimal;
  res.seconds = clock.elapsed();
  return res;
}

}  // namespace tdalbp
