#pragma once

// Modified Hoffmann heuristic: fill stations one at a time with the feasible
// maximal load of least idle time.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tdalbp/expansion.hpp"
#include "tdalbp/instance.hpp"
#include "tdalbp/search.hpp"

namespace tdalbp {

class HeuristicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HeuristicConfig {
  std::int64_t max_loads_per_station = 10'000;
  DivisionPolicy division_policy = DivisionPolicy::kGreedyWhenBlocked;
};

namespace detail {

// Smaller idle, then fewer nodes, then lexicographically smaller (task, q) list.
inline bool better_load(const SearchModel& md, int idle_a, const std::vector<int>& a, int idle_b,
                        const std::vector<int>& b) {
  if (idle_a != idle_b) return idle_a < idle_b;
  if (a.size() != b.size()) return a.size() < b.size();
  auto key = [&](const std::vector<int>& load) {
    std::vector<std::pair<int, int>> k;
    for (int v : load) k.emplace_back(md.node_task(v), md.node_q(v));
    std::sort(k.begin(), k.end());
    return k;
  };
  return key(a) < key(b);
}

// Best load for the next station under the given policy, starting from
// whatever the expander already holds. Returns false when there is none.
inline bool best_load(const SearchModel& md, StationExpander& ex, DivisionPolicy policy, std::int64_t cap,
                      std::vector<int>& best, PartialSolution& next) {
  EnumerationOptions opt;
  opt.policy = policy;
  opt.rules = RuleSet{true, false, false};
  opt.max_loads = cap;
  int best_idle = 0;
  bool found = false;
  ex.enumerate(opt, [&](const StationExpander& view) {
    const int idle = view.residual();
    if (!found || better_load(md, idle, view.load(), best_idle, best)) {
      found = true;
      best = view.load();
      best_idle = idle;
      next = view.make_child();
    }
    return true;
  });
  return found;
}

// kGreedyWhenBlocked: fill the station with undivided tasks first, then let
// subtasks use the idle time that is left. Only when no undivided task can
// open the station are subtasks part of the initial choice.
inline PartialSolution mhh_state(const SearchModel& md, const HeuristicConfig& cfg) {
  if (cfg.max_loads_per_station < 1) throw std::invalid_argument("max_loads_per_station must be >= 1");
  PartialSolution state = root_state(md);
  StationExpander ex(md);
  const std::int64_t cap = cfg.max_loads_per_station;
  while (!state.complete()) {
    ex.reset(state);
    std::vector<int> best;
    PartialSolution next;
    bool found = best_load(md, ex, DivisionPolicy::kNever, cap, best, next);
    if (cfg.division_policy != DivisionPolicy::kNever) {
      if (found) {
        ex.reset(state);
        for (int v : best) ex.add(v);
        std::vector<int> filled;
        if (best_load(md, ex, DivisionPolicy::kAlways, cap, filled, next)) best = filled;
      } else {
        ex.reset(state);
        found = best_load(md, ex, DivisionPolicy::kAlways, cap, best, next);
      }
    }
    if (!found) throw HeuristicError("no feasible load for station " + std::to_string(state.m + 1));
    state = std::move(next);
  }
  return state;
}

}  // namespace detail

inline Solution mhh(const ExpandedGraph& g, const HeuristicConfig& cfg = {}) {
  const SearchModel md(g);
  return to_solution(md, detail::mhh_state(md, cfg));
}

inline Solution mhh(const Instance& inst, const HeuristicConfig& cfg = {}) {
  return mhh(expand(inst), cfg);
}

}  // namespace tdalbp
