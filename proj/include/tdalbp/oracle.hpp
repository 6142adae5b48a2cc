#pragma once

// Exhaustive reference solver for small instances. It shares nothing with the
// search code beyond the Instance type: activations are enumerated from
// scratch and each activation choice is solved by dynamic programming over
// subsets of the activated nodes.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tdalbp/instance.hpp"

namespace tdalbp {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  int m_opt = 0;
  int min_penalty_among_optima = 0;
  std::uint64_t count_optima = 0;
};

namespace detail {

struct OracleItem {
  int task = 0;     // 1-based
  int q = 1;
  int time = 0;     // final time
  int penalty = 0;
  int twin = -1;    // earlier identical piece of the same task, if any
};

// Every way to activate a task: {1}, or subsets of {2..r} whose given times
// sum to t. Subsets with the same multiset of (given, penalty) are kept once.
inline std::vector<std::vector<int>> oracle_activations(const Instance& inst, int task) {
  const auto& opts = inst.options(task);
  std::vector<std::vector<int>> out{{1}};
  const int k = static_cast<int>(opts.size()) - 1;
  std::vector<std::vector<std::pair<int, int>>> seen;
  for (std::uint32_t bits = 1; k > 0 && bits < (1U << k); ++bits) {
    int sum = 0;
    std::vector<int> qs;
    std::vector<std::pair<int, int>> sig;
    for (int b = 0; b < k; ++b) {
      if (!(bits & (1U << b))) continue;
      const TaskOption& o = opts[static_cast<std::size_t>(b + 1)];
      sum += o.given;
      qs.push_back(b + 2);
      sig.emplace_back(o.given, o.penalty);
    }
    if (sum != inst.time(task)) continue;
    std::sort(sig.begin(), sig.end());
    if (std::find(seen.begin(), seen.end(), sig) != seen.end()) continue;
    seen.push_back(sig);
    out.push_back(qs);
  }
  return out;
}

struct OracleCell {
  int m = std::numeric_limits<int>::max();
  std::uint64_t count = 0;
};

// Minimum stations and number of optimal station sequences for one fixed
// set of activated items.
inline OracleCell oracle_solve_items(const Instance& inst, const std::vector<OracleItem>& items) {
  const int c = inst.cycle_time();
  const int N = static_cast<int>(items.size());
  // Items of each task, as a mask.
  std::vector<std::uint32_t> of_task(static_cast<std::size_t>(inst.n()) + 1, 0);
  for (int i = 0; i < N; ++i) of_task[static_cast<std::size_t>(items[static_cast<std::size_t>(i)].task)] |= 1U << i;
  // Items that must be placed no later than item i.
  std::vector<std::uint32_t> before(static_cast<std::size_t>(N), 0);
  for (int i = 0; i < N; ++i)
    for (int p : inst.predecessors(items[static_cast<std::size_t>(i)].task))
      before[static_cast<std::size_t>(i)] |= of_task[static_cast<std::size_t>(p)];

  const std::uint32_t full = N == 32 ? ~0U : (1U << N) - 1;
  std::vector<OracleCell> dp(static_cast<std::size_t>(full) + 1);
  dp[0] = OracleCell{0, 1};
  std::vector<int> free_items;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    const OracleCell cur = dp[mask];
    if (cur.count == 0) continue;
    free_items.clear();
    for (int i = 0; i < N; ++i)
      if (!(mask & (1U << i))) free_items.push_back(i);
    // Enumerate nonempty loads among the free items by cycle time, then
    // check the remaining feasibility conditions.
    auto rec = [&](auto&& self, std::size_t from, std::uint32_t load, int time) -> void {
      if (load != 0) {
        bool ok = true;
        for (int i = 0; i < N && ok; ++i) {
          if (!(load & (1U << i))) continue;
          const OracleItem& it = items[static_cast<std::size_t>(i)];
          if ((before[static_cast<std::size_t>(i)] & ~(mask | load)) != 0) ok = false;
          if (it.twin >= 0 && !(mask & (1U << it.twin))) ok = false;
          if ((of_task[static_cast<std::size_t>(it.task)] & load) != (1U << i)) ok = false;
        }
        if (ok) {
          OracleCell& nxt = dp[mask | load];
          const int m = cur.m + 1;
          if (m < nxt.m) {
            nxt.m = m;
            nxt.count = cur.count;
          } else if (m == nxt.m) {
            nxt.count += cur.count;
          }
        }
      }
      for (std::size_t k = from; k < free_items.size(); ++k) {
        const int i = free_items[k];
        const int t = items[static_cast<std::size_t>(i)].time;
        if (time + t > c) continue;
        self(self, k + 1, load | (1U << i), time + t);
      }
    };
    rec(rec, 0, 0, 0);
  }
  return dp[full];
}

}  // namespace detail

inline int expanded_node_count(const Instance& inst) {
  int total = 0;
  for (const Task& t : inst.tasks()) total += inst.option_count(t.id);
  return total;
}

inline OracleResult brute_force(const Instance& inst, int cap_n = 18) {
  const int nodes = expanded_node_count(inst);
  if (cap_n > 24) throw std::invalid_argument("oracle cap must be <= 24");
  if (nodes > cap_n)
    throw OracleError("instance has " + std::to_string(nodes) + " expanded nodes, oracle cap is " +
                      std::to_string(cap_n));

  std::vector<std::vector<std::vector<int>>> choices;
  for (const Task& t : inst.tasks()) choices.push_back(detail::oracle_activations(inst, t.id));

  OracleResult best;
  best.m_opt = std::numeric_limits<int>::max();
  std::vector<std::size_t> pick(choices.size(), 0);
  for (;;) {
    std::vector<detail::OracleItem> items;
    int penalty = 0;
    for (std::size_t j = 0; j < choices.size(); ++j) {
      const int task = static_cast<int>(j) + 1;
      const auto& qs = choices[j][pick[j]];
      const std::size_t first = items.size();
      for (int q : qs) {
        const TaskOption& o = inst.option(task, q);
        detail::OracleItem it{task, q, o.final_time(), o.penalty, -1};
        for (std::size_t k = items.size(); k-- > first;) {
          const TaskOption& other = inst.option(task, items[k].q);
          if (other.given == o.given && other.penalty == o.penalty) {
            it.twin = static_cast<int>(k);
            break;
          }
        }
        penalty += o.penalty;
        items.push_back(it);
      }
    }
    const detail::OracleCell cell = detail::oracle_solve_items(inst, items);
    if (cell.count > 0) {
      if (cell.m < best.m_opt) {
        best.m_opt = cell.m;
        best.min_penalty_among_optima = penalty;
        best.count_optima = cell.count;
      } else if (cell.m == best.m_opt) {
        best.min_penalty_among_optima = std::min(best.min_penalty_among_optima, penalty);
        best.count_optima += cell.count;
      }
    }
    std::size_t j = 0;
    while (j < pick.size() && ++pick[j] == choices[j].size()) pick[j++] = 0;
    if (j == pick.size()) break;
  }
  if (best.m_opt == std::numeric_limits<int>::max()) throw OracleError("instance has no feasible solution");
  return best;
}

}  // namespace tdalbp
