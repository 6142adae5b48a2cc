#pragma once

// Lower bounds on the station count. Weights for LB2/LB3 are kept in sixths
// so every sum is exact.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdalbp/expansion.hpp"
#include "tdalbp/instance.hpp"

namespace tdalbp {

enum class BoundMode { kSafe, kPaperLiteral };

inline const char* to_string(BoundMode m) {
  return m == BoundMode::kSafe ? "safe" : "paper_literal";
}

struct BoundReport {
  int lb1 = 0;
  int lb2 = 0;
  int lb3 = 0;
  int lb_bin = 0;
  int lb_max = 0;
  BoundMode mode = BoundMode::kSafe;
};

struct Lb23 {
  int lb2 = 0;
  int lb3 = 0;
};

// w^1 in sixths: 1 above c/2, 1/2 at exactly c/2.
inline int half_weight_sixths(int t, int c) {
  if (2 * t > c) return 6;
  if (2 * t == c) return 3;
  return 0;
}

// w^2 in sixths: 1 above 2c/3, 2/3 at 2c/3, 1/2 strictly between c/3 and
// 2c/3, 1/3 at c/3.
inline int third_weight_sixths(int t, int c) {
  if (3 * t > 2 * c) return 6;
  if (3 * t == 2 * c) return 4;
  if (3 * t > c) return 3;
  if (3 * t == c) return 2;
  return 0;
}

inline int ceil_sixths(std::int64_t sixths) { return static_cast<int>((sixths + 5) / 6); }

// ceil(sum t / c), times without penalties.
inline int lb1(std::span<const int> times, int c) {
  if (c < 1) throw std::invalid_argument("cycle time must be >= 1");
  std::int64_t sum = 0;
  for (int t : times) sum += t;
  return static_cast<int>((sum + c - 1) / c);
}

namespace detail {

// Option masks of the task that can actually be activated at capacity c.
inline std::vector<ActivationMask> capacity_activations(const Instance& inst, int task) {
  std::vector<ActivationMask> out;
  const auto& opts = inst.options(task);
  const int c = inst.cycle_time();
  if (opts[0].final_time() <= c) out.push_back(1);
  if (opts.size() > 1)
    for (ActivationMask m : division_masks(opts, inst.time(task))) {
      bool fits = true;
      for (int q : mask_to_options(m)) fits &= opts[static_cast<std::size_t>(q - 1)].final_time() <= c;
      if (fits) out.push_back(m);
    }
  return out;
}

// True when the task can be split in a way that fits the cycle time.
inline bool effectively_divisible(const Instance& inst, int task) {
  for (ActivationMask m : capacity_activations(inst, task))
    if (m != 1) return true;
  return false;
}

}  // namespace detail

// LB2/LB3 over a set of unassigned tasks.
//
// paper_literal: indivisible tasks weigh w(t_j); a divisible task weighs the
// sum of w over all of its subtask nodes q >= 2 (final, penalty-inclusive
// times). Options in no feasible activation are ignored, and a task with no
// feasible split counts as indivisible.
//
// safe: a divisible task weighs the minimum, over its feasible activations,
// of the summed weights of the activated parts (given times). This never
// exceeds what any activation really occupies.
inline Lb23 lb23(const Instance& inst, std::span<const int> tasks, BoundMode mode) {
  const int c = inst.cycle_time();
  std::int64_t w2 = 0;
  std::int64_t w3 = 0;
  for (int j : tasks) {
    const auto& opts = inst.options(j);
    const auto acts = detail::capacity_activations(inst, j);
    const bool split = std::any_of(acts.begin(), acts.end(), [](ActivationMask m) { return m != 1; });
    if (!inst.is_divisible(j) || !split) {
      w2 += half_weight_sixths(inst.time(j), c);
      w3 += third_weight_sixths(inst.time(j), c);
      continue;
    }
    if (mode == BoundMode::kPaperLiteral) {
      ActivationMask used = 0;
      for (ActivationMask m : acts)
        if (m != 1) used |= m;
      for (int q : detail::mask_to_options(used)) {
        const int t = opts[static_cast<std::size_t>(q - 1)].final_time();
        w2 += half_weight_sixths(t, c);
        w3 += third_weight_sixths(t, c);
      }
      continue;
    }
    std::int64_t best2 = INT64_MAX;
    std::int64_t best3 = INT64_MAX;
    for (ActivationMask m : acts) {
      std::int64_t s2 = 0;
      std::int64_t s3 = 0;
      for (int q : detail::mask_to_options(m)) {
        const int t = opts[static_cast<std::size_t>(q - 1)].given;
        s2 += half_weight_sixths(t, c);
        s3 += third_weight_sixths(t, c);
      }
      best2 = std::min(best2, s2);
      best3 = std::min(best3, s3);
    }
    w2 += best2;
    w3 += best3;
  }
  return Lb23{ceil_sixths(w2), ceil_sixths(w3)};
}

namespace detail {

// Martello-Toth L2 bound for bin packing; items sorted nonincreasing.
inline int bin_packing_l2(const std::vector<int>& items, int c) {
  std::int64_t total = 0;
  for (int t : items) total += t;
  int best = static_cast<int>((total + c - 1) / c);
  std::vector<int> alphas{0};
  for (int t : items)
    if (2 * t <= c) alphas.push_back(t);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  for (int a : alphas) {
    std::int64_t j1 = 0;
    std::int64_t j2 = 0;
    std::int64_t j2_sum = 0;
    std::int64_t j3_sum = 0;
    for (int t : items) {
      if (t > c - a) {
        ++j1;
      } else if (2 * t > c) {
        ++j2;
        j2_sum += t;
      } else if (t >= a) {
        j3_sum += t;
      }
    }
    const std::int64_t spare = j2 * c - j2_sum;
    const std::int64_t extra = std::max<std::int64_t>(0, (j3_sum - spare + c - 1) / c);
    best = std::max(best, static_cast<int>(j1 + j2 + extra));
  }
  return best;
}

}  // namespace detail

// Bin-packing bound: depth-first branch and bound over item-to-bin
// assignments, seeded with first-fit decreasing and the L2 bound. If the
// node budget runs out the best proven lower bound (>= LB1) is returned.
inline int lb_bin(std::span<const int> input, int c, std::int64_t node_budget = 50'000) {
  if (c < 1) throw std::invalid_argument("cycle time must be >= 1");
  std::vector<int> items;
  for (int t : input) {
    if (t > c) throw std::invalid_argument("item " + std::to_string(t) + " exceeds bin capacity " + std::to_string(c));
    if (t > 0) items.push_back(t);
  }
  if (items.empty()) return 0;
  std::sort(items.begin(), items.end(), std::greater<>());
  const int lower = detail::bin_packing_l2(items, c);

  std::vector<int> bins;
  for (int t : items) {
    auto it = std::find_if(bins.begin(), bins.end(), [&](int load) { return load + t <= c; });
    if (it == bins.end())
      bins.push_back(t);
    else
      *it += t;
  }
  int best = static_cast<int>(bins.size());
  if (best == lower) return best;

  std::int64_t nodes = 0;
  bool exhausted = false;
  std::vector<int> load;
  std::int64_t remaining = 0;
  for (int t : items) remaining += t;
  auto dfs = [&](auto&& self, std::size_t i) -> void {
    if (best == lower || exhausted) return;
    if (++nodes > node_budget) {
      exhausted = true;
      return;
    }
    if (i == items.size()) {
      best = std::min(best, static_cast<int>(load.size()));
      return;
    }
    std::int64_t free_space = 0;
    for (int l : load) free_space += c - l;
    const std::int64_t overflow = remaining - free_space;
    const int need = overflow > 0 ? static_cast<int>((overflow + c - 1) / c) : 0;
    if (static_cast<int>(load.size()) + need >= best) return;
    const int t = items[i];
    remaining -= t;
    std::vector<int> tried;
    for (std::size_t b = 0; b < load.size(); ++b) {
      if (load[b] + t > c) continue;
      if (std::find(tried.begin(), tried.end(), load[b]) != tried.end()) continue;
      tried.push_back(load[b]);
      load[b] += t;
      self(self, i + 1);
      load[b] -= t;
    }
    if (static_cast<int>(load.size()) + 1 < best) {
      load.push_back(t);
      self(self, i + 1);
      load.pop_back();
    }
    remaining += t;
  };
  dfs(dfs, 0);
  return exhausted ? lower : best;
}

// Bound report over the full task set. In the bin-packing bound a task that
// can be split is treated as fluid work: it adds to the total but is not an
// item, which keeps the bound valid whichever activation is chosen.
inline BoundReport bound_report(const Instance& inst, BoundMode mode = BoundMode::kSafe,
                                std::int64_t bin_budget = 50'000) {
  const int c = inst.cycle_time();
  std::vector<int> all_tasks;
  std::vector<int> times;
  std::vector<int> items;
  for (const Task& t : inst.tasks()) {
    all_tasks.push_back(t.id);
    times.push_back(t.time);
    if (!detail::effectively_divisible(inst, t.id)) items.push_back(t.time);
  }
  BoundReport r;
  r.mode = mode;
  r.lb1 = lb1(times, c);
  const Lb23 l = lb23(inst, all_tasks, mode);
  r.lb2 = l.lb2;
  r.lb3 = l.lb3;
  r.lb_bin = std::max(lb_bin(items, c, bin_budget), r.lb1);
  r.lb_max = std::max({r.lb1, r.lb2, r.lb3, r.lb_bin});
  return r;
}

}  // namespace tdalbp
