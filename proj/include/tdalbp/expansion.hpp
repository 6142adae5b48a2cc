#pragma once

// Expanded precedence graph: every divisible task j is replaced by one node
// per option q = 1..r_j, each inheriting j's precedence relations, and every
// node gets a station interval [E, L].

#include <algorithm>
#include <bit>
#include <climits>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tdalbp/instance.hpp"
#include "tdalbp/instance_io.hpp"

namespace tdalbp {

struct SubtaskNode {
  int parent = 0;
  int q = 1;
  int given_time = 0;
  int penalty = 0;
  int final_time() const { return given_time + penalty; }
};

struct ActivationSet {
  std::vector<std::vector<int>> subsets;  // option indices; {1} first
  std::vector<int> prunable;              // options q >= 2 in no kept subset
};

using ActivationMask = std::uint64_t;  // bit q-1 set when option q is used

namespace detail {

inline constexpr int kMaxOptions = 63;

// Subsets of options 2..r whose given times sum to the task time, as masks.
inline std::vector<ActivationMask> division_masks(const std::vector<TaskOption>& opts,
                                                  int target) {
  std::vector<ActivationMask> out;
  const int r = static_cast<int>(opts.size());
  if (r > kMaxOptions) throw InstanceError("too many division options for one task");
  std::vector<int> suffix(static_cast<std::size_t>(r) + 1, 0);
  for (int q = r - 1; q >= 1; --q)
    suffix[static_cast<std::size_t>(q)] = suffix[static_cast<std::size_t>(q) + 1] +
                                          opts[static_cast<std::size_t>(q)].given;
  auto rec = [&](auto&& self, int q, int remaining, ActivationMask mask) -> void {
    if (remaining == 0) {
      if (mask != 0) out.push_back(mask);
      return;
    }
    if (q >= r || suffix[static_cast<std::size_t>(q)] < remaining) return;
    const int g = opts[static_cast<std::size_t>(q)].given;
    if (g <= remaining) self(self, q + 1, remaining - g, mask | (ActivationMask{1} << q));
    self(self, q + 1, remaining, mask);
  };
  rec(rec, 1, target, 0);
  std::sort(out.begin(), out.end(), [](ActivationMask a, ActivationMask b) {
    // Lexicographic on the sorted index lists.
    while (a != 0 && b != 0) {
      const int ia = std::countr_zero(a);
      const int ib = std::countr_zero(b);
      if (ia != ib) return ia < ib;
      a &= a - 1;
      b &= b - 1;
    }
    return a == 0 && b != 0;
  });
  return out;
}

inline std::vector<int> mask_to_options(ActivationMask m) {
  std::vector<int> out;
  while (m != 0) {
    out.push_back(std::countr_zero(m) + 1);
    m &= m - 1;
  }
  return out;
}

}  // namespace detail

// All activations of a task: {1} plus every subset of {2..r_j} whose given
// times sum to t_j. Subsets needing more distinct stations than `window` are
// dropped; options left in no subset are reported as prunable.
inline ActivationSet feasible_activations(const Instance& inst, int task_id,
                                          int window = INT_MAX) {
  ActivationSet out;
  const auto& opts = inst.options(task_id);
  if (window >= 1) out.subsets.push_back({1});
  ActivationMask used = 0;
  for (ActivationMask m : detail::division_masks(opts, inst.time(task_id))) {
    if (std::popcount(m) > window) continue;
    used |= m;
    out.subsets.push_back(detail::mask_to_options(m));
  }
  for (int q = 2; q <= static_cast<int>(opts.size()); ++q)
    if (!(used & (ActivationMask{1} << (q - 1)))) out.prunable.push_back(q);
  return out;
}

class ExpandedGraph;
ExpandedGraph expand(const Instance& inst, std::optional<int> m_prime = std::nullopt);

class ExpandedGraph {
 public:
  const Instance& instance() const { return inst_; }
  int cycle_time() const { return inst_.cycle_time(); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const SubtaskNode& node(int v) const { return nodes_.at(static_cast<std::size_t>(v)); }
  const std::vector<SubtaskNode>& nodes() const { return nodes_; }

  // Nodes of task j occupy [first_node(j), first_node(j) + r_j).
  int first_node(int task) const { return first_.at(static_cast<std::size_t>(task - 1)); }
  int node_index(int task, int q) const { return first_node(task) + q - 1; }

  const std::vector<std::pair<int, int>>& arcs() const { return arcs_; }
  const TransitiveSets& closure() const { return closure_; }

  int m_prime() const { return m_prime_; }
  int earliest(int v) const { return earliest_.at(static_cast<std::size_t>(v)); }
  int latest(int v) const { return latest_.at(static_cast<std::size_t>(v)); }
  std::pair<int, int> interval(int v) const { return {earliest(v), latest(v)}; }

  // Activations that fit the cycle time and the station window of the task.
  const std::vector<ActivationMask>& activations(int task) const {
    return activations_.at(static_cast<std::size_t>(task - 1));
  }
  // Node belongs to at least one kept activation.
  bool usable(int v) const { return usable_.at(static_cast<std::size_t>(v)) != 0; }

  // B_k: usable nodes whose station interval contains k.
  std::vector<int> candidates(int k) const {
    std::vector<int> out;
    for (int v = 0; v < node_count(); ++v)
      if (usable(v) && earliest(v) <= k && k <= latest(v)) out.push_back(v);
    return out;
  }

  // Sums feeding the interval formulas (full original times, no penalties).
  std::int64_t predecessor_work(int task) const {
    return pred_work_.at(static_cast<std::size_t>(task - 1));
  }
  std::int64_t successor_work(int task) const {
    return succ_work_.at(static_cast<std::size_t>(task - 1));
  }
  int minimal_option_time(int task) const {
    int best = INT_MAX;
    for (const TaskOption& o : inst_.options(task)) best = std::min(best, o.given);
    return best;
  }

  ExpandedGraph with_station_bound(int m_prime) const {
    ExpandedGraph g = *this;
    g.m_prime_ = m_prime;
    g.compute_intervals();
    return g;
  }

  // Diagnostic listing: `node parent q given penalty final E L`, then arcs.
  std::string dump() const {
    std::ostringstream os;
    os << "# node parent q given penalty final E L\n";
    for (int v = 0; v < node_count(); ++v) {
      const SubtaskNode& s = node(v);
      os << node_label(inst_, s.parent, s.q) << ' ' << inst_.task(s.parent).original_id << ' '
         << s.q << ' ' << s.given_time << ' ' << s.penalty << ' ' << s.final_time() << ' '
         << earliest(v) << ' ' << latest(v) << '\n';
    }
    os << "ARCS\n";
    for (const auto& [a, b] : arcs_)
      os << node_label(inst_, node(a).parent, node(a).q) << ' '
         << node_label(inst_, node(b).parent, node(b).q) << '\n';
    return os.str();
  }

 private:
  friend ExpandedGraph expand(const Instance& inst, std::optional<int> m_prime);

  void compute_intervals() {
    const auto c = static_cast<std::int64_t>(inst_.cycle_time());
    earliest_.assign(nodes_.size(), 0);
    latest_.assign(nodes_.size(), 0);
    usable_.assign(nodes_.size(), 0);
    activations_.assign(static_cast<std::size_t>(inst_.n()), {});
    for (int j = 1; j <= inst_.n(); ++j) {
      const std::int64_t own = minimal_option_time(j);
      const std::int64_t head = own + predecessor_work(j);
      const std::int64_t tail = own + successor_work(j);
      const int e = head == 0 ? 1 : static_cast<int>((head + c - 1) / c);
      const int l = tail == 0 ? m_prime_ : m_prime_ + 1 - static_cast<int>((tail + c - 1) / c);
      const int window = std::max(0, l - e + 1);
      auto& acts = activations_[static_cast<std::size_t>(j - 1)];
      for (ActivationMask m : capacity_feasible_[static_cast<std::size_t>(j - 1)])
        if (std::popcount(m) <= window) acts.push_back(m);
      ActivationMask used = 0;
      for (ActivationMask m : acts) used |= m;
      for (int q = 1; q <= inst_.option_count(j); ++q) {
        const auto v = static_cast<std::size_t>(node_index(j, q));
        earliest_[v] = e;
        latest_[v] = l;
        usable_[v] = (used >> (q - 1)) & 1U ? 1 : 0;
      }
    }
  }

  Instance inst_;
  std::vector<SubtaskNode> nodes_;
  std::vector<int> first_;
  std::vector<std::pair<int, int>> arcs_;
  TransitiveSets closure_;
  std::vector<std::int64_t> pred_work_;
  std::vector<std::int64_t> succ_work_;
  std::vector<std::vector<ActivationMask>> capacity_feasible_;
  std::vector<std::vector<ActivationMask>> activations_;
  std::vector<int> earliest_;
  std::vector<int> latest_;
  std::vector<char> usable_;
  int m_prime_ = 0;
};

// Without an explicit m', the bound is the largest number of nodes any
// feasible activation pattern can place (n when nothing must be divided).
inline ExpandedGraph expand(const Instance& inst, std::optional<int> m_prime) {
  ExpandedGraph g;
  g.inst_ = inst;
  g.closure_ = transitive_sets(inst);
  const int n = inst.n();
  const int c = inst.cycle_time();
  g.first_.resize(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    g.first_[static_cast<std::size_t>(j - 1)] = static_cast<int>(g.nodes_.size());
    const auto& opts = inst.options(j);
    for (int q = 1; q <= static_cast<int>(opts.size()); ++q)
      g.nodes_.push_back(SubtaskNode{j, q, opts[static_cast<std::size_t>(q - 1)].given,
                                     opts[static_cast<std::size_t>(q - 1)].penalty});
  }
  for (const Arc& a : inst.arcs())
    for (int p = 1; p <= inst.option_count(a.pred); ++p)
      for (int q = 1; q <= inst.option_count(a.succ); ++q)
        g.arcs_.emplace_back(g.node_index(a.pred, p), g.node_index(a.succ, q));

  g.pred_work_.assign(static_cast<std::size_t>(n), 0);
  g.succ_work_.assign(static_cast<std::size_t>(n), 0);
  for (int j = 1; j <= n; ++j) {
    g.closure_.all_predecessors[static_cast<std::size_t>(j - 1)].for_each(
        [&](std::size_t i) { g.pred_work_[static_cast<std::size_t>(j - 1)] += inst.time(static_cast<int>(i) + 1); });
    g.closure_.all_successors[static_cast<std::size_t>(j - 1)].for_each(
        [&](std::size_t i) { g.succ_work_[static_cast<std::size_t>(j - 1)] += inst.time(static_cast<int>(i) + 1); });
  }

  int widest_total = 0;
  g.capacity_feasible_.assign(static_cast<std::size_t>(n), {});
  for (int j = 1; j <= n; ++j) {
    const auto& opts = inst.options(j);
    auto& feas = g.capacity_feasible_[static_cast<std::size_t>(j - 1)];
    if (opts[0].final_time() <= c) feas.push_back(ActivationMask{1});
    for (ActivationMask m : detail::division_masks(opts, inst.time(j))) {
      bool fits = true;
      for (int q : detail::mask_to_options(m))
        fits &= opts[static_cast<std::size_t>(q - 1)].final_time() <= c;
      if (fits) feas.push_back(m);
    }
    int widest = 0;
    for (ActivationMask m : feas) widest = std::max(widest, std::popcount(m));
    // The dummy terminal always fits beside one of its predecessors.
    if (!inst.is_dummy(j)) widest_total += widest;
  }
  g.m_prime_ = m_prime.value_or(widest_total);
  g.compute_intervals();
  return g;
}

// E_j: ceil((t_j^{r_j} + sum of predecessor times) / c), or 1 when that sum is 0.
inline int earliest_station(const ExpandedGraph& g, int node) {
  const int task = g.node(node).parent;
  const std::int64_t head = g.minimal_option_time(task) + g.predecessor_work(task);
  const std::int64_t c = g.cycle_time();
  return head == 0 ? 1 : static_cast<int>((head + c - 1) / c);
}

// L_j: m' + 1 - ceil((t_j^{r_j} + sum of successor times) / c), or m' when 0.
inline int latest_station(const ExpandedGraph& g, int node, int m_prime) {
  const int task = g.node(node).parent;
  const std::int64_t tail = g.minimal_option_time(task) + g.successor_work(task);
  const std::int64_t c = g.cycle_time();
  return tail == 0 ? m_prime : m_prime + 1 - static_cast<int>((tail + c - 1) / c);
}

}  // namespace tdalbp
