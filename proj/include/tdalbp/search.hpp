#pragma once

// Station-oriented search machinery shared by the heuristic, the exact
// solver, and the minimum-penalty pass: partial solutions, load enumeration
// over the expanded graph, the three dominance rules, and the memo store.

#include <algorithm>
#include <bit>
#include <climits>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "tdalbp/bitset.hpp"
#include "tdalbp/bounds.hpp"
#include "tdalbp/expansion.hpp"
#include "tdalbp/instance.hpp"

namespace tdalbp {

enum class DivisionPolicy { kNever, kGreedyWhenBlocked, kAlways };

// Immutable per-graph tables in the layout the search wants. Task indices are
// 0-based here (task id - 1); node indices are those of the ExpandedGraph.
class SearchModel {
 public:
  explicit SearchModel(ExpandedGraph graph, BoundMode mode = BoundMode::kSafe)
      : graph_(std::move(graph)), mode_(mode) {
    const Instance& inst = graph_.instance();
    c_ = inst.cycle_time();
    n_tasks_ = inst.n();
    n_nodes_ = graph_.node_count();

    node_task_.resize(static_cast<std::size_t>(n_nodes_));
    node_q_.resize(static_cast<std::size_t>(n_nodes_));
    node_final_.resize(static_cast<std::size_t>(n_nodes_));
    node_given_.resize(static_cast<std::size_t>(n_nodes_));
    node_penalty_.resize(static_cast<std::size_t>(n_nodes_));
    node_usable_.resize(static_cast<std::size_t>(n_nodes_));
    node_type_.resize(static_cast<std::size_t>(n_nodes_));
    prev_identical_.assign(static_cast<std::size_t>(n_nodes_), -1);
    for (int v = 0; v < n_nodes_; ++v) {
      const SubtaskNode& s = graph_.node(v);
      const auto i = static_cast<std::size_t>(v);
      node_task_[i] = s.parent - 1;
      node_q_[i] = s.q;
      node_final_[i] = s.final_time();
      node_given_[i] = s.given_time;
      node_penalty_[i] = s.penalty;
      node_usable_[i] = graph_.usable(v) ? 1 : 0;
      node_type_[i] = v;
      if (s.q >= 2) {
        for (int p = v - 1; p >= 0 && graph_.node(p).parent == s.parent && graph_.node(p).q >= 2; --p) {
          const SubtaskNode& o = graph_.node(p);
          if (o.given_time == s.given_time && o.penalty == s.penalty) {
            if (prev_identical_[i] < 0) prev_identical_[i] = p;
            node_type_[i] = node_type_[static_cast<std::size_t>(p)];
          }
        }
      }
    }

    const auto T = static_cast<std::size_t>(n_tasks_);
    first_.resize(T);
    time_.resize(T);
    acts_.resize(T);
    succs_.resize(T);
    pred_count_.resize(T);
    real_succ_.resize(T);
    indivisible_.resize(T);
    tail_.resize(T);
    min_option_.resize(T);
    for (int j = 1; j <= n_tasks_; ++j) {
      const auto t = static_cast<std::size_t>(j - 1);
      first_[t] = graph_.first_node(j);
      time_[t] = inst.time(j);
      acts_[t] = graph_.activations(j);
      for (int s : inst.successors(j)) {
        succs_[t].push_back(s - 1);
        if (!inst.is_dummy(s)) real_succ_[t] = 1;
      }
      pred_count_[t] = static_cast<int>(inst.predecessors(j).size());
      indivisible_[t] = inst.option_count(j) == 1 ? 1 : 0;
      min_option_[t] = graph_.minimal_option_time(j);
      const std::int64_t tail = min_option_[t] + graph_.successor_work(j);
      tail_[t] = static_cast<int>((tail + c_ - 1) / c_);
    }
    tail_order_.resize(T);
    for (std::size_t t = 0; t < T; ++t) tail_order_[t] = static_cast<int>(t);
    std::stable_sort(tail_order_.begin(), tail_order_.end(),
                     [&](int a, int b) { return tail_[static_cast<std::size_t>(a)] > tail_[static_cast<std::size_t>(b)]; });

    // Extended Jackson dominance: indivisible i dominates j when they are
    // unrelated, t_i >= t_j and F*_i contains F*_j (ties: smaller id wins).
    const TransitiveSets& cl = graph_.closure();
    dominators_.resize(T);
    std::vector<int> dominated_count(T, 0);
    for (int i = 1; i <= n_tasks_; ++i) {
      if (!indivisible_[static_cast<std::size_t>(i - 1)] || inst.is_dummy(i)) continue;
      for (int j = 1; j <= n_tasks_; ++j) {
        if (i == j || inst.is_dummy(j)) continue;
        if (cl.precedes(i, j) || cl.precedes(j, i)) continue;
        const int ti = inst.time(i);
        const int tj = inst.time(j);
        if (ti < tj) continue;
        const auto& fi = cl.all_successors[static_cast<std::size_t>(i - 1)];
        const auto& fj = cl.all_successors[static_cast<std::size_t>(j - 1)];
        if (!fj.is_subset_of(fi)) continue;
        if (ti == tj && fi == fj && i > j) continue;
        dominators_[static_cast<std::size_t>(j - 1)].push_back(i - 1);
        ++dominated_count[static_cast<std::size_t>(i - 1)];
      }
    }

    // Exploration order inside load enumeration.
    rank_.resize(static_cast<std::size_t>(n_nodes_));
    std::vector<int> order(static_cast<std::size_t>(n_nodes_));
    for (int v = 0; v < n_nodes_; ++v) order[static_cast<std::size_t>(v)] = v;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const int da = dominated_count[static_cast<std::size_t>(node_task(a))];
      const int db = dominated_count[static_cast<std::size_t>(node_task(b))];
      if (da != db) return da > db;
      if (node_final(a) != node_final(b)) return node_final(a) > node_final(b);
      return a < b;
    });
    for (int k = 0; k < n_nodes_; ++k) rank_[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
  }

  const ExpandedGraph& graph() const { return graph_; }
  const Instance& instance() const { return graph_.instance(); }
  BoundMode bound_mode() const { return mode_; }
  int cycle_time() const { return c_; }
  int node_count() const { return n_nodes_; }
  int task_count() const { return n_tasks_; }

  int node_task(int v) const { return node_task_[static_cast<std::size_t>(v)]; }
  int node_q(int v) const { return node_q_[static_cast<std::size_t>(v)]; }
  int node_final(int v) const { return node_final_[static_cast<std::size_t>(v)]; }
  int node_given(int v) const { return node_given_[static_cast<std::size_t>(v)]; }
  int node_penalty(int v) const { return node_penalty_[static_cast<std::size_t>(v)]; }
  bool node_usable(int v) const { return node_usable_[static_cast<std::size_t>(v)] != 0; }
  int node_type(int v) const { return node_type_[static_cast<std::size_t>(v)]; }
  int prev_identical(int v) const { return prev_identical_[static_cast<std::size_t>(v)]; }
  int rank(int v) const { return rank_[static_cast<std::size_t>(v)]; }

  int first_node(int t) const { return first_[static_cast<std::size_t>(t)]; }
  int option_count(int t) const { return instance().option_count(t + 1); }
  int task_time(int t) const { return time_[static_cast<std::size_t>(t)]; }
  const std::vector<ActivationMask>& activations(int t) const { return acts_[static_cast<std::size_t>(t)]; }
  const std::vector<int>& successors(int t) const { return succs_[static_cast<std::size_t>(t)]; }
  int predecessor_count(int t) const { return pred_count_[static_cast<std::size_t>(t)]; }
  bool has_real_successor(int t) const { return real_succ_[static_cast<std::size_t>(t)] != 0; }
  bool indivisible(int t) const { return indivisible_[static_cast<std::size_t>(t)] != 0; }
  const std::vector<int>& dominators(int t) const { return dominators_[static_cast<std::size_t>(t)]; }
  int tail_stations(int t) const { return tail_[static_cast<std::size_t>(t)]; }
  const std::vector<int>& tail_order() const { return tail_order_; }

  bool completes(int t, ActivationMask mask) const {
    if (mask & 1U) return true;
    if (mask == 0) return false;
    for (ActivationMask a : activations(t))
      if (a == mask) return true;
    return false;
  }
  bool extendable(int t, ActivationMask mask) const {
    for (ActivationMask a : activations(t))
      if (a != 1 && (a & mask) == mask) return true;
    return false;
  }

  struct Contribution {
    std::int64_t work = 0;
    std::int64_t w2 = 0;  // sixths
    std::int64_t w3 = 0;  // sixths
    std::int64_t penalty = 0;
    bool feasible = true;
  };

  // Lower-bound contribution of an incomplete task given the options used so far.
  Contribution contribution(int t, ActivationMask mask) const {
    Contribution out;
    if (completes(t, mask)) return out;
    const int first = first_node(t);
    std::int64_t used_given = 0;
    for (ActivationMask m = mask; m != 0; m &= m - 1)
      used_given += node_given(first + std::countr_zero(m));
    out.work = task_time(t) - used_given;

    std::int64_t best2 = INT64_MAX;
    std::int64_t best3 = INT64_MAX;
    std::int64_t bestf = INT64_MAX;
    for (ActivationMask a : activations(t)) {
      if ((a & mask) != mask) continue;
      if (mask != 0 && a == 1) continue;
      std::int64_t s2 = 0;
      std::int64_t s3 = 0;
      std::int64_t sf = 0;
      for (ActivationMask rest = a & ~mask; rest != 0; rest &= rest - 1) {
        const int v = first + std::countr_zero(rest);
        s2 += half_weight_sixths(node_given(v), c_);
        s3 += third_weight_sixths(node_given(v), c_);
        sf += node_penalty(v);
      }
      best2 = std::min(best2, s2);
      best3 = std::min(best3, s3);
      bestf = std::min(bestf, sf);
    }
    if (bestf == INT64_MAX) {
      out.feasible = false;
      return out;
    }
    out.penalty = bestf;
    if (mode_ == BoundMode::kSafe) {
      out.w2 = best2;
      out.w3 = best3;
    } else {
      ActivationMask pieces = 0;
      for (ActivationMask a : activations(t))
        if (a != 1 && (a & mask) == mask) pieces |= a;
      pieces &= ~mask;
      if (pieces == 0) {
        out.w2 = best2;
        out.w3 = best3;
      } else {
        for (ActivationMask rest = pieces; rest != 0; rest &= rest - 1) {
          const int v = first + std::countr_zero(rest);
          out.w2 += half_weight_sixths(node_final(v), c_);
          out.w3 += third_weight_sixths(node_final(v), c_);
        }
      }
    }
    return out;
  }

 private:
  ExpandedGraph graph_;
  BoundMode mode_;
  int c_ = 0;
  int n_tasks_ = 0;
  int n_nodes_ = 0;
  std::vector<int> node_task_, node_q_, node_final_, node_given_, node_penalty_, node_type_;
  std::vector<int> prev_identical_, rank_;
  std::vector<char> node_usable_;
  std::vector<int> first_, time_, pred_count_, tail_, tail_order_, min_option_;
  std::vector<std::vector<ActivationMask>> acts_;
  std::vector<std::vector<int>> succs_, dominators_;
  std::vector<char> real_succ_, indivisible_;
};

// ---------------------------------------------------------------------------
// Partial solutions

struct StationLink {
  std::vector<int> nodes;
  std::shared_ptr<const StationLink> prev;
};

// (A, U, Z, S_1..S_m). A is the node bit set; Z and U are derived from it.
// Station loads are shared with the parent through a linked list.
struct PartialSolution {
  DynamicBitset assigned;
  int m = 0;
  int idle_total = 0;
  int unassigned_tasks = 0;
  int penalty = 0;
  int lower_bound = 0;  // m + remaining-station bound
  std::shared_ptr<const StationLink> last;

  bool complete() const { return unassigned_tasks == 0; }

  std::vector<std::vector<int>> station_loads() const {
    std::vector<std::vector<int>> out;
    for (const StationLink* s = last.get(); s != nullptr; s = s->prev.get()) out.push_back(s->nodes);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

inline PartialSolution root_state(const SearchModel& model) {
  PartialSolution e;
  e.assigned = DynamicBitset(static_cast<std::size_t>(model.node_count()));
  e.unassigned_tasks = model.task_count();
  return e;
}

// Number of subtasks (q >= 2) of a task already assigned.
inline int assigned_subtasks(const SearchModel& model, const PartialSolution& e, int task_id) {
  const int t = task_id - 1;
  int z = 0;
  for (int q = 2; q <= model.option_count(t); ++q)
    z += e.assigned.test(static_cast<std::size_t>(model.first_node(t) + q - 1)) ? 1 : 0;
  return z;
}

inline Solution to_solution(const SearchModel& model, const PartialSolution& e) {
  std::vector<std::vector<Placement>> stations;
  for (const auto& load : e.station_loads()) {
    std::vector<Placement> s;
    for (int v : load) s.push_back(Placement{model.node_task(v) + 1, model.node_q(v)});
    stations.push_back(std::move(s));
  }
  return make_solution(model.instance(), std::move(stations));
}

// B(E) = I/m - lambda |U|; smaller is expanded first.
inline double priority(int idle_total, int m, int unassigned, double lambda) {
  return static_cast<double>(idle_total) / static_cast<double>(m) - lambda * unassigned;
}

inline double priority(const PartialSolution& e, double lambda) {
  return priority(e.idle_total, e.m, e.unassigned_tasks, lambda);
}

// ---------------------------------------------------------------------------
// Load enumeration

struct RuleSet {
  bool max_load = true;
  bool jackson = true;
  bool bbr = true;
};

struct EnumerationOptions {
  DivisionPolicy policy = DivisionPolicy::kAlways;
  RuleSet rules;
  std::int64_t max_loads = 10'000;
};

enum class DominanceVerdict { kKeep, kMaxLoad, kJackson, kBbr, kInfeasible };

class StationExpander {
 public:
  explicit StationExpander(const SearchModel& model) : model_(&model) {
    const auto T = static_cast<std::size_t>(model.task_count());
    mask_.assign(T, 0);
    complete_.assign(T, 0);
    missing_.assign(T, 0);
    in_load_.assign(T, 0);
    contrib_.assign(T, {});
  }

  // Loads the context of a partial solution (closed stations only).
  void reset(const PartialSolution& e) {
    const SearchModel& md = *model_;
    std::fill(mask_.begin(), mask_.end(), 0);
    std::fill(in_load_.begin(), in_load_.end(), 0);
    e.assigned.for_each([&](std::size_t v) {
      const int iv = static_cast<int>(v);
      mask_[static_cast<std::size_t>(md.node_task(iv))] |= ActivationMask{1} << (md.node_q(iv) - 1);
    });
    incomplete_ = 0;
    incomplete_real_succ_ = 0;
    work_ = w2_ = w3_ = pen_ = 0;
    infeasible_ = 0;
    for (int t = 0; t < md.task_count(); ++t) {
      const auto i = static_cast<std::size_t>(t);
      complete_[i] = md.completes(t, mask_[i]) ? 1 : 0;
      missing_[i] = md.predecessor_count(t);
      if (!complete_[i]) {
        ++incomplete_;
        if (md.has_real_successor(t)) ++incomplete_real_succ_;
      }
      contrib_[i] = md.contribution(t, mask_[i]);
      add_contrib(contrib_[i], 1);
    }
    for (int t = 0; t < md.task_count(); ++t)
      if (complete_[static_cast<std::size_t>(t)])
        for (int s : md.successors(t)) --missing_[static_cast<std::size_t>(s)];
    load_.clear();
    load_time_ = 0;
    load_penalty_ = 0;
    base_ = &e;
  }

  const PartialSolution& base() const { return *base_; }
  const std::vector<int>& load() const { return load_; }
  int load_time() const { return load_time_; }
  int load_penalty() const { return load_penalty_; }
  int residual() const { return model_->cycle_time() - load_time_; }
  int incomplete_tasks() const { return incomplete_; }
  std::int64_t penalty_lower_bound() const { return pen_; }
  bool infeasible() const { return infeasible_ > 0; }

  bool eligible(int v) const {
    const SearchModel& md = *model_;
    if (!md.node_usable(v)) return false;
    const int t = md.node_task(v);
    const auto i = static_cast<std::size_t>(t);
    if (complete_[i] || missing_[i] > 0 || in_load_[i]) return false;
    const int q = md.node_q(v);
    const ActivationMask m = mask_[i];
    if (q == 1) return m == 0;
    const ActivationMask bit = ActivationMask{1} << (q - 1);
    if (m & (bit | 1U)) return false;
    const int p = md.prev_identical(v);
    if (p >= 0 && !(m & (ActivationMask{1} << (md.node_q(p) - 1)))) return false;
    return md.extendable(t, m | bit);
  }

  bool fits(int v) const { return model_->node_final(v) <= residual(); }

  void add(int v) {
    const SearchModel& md = *model_;
    const int t = md.node_task(v);
    const auto i = static_cast<std::size_t>(t);
    mask_[i] |= ActivationMask{1} << (md.node_q(v) - 1);
    in_load_[i] = 1;
    load_.push_back(v);
    load_time_ += md.node_final(v);
    load_penalty_ += md.node_penalty(v);
    refresh(t);
  }

  void remove_last() {
    const SearchModel& md = *model_;
    const int v = load_.back();
    load_.pop_back();
    const int t = md.node_task(v);
    const auto i = static_cast<std::size_t>(t);
    mask_[i] &= ~(ActivationMask{1} << (md.node_q(v) - 1));
    in_load_[i] = 0;
    load_time_ -= md.node_final(v);
    load_penalty_ -= md.node_penalty(v);
    refresh(t);
  }

  // Remaining stations needed after the current load is closed.
  int remaining_bound() const {
    const SearchModel& md = *model_;
    const std::int64_t c = md.cycle_time();
    int lb = static_cast<int>((work_ + c - 1) / c);
    lb = std::max(lb, ceil_sixths(w2_));
    lb = std::max(lb, ceil_sixths(w3_));
    for (int t : md.tail_order()) {
      if (!complete_[static_cast<std::size_t>(t)]) {
        lb = std::max(lb, md.tail_stations(t));
        break;
      }
    }
    return lb;
  }

  // Rule (i): no further node can join the load. Only additions that never
  // hurt count: indivisible tasks, undivided tasks, and subtasks every
  // completion of an already divided task needs.
  bool load_is_maximal(DivisionPolicy policy) const {
    const SearchModel& md = *model_;
    for (int v = 0; v < md.node_count(); ++v) {
      if (!fits(v) || !eligible(v)) continue;
      if (md.node_q(v) == 1) return false;
      if (policy != DivisionPolicy::kNever && forced_piece(v)) return false;
    }
    return true;
  }

  // Rule (ii): a dominating indivisible task could take the place of a load
  // member.
  bool jackson_violation() const {
    const SearchModel& md = *model_;
    for (int v : load_) {
      const int t = md.node_task(v);
      if (md.node_q(v) != 1) continue;
      for (int i : md.dominators(t)) {
        const int ni = md.first_node(i);
        if (!eligible(ni)) continue;
        if (load_time_ - md.node_final(v) + md.node_final(ni) <= md.cycle_time()) return true;
      }
    }
    return false;
  }

  // Rule (iii): the load holds no task with successors while such a task is
  // still open.
  bool bbr_violation() const {
    if (incomplete_real_succ_ == 0) return false;
    for (int v : load_)
      if (model_->has_real_successor(model_->node_task(v))) return false;
    return true;
  }

  DominanceVerdict verdict(const RuleSet& rules, DivisionPolicy policy) const {
    if (infeasible()) return DominanceVerdict::kInfeasible;
    if (rules.max_load && !load_is_maximal(policy)) return DominanceVerdict::kMaxLoad;
    if (rules.jackson && jackson_violation()) return DominanceVerdict::kJackson;
    if (rules.bbr && bbr_violation()) return DominanceVerdict::kBbr;
    return DominanceVerdict::kKeep;
  }

  // Child state after closing the current load.
  PartialSolution make_child() const {
    PartialSolution child;
    child.assigned = base_->assigned;
    for (int v : load_) child.assigned.set(static_cast<std::size_t>(v));
    child.m = base_->m + 1;
    child.idle_total = base_->idle_total + residual();
    child.unassigned_tasks = incomplete_;
    child.penalty = base_->penalty + load_penalty_;
    child.lower_bound = child.m + remaining_bound();
    child.last = std::make_shared<const StationLink>(StationLink{load_, base_->last});
    return child;
  }

  DynamicBitset child_key() const {
    DynamicBitset key = base_->assigned;
    for (int v : load_) key.set(static_cast<std::size_t>(v));
    return key;
  }

  // Enumerates nonempty loads for the next station. Every node set is
  // produced once (members added in increasing node index; a node only
  // becomes eligible through lower-indexed predecessors). The callback sees
  // this expander positioned on the load and returns false to stop.
  template <typename Fn>
  std::int64_t enumerate(const EnumerationOptions& opt, Fn&& fn, bool* truncated = nullptr) {
    std::int64_t emitted = 0;
    bool stop = false;
    std::vector<std::vector<int>> scratch;
    auto rec = [&](auto&& self, int start, std::size_t depth) -> void {
      if (!load_.empty()) {
        const bool keep = (!opt.rules.max_load || load_is_maximal(opt.policy)) &&
                          (!opt.rules.jackson || !jackson_violation());
        if (keep && !infeasible()) {
          ++emitted;
          if (!fn(*this)) {
            stop = true;
            return;
          }
          if (emitted >= opt.max_loads) {
            if (truncated != nullptr) *truncated = true;
            stop = true;
            return;
          }
        }
      }
      if (scratch.size() <= depth) scratch.resize(depth + 1);
      auto& cand = scratch[depth];
      cand.clear();
      const SearchModel& md = *model_;
      for (int v = start; v < md.node_count(); ++v) {
        if (!fits(v) || !eligible(v)) continue;
        if (md.node_q(v) >= 2 && opt.policy == DivisionPolicy::kNever) continue;
        cand.push_back(v);
      }
      std::sort(cand.begin(), cand.end(), [&](int a, int b) { return md.rank(a) < md.rank(b); });
      const std::vector<int> local = cand;
      for (int v : local) {
        add(v);
        self(self, v + 1, depth + 1);
        remove_last();
        if (stop) return;
      }
    };
    rec(rec, 0, 0);
    return emitted;
  }

 private:
  bool forced_piece(int v) const {
    const SearchModel& md = *model_;
    const int t = md.node_task(v);
    const ActivationMask m = mask_[static_cast<std::size_t>(t)];
    if (m == 0) return false;
    const int first = md.first_node(t);
    const int type = md.node_type(v);
    for (ActivationMask a : md.activations(t)) {
      if (a == 1 || (a & m) != m) continue;
      bool has = false;
      for (ActivationMask rest = a & ~m; rest != 0 && !has; rest &= rest - 1)
        has = md.node_type(first + std::countr_zero(rest)) == type;
      if (!has) return false;
    }
    return true;
  }

  void add_contrib(const SearchModel::Contribution& c, int sign) {
    work_ += sign * c.work;
    w2_ += sign * c.w2;
    w3_ += sign * c.w3;
    pen_ += sign * c.penalty;
    if (!c.feasible) infeasible_ += sign;
  }

  void refresh(int t) {
    const SearchModel& md = *model_;
    const auto i = static_cast<std::size_t>(t);
    add_contrib(contrib_[i], -1);
    contrib_[i] = md.contribution(t, mask_[i]);
    add_contrib(contrib_[i], 1);
    const bool now = md.completes(t, mask_[i]);
    if (now != static_cast<bool>(complete_[i])) {
      complete_[i] = now ? 1 : 0;
      const int d = now ? -1 : 1;
      incomplete_ += d;
      if (md.has_real_successor(t)) incomplete_real_succ_ += d;
      for (int s : md.successors(t)) missing_[static_cast<std::size_t>(s)] += d;
    }
  }

  const SearchModel* model_;
  const PartialSolution* base_ = nullptr;
  std::vector<ActivationMask> mask_;
  std::vector<char> complete_;
  std::vector<int> missing_;
  std::vector<char> in_load_;
  std::vector<SearchModel::Contribution> contrib_;
  int incomplete_ = 0;
  int incomplete_real_succ_ = 0;
  int infeasible_ = 0;
  std::int64_t work_ = 0, w2_ = 0, w3_ = 0, pen_ = 0;
  std::vector<int> load_;
  int load_time_ = 0;
  int load_penalty_ = 0;
};

// Children of a partial solution after the dominance rules (no bounds, no memo).
inline std::vector<PartialSolution> expand_station(const SearchModel& model, const PartialSolution& e,
                                                   const EnumerationOptions& opt = {},
                                                   bool* truncated = nullptr) {
  std::vector<PartialSolution> out;
  StationExpander ex(model);
  ex.reset(e);
  ex.enumerate(
      opt,
      [&](const StationExpander& view) {
        if (!opt.rules.bbr || !view.bbr_violation()) out.push_back(view.make_child());
        return true;
      },
      truncated);
  return out;
}

// Applies the dominance rules to one candidate load of the next station.
inline DominanceVerdict dominance(const SearchModel& model, const PartialSolution& e,
                                  std::span<const int> load, const RuleSet& rules = {}) {
  StationExpander ex(model);
  ex.reset(e);
  std::vector<int> sorted(load.begin(), load.end());
  std::sort(sorted.begin(), sorted.end());
  for (int v : sorted) {
    if (!ex.eligible(v) || !ex.fits(v)) return DominanceVerdict::kInfeasible;
    ex.add(v);
  }
  if (sorted.empty()) return DominanceVerdict::kInfeasible;
  return ex.verdict(rules, DivisionPolicy::kAlways);
}

// Memo of visited assignment states. The key is the node set A; it fixes Z
// (subtask counts per divisible task) as well, so equal keys mean equal
// (A, Z).
class MemoStore {
 public:
  explicit MemoStore(std::size_t capacity = 20'000'000) : capacity_(capacity) {}

  // True when the state is new or reached with fewer stations than before.
  bool remember(const DynamicBitset& key, int m) {
    auto it = seen_.find(key);
    if (it != seen_.end()) {
      if (it->second <= m) return false;
      it->second = m;
      return true;
    }
    if (seen_.size() >= capacity_) {
      overflowed_ = true;
      return true;
    }
    seen_.emplace(key, m);
    return true;
  }

  bool overflowed() const { return overflowed_; }
  std::size_t size() const { return seen_.size(); }
  void clear() { seen_.clear(); }

 private:
  std::size_t capacity_;
  bool overflowed_ = false;
  std::unordered_map<DynamicBitset, int, DynamicBitsetHash> seen_;
};

}  // namespace tdalbp
