#pragma once

// Instance model for SALBP-1 and its task-division extension: tasks with
// processing times, a precedence DAG, a cycle time, and for divisible tasks a
// list of alternative subtask times each carrying a time penalty.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tdalbp/bitset.hpp"

namespace tdalbp {

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Arc {
  int pred = 0;
  int succ = 0;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

struct Task {
  int id = 0;           // 1-based, topological
  int time = 0;         // given processing time; 0 only for the dummy terminal
  bool divisible = false;
  int original_id = 0;  // id in the source file
};

// One alternative way of processing part of a task. q = 1 is the undivided
// task itself with zero penalty.
struct TaskOption {
  int given = 0;
  int penalty = 0;
  int final_time() const { return given + penalty; }
  friend bool operator==(const TaskOption&, const TaskOption&) = default;
};

struct DivisionOption {
  int sub_time = 0;
  int penalty = 0;
  friend bool operator==(const DivisionOption&, const DivisionOption&) = default;
};

// Options q = 2..r_j of a divisible task, nonincreasing by sub_time.
struct DivisionSpec {
  int task_id = 0;
  std::vector<DivisionOption> options;
  friend bool operator==(const DivisionSpec&, const DivisionSpec&) = default;
};

// Unnormalized input: ids are the file's ids 1..n (any order w.r.t. arcs).
struct RawInstance {
  int cycle_time = 0;
  std::vector<int> times;
  std::vector<Arc> arcs;
  std::vector<DivisionSpec> divisions;
};

namespace detail {

// True when some subset of `parts` (each usable once) sums exactly to target.
inline bool subset_sum_reachable(const std::vector<int>& parts, int target) {
  if (target < 0) return false;
  std::vector<char> reach(static_cast<std::size_t>(target) + 1, 0);
  reach[0] = 1;
  for (int p : parts) {
    if (p <= 0) continue;
    for (int s = target; s >= p; --s)
      if (reach[static_cast<std::size_t>(s - p)]) reach[static_cast<std::size_t>(s)] = 1;
  }
  return reach[static_cast<std::size_t>(target)] != 0;
}

}  // namespace detail

class Instance {
 public:
  Instance() = default;

  // Validates and normalizes: ids are renumbered topologically (ties by
  // original id), and a zero-time indivisible dummy terminal is appended when
  // the graph has more than one task without successors.
  static Instance create(const RawInstance& raw) {
    const int n = static_cast<int>(raw.times.size());
    if (n < 1) throw InstanceError("instance has no tasks");
    if (raw.cycle_time < 1)
      throw InstanceError("cycle time must be a positive integer");
    for (int i = 0; i < n; ++i)
      if (raw.times[static_cast<std::size_t>(i)] < 1)
        throw InstanceError("task " + std::to_string(i + 1) +
                            ": processing time must be >= 1");

    std::set<Arc> arc_set;
    for (const Arc& a : raw.arcs) {
      if (a.pred < 1 || a.pred > n || a.succ < 1 || a.succ > n)
        throw InstanceError("arc " + std::to_string(a.pred) + "," +
                            std::to_string(a.succ) + " references an unknown task");
      if (a.pred == a.succ)
        throw InstanceError("cycle detected: self loop on task " +
                            std::to_string(a.pred));
      if (!arc_set.insert(a).second)
        throw InstanceError("duplicate arc " + std::to_string(a.pred) + "," +
                            std::to_string(a.succ));
    }

    // Kahn's algorithm, smallest original id first.
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n) + 1);
    std::vector<int> indeg(static_cast<std::size_t>(n) + 1, 0);
    for (const Arc& a : arc_set) {
      out[static_cast<std::size_t>(a.pred)].push_back(a.succ);
      ++indeg[static_cast<std::size_t>(a.succ)];
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 1; v <= n; ++v)
      if (indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
    std::vector<int> to_norm(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> order;
    while (!ready.empty()) {
      const int v = ready.top();
      ready.pop();
      order.push_back(v);
      to_norm[static_cast<std::size_t>(v)] = static_cast<int>(order.size());
      for (int w : out[static_cast<std::size_t>(v)])
        if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
    if (static_cast<int>(order.size()) != n)
      throw InstanceError("cycle detected in precedence graph");

    Instance inst;
    inst.cycle_time_ = raw.cycle_time;
    inst.tasks_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const int orig = order[static_cast<std::size_t>(k)];
      inst.tasks_[static_cast<std::size_t>(k)] =
          Task{k + 1, raw.times[static_cast<std::size_t>(orig - 1)], false, orig};
    }
    for (const Arc& a : arc_set)
      inst.arcs_.push_back(Arc{to_norm[static_cast<std::size_t>(a.pred)],
                               to_norm[static_cast<std::size_t>(a.succ)]});

    // Divisions.
    std::vector<std::vector<DivisionOption>> div(static_cast<std::size_t>(n) + 1);
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    for (const DivisionSpec& spec : raw.divisions) {
      if (spec.task_id < 1 || spec.task_id > n)
        throw InstanceError("division for unknown task " +
                            std::to_string(spec.task_id));
      if (seen[static_cast<std::size_t>(spec.task_id)])
        throw InstanceError("duplicate division spec for task " +
                            std::to_string(spec.task_id));
      seen[static_cast<std::size_t>(spec.task_id)] = 1;
      if (spec.options.empty())
        throw InstanceError("division spec for task " +
                            std::to_string(spec.task_id) + " has no options");
      const int t = raw.times[static_cast<std::size_t>(spec.task_id - 1)];
      for (const DivisionOption& o : spec.options) {
        if (o.sub_time < 1 || o.sub_time > t - 2)
          throw InstanceError(
              "task " + std::to_string(spec.task_id) + ": subtask time " +
              std::to_string(o.sub_time) + " outside [1, " +
              std::to_string(t - 2) + "]");
        if (o.penalty < 1)
          throw InstanceError("task " + std::to_string(spec.task_id) +
                              ": subtask penalty must be >= 1");
      }
      auto opts = spec.options;
      std::stable_sort(opts.begin(), opts.end(),
                       [](const DivisionOption& a, const DivisionOption& b) {
                         if (a.sub_time != b.sub_time) return a.sub_time > b.sub_time;
                         return a.penalty < b.penalty;
                       });
      div[static_cast<std::size_t>(to_norm[static_cast<std::size_t>(spec.task_id)])] =
          std::move(opts);
    }

    inst.options_.resize(static_cast<std::size_t>(n));
    for (int id = 1; id <= n; ++id) {
      Task& task = inst.tasks_[static_cast<std::size_t>(id - 1)];
      auto& opts = inst.options_[static_cast<std::size_t>(id - 1)];
      opts.push_back(TaskOption{task.time, 0});
      for (const DivisionOption& o : div[static_cast<std::size_t>(id)])
        opts.push_back(TaskOption{o.sub_time, o.penalty});
      task.divisible = opts.size() > 1;
    }

    inst.build_adjacency();

    // Unique terminal.
    std::vector<int> sinks;
    for (int id = 1; id <= n; ++id)
      if (inst.succs_[static_cast<std::size_t>(id - 1)].empty()) sinks.push_back(id);
    // A divisible sink gets a dummy after it as well, so the terminal is never split.
    if (sinks.size() > 1 || inst.tasks_[static_cast<std::size_t>(sinks.front() - 1)].divisible) {
      const int dummy = n + 1;
      inst.tasks_.push_back(Task{dummy, 0, false, n + 1});
      inst.options_.push_back({TaskOption{0, 0}});
      for (int s : sinks) inst.arcs_.push_back(Arc{s, dummy});
      inst.has_dummy_ = true;
      inst.build_adjacency();
    }

    inst.validate_capacity();
    return inst;
  }

  int n() const { return static_cast<int>(tasks_.size()); }
  int cycle_time() const { return cycle_time_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const Task& task(int id) const { return tasks_.at(static_cast<std::size_t>(id - 1)); }
  int time(int id) const { return task(id).time; }
  bool is_divisible(int id) const { return task(id).divisible; }
  int terminal() const { return n(); }
  bool has_dummy_terminal() const { return has_dummy_; }
  bool is_dummy(int id) const { return has_dummy_ && id == n(); }

  // All options of a task, q = 1..r_j (index q-1).
  const std::vector<TaskOption>& options(int id) const {
    return options_.at(static_cast<std::size_t>(id - 1));
  }
  int option_count(int id) const { return static_cast<int>(options(id).size()); }
  const TaskOption& option(int id, int q) const {
    return options(id).at(static_cast<std::size_t>(q - 1));
  }

  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<int>& predecessors(int id) const {
    return preds_.at(static_cast<std::size_t>(id - 1));
  }
  const std::vector<int>& successors(int id) const {
    return succs_.at(static_cast<std::size_t>(id - 1));
  }

  std::vector<int> divisible_tasks() const {
    std::vector<int> out;
    for (const Task& t : tasks_)
      if (t.divisible) out.push_back(t.id);
    return out;
  }

  std::vector<DivisionSpec> divisions() const {
    std::vector<DivisionSpec> out;
    for (const Task& t : tasks_) {
      if (!t.divisible) continue;
      DivisionSpec spec{t.id, {}};
      const auto& opts = options(t.id);
      for (std::size_t q = 1; q < opts.size(); ++q)
        spec.options.push_back(DivisionOption{opts[q].given, opts[q].penalty});
      out.push_back(std::move(spec));
    }
    return out;
  }

  std::int64_t total_time() const {
    std::int64_t sum = 0;
    for (const Task& t : tasks_) sum += t.time;
    return sum;
  }

  int id_from_original(int original) const {
    for (const Task& t : tasks_)
      if (t.original_id == original) return t.id;
    return 0;
  }

  // Inverse of create(): original ids, dummy terminal dropped.
  RawInstance to_raw() const {
    RawInstance raw;
    raw.cycle_time = cycle_time_;
    const int real = has_dummy_ ? n() - 1 : n();
    raw.times.assign(static_cast<std::size_t>(real), 0);
    for (const Task& t : tasks_) {
      if (is_dummy(t.id)) continue;
      raw.times[static_cast<std::size_t>(t.original_id - 1)] = t.time;
    }
    for (const Arc& a : arcs_) {
      if (is_dummy(a.succ)) continue;
      raw.arcs.push_back(Arc{task(a.pred).original_id, task(a.succ).original_id});
    }
    std::sort(raw.arcs.begin(), raw.arcs.end());
    for (DivisionSpec spec : divisions()) {
      spec.task_id = task(spec.task_id).original_id;
      raw.divisions.push_back(std::move(spec));
    }
    std::sort(raw.divisions.begin(), raw.divisions.end(),
              [](const DivisionSpec& a, const DivisionSpec& b) {
                return a.task_id < b.task_id;
              });
    return raw;
  }

  Instance without_divisions() const {
    RawInstance raw = to_raw();
    raw.divisions.clear();
    return create(raw);
  }

  Instance with_cycle_time(int c) const {
    RawInstance raw = to_raw();
    raw.cycle_time = c;
    return create(raw);
  }

  // Replaces all division specs; ids are normalized ids of this instance.
  Instance with_divisions(std::vector<DivisionSpec> specs) const {
    RawInstance raw = to_raw();
    for (DivisionSpec& s : specs) {
      if (s.task_id < 1 || s.task_id > n() || is_dummy(s.task_id))
        throw InstanceError("division for unknown task " + std::to_string(s.task_id));
      s.task_id = task(s.task_id).original_id;
    }
    raw.divisions = std::move(specs);
    return create(raw);
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    if (a.cycle_time_ != b.cycle_time_ || a.arcs_ != b.arcs_ ||
        a.options_ != b.options_ || a.tasks_.size() != b.tasks_.size())
      return false;
    for (std::size_t i = 0; i < a.tasks_.size(); ++i) {
      const Task& x = a.tasks_[i];
      const Task& y = b.tasks_[i];
      if (x.id != y.id || x.time != y.time || x.divisible != y.divisible ||
          x.original_id != y.original_id)
        return false;
    }
    return true;
  }

 private:
  void build_adjacency() {
    preds_.assign(tasks_.size(), {});
    succs_.assign(tasks_.size(), {});
    std::sort(arcs_.begin(), arcs_.end());
    for (const Arc& a : arcs_) {
      preds_[static_cast<std::size_t>(a.succ - 1)].push_back(a.pred);
      succs_[static_cast<std::size_t>(a.pred - 1)].push_back(a.succ);
    }
  }

  void validate_capacity() const {
    for (const Task& t : tasks_) {
      if (t.time <= cycle_time_) continue;
      if (!t.divisible)
        throw InstanceError("task " + std::to_string(t.original_id) +
                            " is indivisible but its time " + std::to_string(t.time) +
                            " exceeds the cycle time " + std::to_string(cycle_time_));
      std::vector<int> parts;
      const auto& opts = options(t.id);
      for (std::size_t q = 1; q < opts.size(); ++q)
        if (opts[q].final_time() <= cycle_time_) parts.push_back(opts[q].given);
      if (!detail::subset_sum_reachable(parts, t.time))
        throw InstanceError("task " + std::to_string(t.original_id) +
                            " exceeds the cycle time and has no division whose "
                            "parts all fit a station");
    }
  }

  int cycle_time_ = 0;
  bool has_dummy_ = false;
  std::vector<Task> tasks_;
  std::vector<std::vector<TaskOption>> options_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> preds_;
  std::vector<std::vector<int>> succs_;
};

// P*_j and F*_j for every task, as bit sets indexed by id-1.
struct TransitiveSets {
  std::vector<DynamicBitset> all_predecessors;
  std::vector<DynamicBitset> all_successors;

  std::vector<int> predecessors(int id) const {
    return to_ids(all_predecessors.at(static_cast<std::size_t>(id - 1)));
  }
  std::vector<int> successors(int id) const {
    return to_ids(all_successors.at(static_cast<std::size_t>(id - 1)));
  }
  bool precedes(int i, int j) const {
    return all_successors.at(static_cast<std::size_t>(i - 1))
        .test(static_cast<std::size_t>(j - 1));
  }

 private:
  static std::vector<int> to_ids(const DynamicBitset& b) {
    std::vector<int> out;
    b.for_each([&](std::size_t i) { out.push_back(static_cast<int>(i) + 1); });
    return out;
  }
};

inline TransitiveSets transitive_sets(const Instance& inst) {
  const auto n = static_cast<std::size_t>(inst.n());
  TransitiveSets sets;
  sets.all_predecessors.assign(n, DynamicBitset(n));
  sets.all_successors.assign(n, DynamicBitset(n));
  // Ids are topological, so one forward and one backward sweep suffice.
  for (int j = 1; j <= inst.n(); ++j) {
    auto& pj = sets.all_predecessors[static_cast<std::size_t>(j - 1)];
    for (int p : inst.predecessors(j)) {
      pj.set(static_cast<std::size_t>(p - 1));
      pj |= sets.all_predecessors[static_cast<std::size_t>(p - 1)];
    }
  }
  for (int j = inst.n(); j >= 1; --j) {
    auto& fj = sets.all_successors[static_cast<std::size_t>(j - 1)];
    for (int s : inst.successors(j)) {
      fj.set(static_cast<std::size_t>(s - 1));
      fj |= sets.all_successors[static_cast<std::size_t>(s - 1)];
    }
  }
  return sets;
}

// ---------------------------------------------------------------------------
// Solutions

struct Placement {
  int task = 0;
  int q = 1;
  friend auto operator<=>(const Placement&, const Placement&) = default;
};

struct Solution {
  std::vector<std::vector<Placement>> stations;
  int penalty_total = 0;
  double le = 0.0;
  int lt = 0;

  int station_count() const { return static_cast<int>(stations.size()); }
};

inline int station_time(const Instance& inst, const std::vector<Placement>& load) {
  int sum = 0;
  for (const Placement& p : load) sum += inst.option(p.task, p.q).final_time();
  return sum;
}

inline int station_penalty(const Instance& inst, const std::vector<Placement>& load) {
  int sum = 0;
  for (const Placement& p : load) sum += inst.option(p.task, p.q).penalty;
  return sum;
}

struct Violation {
  enum class Kind {
    kNoStations,
    kEmptyStation,
    kCycleTime,
    kUnknownNode,
    kMissingTask,
    kDuplicateTask,
    kMixedActivation,
    kOptionReused,
    kDivisionSum,
    kDivisionSameStation,
    kPrecedence,
  };
  Kind kind;
  int task = 0;     // 0 when not task specific
  int station = 0;  // 1-based, 0 when not station specific
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.kind == kind; });
  }
};

// Checks every feasibility clause and reports all failures.
inline ValidationReport validate_solution(const Instance& inst, const Solution& sol) {
  using K = Violation::Kind;
  ValidationReport report;
  auto fail = [&](K kind, int task, int station, std::string msg) {
    report.violations.push_back(Violation{kind, task, station, std::move(msg)});
  };
  const int c = inst.cycle_time();
  if (sol.stations.empty()) fail(K::kNoStations, 0, 0, "solution has no stations");

  struct Occurrence {
    int station;
    int q;
  };
  std::vector<std::vector<Occurrence>> occ(static_cast<std::size_t>(inst.n()) + 1);
  for (std::size_t k = 0; k < sol.stations.size(); ++k) {
    const int station = static_cast<int>(k) + 1;
    const auto& load = sol.stations[k];
    if (load.empty()) fail(K::kEmptyStation, 0, station, "station is empty");
    int time = 0;
    for (const Placement& p : load) {
      if (p.task < 1 || p.task > inst.n() || p.q < 1 || p.q > inst.option_count(p.task)) {
        fail(K::kUnknownNode, p.task, station,
             "unknown node " + std::to_string(p.task) + "^" + std::to_string(p.q));
        continue;
      }
      time += inst.option(p.task, p.q).final_time();
      occ[static_cast<std::size_t>(p.task)].push_back(Occurrence{station, p.q});
    }
    if (time > c)
      fail(K::kCycleTime, 0, station,
           "station time " + std::to_string(time) + " exceeds cycle time " +
               std::to_string(c));
  }

  for (int j = 1; j <= inst.n(); ++j) {
    const auto& o = occ[static_cast<std::size_t>(j)];
    const std::string name = "task " + std::to_string(inst.task(j).original_id);
    if (o.empty()) {
      fail(K::kMissingTask, j, 0, name + " is not assigned");
      continue;
    }
    const bool undivided = std::any_of(o.begin(), o.end(),
                                       [](const Occurrence& x) { return x.q == 1; });
    if (undivided) {
      if (o.size() > 1) {
        const bool pieces = std::any_of(o.begin(), o.end(),
                                        [](const Occurrence& x) { return x.q != 1; });
        fail(pieces ? K::kMixedActivation : K::kDuplicateTask, j, o[1].station,
             name + (pieces ? " is activated both undivided and divided"
                            : " is assigned more than once"));
      }
      continue;
    }
    std::vector<int> qs;
    std::vector<int> stations;
    int sum = 0;
    for (const Occurrence& x : o) {
      qs.push_back(x.q);
      stations.push_back(x.station);
      sum += inst.option(j, x.q).given;
    }
    std::sort(qs.begin(), qs.end());
    if (std::adjacent_find(qs.begin(), qs.end()) != qs.end())
      fail(K::kOptionReused, j, 0, name + " uses a subtask option more than once");
    std::sort(stations.begin(), stations.end());
    auto dup = std::adjacent_find(stations.begin(), stations.end());
    if (dup != stations.end())
      fail(K::kDivisionSameStation, j, *dup,
           name + " has two subtasks on the same station");
    if (sum != inst.time(j))
      fail(K::kDivisionSum, j, 0,
           name + " subtask times sum to " + std::to_string(sum) + ", expected " +
               std::to_string(inst.time(j)));
  }

  for (const Arc& a : inst.arcs()) {
    const auto& oi = occ[static_cast<std::size_t>(a.pred)];
    const auto& oj = occ[static_cast<std::size_t>(a.succ)];
    if (oi.empty() || oj.empty()) continue;
    int latest_i = 0;
    for (const Occurrence& x : oi) latest_i = std::max(latest_i, x.station);
    int earliest_j = oj.front().station;
    for (const Occurrence& x : oj) earliest_j = std::min(earliest_j, x.station);
    if (latest_i > earliest_j)
      fail(K::kPrecedence, a.succ, earliest_j,
           "task " + std::to_string(inst.task(a.pred).original_id) + " at station " +
               std::to_string(latest_i) + " must precede task " +
               std::to_string(inst.task(a.succ).original_id) + " at station " +
               std::to_string(earliest_j));
  }
  return report;
}

struct Metrics {
  double le = 0.0;  // percent
  int lt = 0;       // time units
};

// LE = 100 * sum t(S_k) / (m c), LT = c (m - 1) + t(S_m); station times
// include penalties.
inline Metrics metrics(const Instance& inst, const Solution& sol) {
  const ValidationReport report = validate_solution(inst, sol);
  if (!report.ok())
    throw InstanceError("metrics requested for an invalid solution: " +
                        report.violations.front().message);
  const int c = inst.cycle_time();
  const int m = sol.station_count();
  std::int64_t total = 0;
  for (const auto& load : sol.stations) total += station_time(inst, load);
  Metrics out;
  out.le = 100.0 * static_cast<double>(total) / (static_cast<double>(m) * c);
  out.lt = c * (m - 1) + station_time(inst, sol.stations.back());
  return out;
}

// Builds a Solution from station loads, filling F and, when valid, LE/LT.
inline Solution make_solution(const Instance& inst,
                              std::vector<std::vector<Placement>> stations) {
  Solution sol;
  sol.stations = std::move(stations);
  for (auto& load : sol.stations) std::sort(load.begin(), load.end());
  for (const auto& load : sol.stations)
    for (const Placement& p : load)
      if (p.task >= 1 && p.task <= inst.n() && p.q >= 1 && p.q <= inst.option_count(p.task))
        sol.penalty_total += inst.option(p.task, p.q).penalty;
  if (validate_solution(inst, sol).ok()) {
    const Metrics m = metrics(inst, sol);
    sol.le = m.le;
    sol.lt = m.lt;
  }
  return sol;
}

}  // namespace tdalbp
