#pragma once

// TDALBP instances from SALBP-1 instances: Method-M (median based) and
// Method-R (random selection).

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdalbp/instance.hpp"

namespace tdalbp {

enum class GenMethod { kM, kR };

struct GenConfig {
  GenMethod method = GenMethod::kM;
  double delta = 1.5;
  std::uint64_t seed = 1;
  int penalty_per_subtask = 1;
};

struct GenResult {
  Instance instance;
  std::vector<std::string> warnings;
};

class GeneratorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// As equal as possible, larger parts first, every part in [1, t - 2].
inline std::vector<int> split_time(int t, int parts) {
  if (parts < 2) throw GeneratorError("a split needs at least 2 parts");
  const int base = t / parts;
  const int extra = t % parts;
  std::vector<int> out;
  for (int i = 0; i < parts; ++i) out.push_back(base + (i < extra ? 1 : 0));
  if (out.back() < 1 || out.front() > t - 2)
    throw GeneratorError("time " + std::to_string(t) + " cannot be split into " + std::to_string(parts) +
                         " parts of at most t-2");
  return out;
}

// Lower median of the task times (dummy terminal excluded).
inline double lower_median(const Instance& inst) {
  std::vector<int> times;
  for (const Task& t : inst.tasks())
    if (!inst.is_dummy(t.id)) times.push_back(t.time);
  std::sort(times.begin(), times.end());
  return times[(times.size() - 1) / 2];
}

// round-half-to-even(3n / 10) in integer arithmetic.
inline int thirty_percent(int n) {
  const int q = 3 * n / 10;
  const int r = 3 * n % 10;
  if (r > 5) return q + 1;
  if (r == 5) return q + (q % 2);
  return q;
}

namespace detail {

inline DivisionSpec make_division(int task, const std::vector<int>& parts, int penalty) {
  DivisionSpec d;
  d.task_id = task;
  for (int p : parts) d.options.push_back(DivisionOption{p, penalty});
  return d;
}

// Portable draws: the standard distributions are implementation-defined.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

inline double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

inline GenResult method_m(const Instance& source, double delta, int penalty = 1) {
  if (!(delta > 1.0)) throw GeneratorError("delta must be > 1");
  if (penalty < 1) throw GeneratorError("penalty must be >= 1");
  const Instance inst = source.without_divisions();
  const double x = lower_median(inst);
  GenResult res{inst, {}};
  std::vector<DivisionSpec> specs;
  for (const Task& t : inst.tasks()) {
    if (inst.is_dummy(t.id) || !(t.time > x)) continue;
    const int parts = t.time > delta * x ? 2 : 3;
    try {
      specs.push_back(detail::make_division(t.id, split_time(t.time, parts), penalty));
    } catch (const GeneratorError&) {
      res.warnings.push_back("task " + std::to_string(t.original_id) + " (t=" + std::to_string(t.time) +
                             ") left indivisible: cannot split into " + std::to_string(parts) + " parts");
    }
  }
  res.instance = inst.with_divisions(std::move(specs));
  return res;
}

inline GenResult method_r(const Instance& source, std::uint64_t seed, int penalty = 1) {
  if (penalty < 1) throw GeneratorError("penalty must be >= 1");
  const Instance inst = source.without_divisions();
  std::vector<int> eligible;
  int real = 0;
  for (const Task& t : inst.tasks()) {
    if (inst.is_dummy(t.id)) continue;
    ++real;
    if (t.time >= 4) eligible.push_back(t.id);
  }
  if (real < 4) throw GeneratorError("Method-R needs at least 4 tasks");
  GenResult res{inst, {}};
  const int want = thirty_percent(real);
  if (eligible.empty()) {
    res.warnings.push_back("no task with t >= 4; no divisions generated");
    return res;
  }
  if (static_cast<int>(eligible.size()) < want)
    res.warnings.push_back("only " + std::to_string(eligible.size()) + " tasks with t >= 4, wanted " +
                           std::to_string(want));
  const int take = std::min<int>(want, static_cast<int>(eligible.size()));

  std::mt19937_64 rng(seed);
  for (int i = 0; i < take; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   detail::draw_below(rng, static_cast<std::uint64_t>(eligible.size()) - static_cast<std::uint64_t>(i));
    std::swap(eligible[static_cast<std::size_t>(i)], eligible[j]);
  }
  std::vector<int> chosen(eligible.begin(), eligible.begin() + take);
  std::vector<DivisionSpec> specs;
  for (int id : chosen) {
    const int parts = detail::draw_unit(rng) < 0.6 ? 2 : 3;
    specs.push_back(detail::make_division(id, split_time(inst.time(id), parts), penalty));
  }
  std::sort(specs.begin(), specs.end(), [](const DivisionSpec& a, const DivisionSpec& b) { return a.task_id < b.task_id; });
  res.instance = inst.with_divisions(std::move(specs));
  return res;
}

inline GenResult generate(const Instance& inst, const GenConfig& cfg) {
  return cfg.method == GenMethod::kM ? method_m(inst, cfg.delta, cfg.penalty_per_subtask)
                                     : method_r(inst, cfg.seed, cfg.penalty_per_subtask);
}

}  // namespace tdalbp
