#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tdalbp/instance.hpp"
#include "tdalbp/instance_io.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(TDALBP_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline tdalbp::Instance sample23() { return tdalbp::parse_instance(slurp(data_path("sample23.tdalb"))); }
inline tdalbp::Instance sample23_salbp() { return tdalbp::parse_instance(slurp(data_path("sample23.alb"))); }

// The three optimal layouts printed for the 23-task example (F = 8, 4, 2).
inline const char* kSample23F8 =
    "1: 1 3^2\n2: 2 3^3\n3: 4 5 7\n4: 6 9^2\n5: 8 12\n6: 9^3 11 16\n7: 10 14^3\n"
    "8: 13^2 14^2\n9: 15 18\n10: 13^3 17 19 20\n11: 21 22 23\n";
inline const char* kSample23F4 =
    "1: 2 4\n2: 1 3^2\n3: 3^3 5\n4: 6 9^2\n5: 8 12\n6: 7 9^3 13\n7: 10 16\n"
    "8: 14 17\n9: 11 19 20\n10: 15 18\n11: 21 22 23\n";
inline const char* kSample23F2 =
    "1: 2 4\n2: 1 3^2\n3: 3^3 5 7\n4: 6 10\n5: 8\n6: 9 12\n7: 11 15 16\n"
    "8: 18 22\n9: 14 21\n10: 13 17 19\n11: 20 23\n";

struct RandomSpec {
  int n_min = 3;
  int n_max = 9;
  int c_min = 6;
  int c_max = 14;
  double arc_prob = 0.3;
  double division_prob = 0.45;
  int max_nodes = 18;
  bool allow_oversized = true;  // tasks longer than c that must be split
};

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Random small instance with ids shuffled (so renumbering is exercised) and
// random division options. Expanded node count stays within max_nodes,
// counting a possible dummy terminal.
inline tdalbp::Instance random_instance(std::mt19937_64& rng, const RandomSpec& spec = {}) {
  for (;;) {
    const int n = uniform(rng, spec.n_min, spec.n_max);
    const int c = uniform(rng, spec.c_min, spec.c_max);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);

    tdalbp::RawInstance raw;
    raw.cycle_time = c;
    raw.times.assign(static_cast<std::size_t>(n), 0);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (unit(rng) < spec.arc_prob)
          raw.arcs.push_back(tdalbp::Arc{order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]});

    int budget = spec.max_nodes - n - 1;
    for (int id = 1; id <= n; ++id) {
      int t = uniform(rng, 1, c);
      const bool divide = t >= 3 && budget >= 2 && unit(rng) < spec.division_prob;
      if (divide && spec.allow_oversized && unit(rng) < 0.25) t = std::min(c + uniform(rng, 1, c / 2 + 1), 2 * c - 2);
      raw.times[static_cast<std::size_t>(id - 1)] = t;
      if (!divide || t < 3) continue;
      // One valid partition plus, sometimes, a decoy option.
      const int parts = (t >= 4 && budget >= 3 && unit(rng) < 0.4) ? 3 : 2;
      std::vector<int> sizes;
      int left = t;
      for (int p = parts; p > 1; --p) {
        const int hi = std::min(left - (p - 1), t - 2);
        const int lo = std::max(1, left - (p - 1) * (t - 2));
        const int s = uniform(rng, lo, std::max(lo, hi));
        sizes.push_back(s);
        left -= s;
      }
      sizes.push_back(left);
      if (std::any_of(sizes.begin(), sizes.end(), [&](int s) { return s < 1 || s > t - 2; })) {
        if (t > c) raw.times[static_cast<std::size_t>(id - 1)] = c;
        continue;
      }
      if (budget - static_cast<int>(sizes.size()) >= 1 && unit(rng) < 0.3) sizes.push_back(uniform(rng, 1, t - 2));
      tdalbp::DivisionSpec d;
      d.task_id = id;
      for (int s : sizes) d.options.push_back(tdalbp::DivisionOption{s, uniform(rng, 1, 2)});
      std::sort(d.options.begin(), d.options.end(),
                [](const auto& x, const auto& y) { return x.sub_time > y.sub_time; });
      budget -= static_cast<int>(sizes.size());
      raw.divisions.push_back(d);
    }
    try {
      return tdalbp::Instance::create(raw);
    } catch (const tdalbp::InstanceError&) {
      // oversized task whose pieces do not fit; draw again
    }
  }
}

}  // namespace fixtures
