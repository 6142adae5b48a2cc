#pragma once

// Binary program over x_{jk}^q (node j^q at station k), written in the LP
// file format, plus the reverse path: reading solver output back into a
// validated Solution.
//
// Row families:
//   C2   indivisible task assigned once
//   C3   given times of the activated options of a divisible task sum to t_j
//   C3b  each option of a divisible task used at most once
//   C4   at most one option of a divisible task per station
//   C5   cycle time per station, penalty-inclusive for divisible tasks
//   C6-9 precedence for arc (i, j); a divisible participant only binds when
//        activated (big-M = m')

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdalbp/expansion.hpp"
#include "tdalbp/instance.hpp"
#include "tdalbp/instance_io.hpp"

namespace tdalbp {

class MilpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MilpVariable {
  int task = 0;
  int q = 1;
  int station = 0;
  std::string name;
};

struct MilpTerm {
  int var = 0;
  std::int64_t coef = 0;
};

enum class Sense { kLe, kEq };

struct MilpRow {
  std::string family;
  std::string name;
  std::vector<MilpTerm> terms;
  Sense sense = Sense::kLe;
  std::int64_t rhs = 0;
};

struct MilpModel {
  Instance instance;
  int m_prime = 0;
  std::vector<MilpVariable> variables;
  std::vector<MilpTerm> objective;
  std::vector<MilpRow> rows;
  std::map<std::string, int> index;  // variable name -> position

  std::optional<int> find(int task, int q, int station) const {
    auto it = index.find(variable_name(task, q, station));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  static std::string variable_name(int task, int q, int station) {
    return "x_" + std::to_string(task) + "_" + std::to_string(q) + "_" + std::to_string(station);
  }

  std::size_t count(const std::string& family) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](const MilpRow& r) { return r.family == family; }));
  }
};

namespace detail {

class RowBuilder {
 public:
  void add(int var, std::int64_t coef) { coefs_[var] += coef; }
  std::vector<MilpTerm> terms() const {
    std::vector<MilpTerm> out;
    for (const auto& [v, c] : coefs_)
      if (c != 0) out.push_back(MilpTerm{v, c});
    return out;
  }

 private:
  std::map<int, std::int64_t> coefs_;
};

}  // namespace detail

inline MilpModel build_model(const ExpandedGraph& g) {
  const Instance& inst = g.instance();
  MilpModel model{inst, g.m_prime(), {}, {}, {}, {}};
  const int n = inst.n();
  const int mp = g.m_prime();
  const int c = inst.cycle_time();

  for (int j = 1; j <= n; ++j) {
    bool any = false;
    for (int q = 1; q <= inst.option_count(j); ++q) {
      const int v = g.node_index(j, q);
      for (int k = g.earliest(v); k <= g.latest(v); ++k) {
        any = true;
        MilpVariable var{j, q, k, MilpModel::variable_name(j, q, k)};
        model.index.emplace(var.name, static_cast<int>(model.variables.size()));
        model.variables.push_back(std::move(var));
      }
    }
    if (!any)
      throw MilpError("task " + std::to_string(inst.task(j).original_id) + " has an empty station interval with m' = " +
                      std::to_string(mp));
  }

  auto vars_of = [&](int j, int q) {
    std::vector<std::pair<int, int>> out;  // (var, station)
    const int v = g.node_index(j, q);
    for (int k = g.earliest(v); k <= g.latest(v); ++k) out.emplace_back(*model.find(j, q, k), k);
    return out;
  };
  auto push = [&](std::string family, std::string name, const detail::RowBuilder& b, Sense s, std::int64_t rhs) {
    model.rows.push_back(MilpRow{std::move(family), std::move(name), b.terms(), s, rhs});
  };
  auto tag = [](std::initializer_list<int> parts) {
    std::string s;
    for (int p : parts) s += "_" + std::to_string(p);
    return s;
  };

  for (auto [var, k] : vars_of(inst.terminal(), 1)) model.objective.push_back(MilpTerm{var, k});

  for (int j = 1; j <= n; ++j) {
    if (!inst.is_divisible(j)) {
      detail::RowBuilder b;
      for (auto [var, k] : vars_of(j, 1)) b.add(var, 1);
      push("C2", "C2" + tag({j}), b, Sense::kEq, 1);
      continue;
    }
    detail::RowBuilder sum;
    for (int q = 1; q <= inst.option_count(j); ++q)
      for (auto [var, k] : vars_of(j, q)) sum.add(var, inst.option(j, q).given);
    push("C3", "C3" + tag({j}), sum, Sense::kEq, inst.time(j));
    for (int q = 2; q <= inst.option_count(j); ++q) {
      detail::RowBuilder b;
      for (auto [var, k] : vars_of(j, q)) b.add(var, 1);
      push("C3b", "C3b" + tag({j, q}), b, Sense::kLe, 1);
    }
    std::map<int, detail::RowBuilder> per_station;
    for (int q = 1; q <= inst.option_count(j); ++q)
      for (auto [var, k] : vars_of(j, q)) per_station[k].add(var, 1);
    for (const auto& [k, b] : per_station) push("C4", "C4" + tag({j, k}), b, Sense::kLe, 1);
  }

  for (int k = 1; k <= mp; ++k) {
    detail::RowBuilder b;
    bool any = false;
    for (int j = 1; j <= n; ++j)
      for (int q = 1; q <= inst.option_count(j); ++q)
        if (auto var = model.find(j, q, k)) {
          b.add(*var, inst.option(j, q).final_time());
          any = true;
        }
    if (any) push("C5", "C5" + tag({k}), b, Sense::kLe, c);
  }

  for (const Arc& a : inst.arcs()) {
    const int i = a.pred;
    const int j = a.succ;
    const bool di = inst.is_divisible(i);
    const bool dj = inst.is_divisible(j);
    for (int qi = 1; qi <= inst.option_count(i); ++qi) {
      for (int qj = 1; qj <= inst.option_count(j); ++qj) {
        const int vi = g.node_index(i, qi);
        const int vj = g.node_index(j, qj);
        if (g.latest(vi) < g.earliest(vj)) continue;
        detail::RowBuilder b;
        for (auto [var, k] : vars_of(i, qi)) b.add(var, k + (di ? mp : 0));
        for (auto [var, k] : vars_of(j, qj)) b.add(var, -k + (dj ? mp : 0));
        if (!di && !dj) {
          push("C6", "C6" + tag({i, j}), b, Sense::kLe, 0);
        } else if (!di) {
          push("C7", "C7" + tag({i, j, qj}), b, Sense::kLe, mp);
        } else if (!dj) {
          push("C8", "C8" + tag({i, qi, j}), b, Sense::kLe, mp);
        } else {
          push("C9", "C9" + tag({i, qi, j, qj}), b, Sense::kLe, 2 * mp);
        }
      }
    }
  }
  return model;
}

namespace detail {

class LpWriter {
 public:
  explicit LpWriter(std::ostringstream& os) : os_(os) {}

  void begin(const std::string& head) {
    os_ << ' ' << head;
    width_ = 1 + head.size();
  }
  void term(std::int64_t coef, const std::string& name, bool first) {
    std::string piece;
    if (coef < 0)
      piece = "- ";
    else if (!first)
      piece = "+ ";
    const std::int64_t mag = coef < 0 ? -coef : coef;
    if (mag != 1) piece += std::to_string(mag) + " ";
    piece += name;
    if (width_ + 1 + piece.size() > 78) {
      os_ << "\n   ";
      width_ = 3;
    }
    os_ << ' ' << piece;
    width_ += 1 + piece.size();
  }
  void end(const std::string& tail) {
    if (!tail.empty()) os_ << ' ' << tail;
    os_ << '\n';
  }

 private:
  std::ostringstream& os_;
  std::size_t width_ = 0;
};

}  // namespace detail

inline std::string write_lp(const MilpModel& model) {
  std::ostringstream os;
  detail::LpWriter w(os);
  os << "Minimize\n";
  w.begin("obj:");
  bool first = true;
  for (const MilpTerm& t : model.objective) {
    w.term(t.coef, model.variables[static_cast<std::size_t>(t.var)].name, first);
    first = false;
  }
  w.end(first ? "0" : "");
  os << "Subject To\n";
  for (const MilpRow& r : model.rows) {
    if (r.terms.empty()) continue;
    w.begin(r.name + ":");
    bool f = true;
    for (const MilpTerm& t : r.terms) {
      w.term(t.coef, model.variables[static_cast<std::size_t>(t.var)].name, f);
      f = false;
    }
    w.end(std::string(r.sense == Sense::kEq ? "= " : "<= ") + std::to_string(r.rhs));
  }
  os << "Bounds\n";
  for (const MilpVariable& v : model.variables) os << " 0 <= " << v.name << " <= 1\n";
  os << "Binaries\n";
  for (const MilpVariable& v : model.variables) os << ' ' << v.name << '\n';
  os << "End\n";
  return os.str();
}

// Values for every variable of the model from a solution; throws when the
// solution places a node outside its station interval.
inline std::vector<int> encode(const MilpModel& model, const Solution& sol) {
  std::vector<int> x(model.variables.size(), 0);
  for (std::size_t k = 0; k < sol.stations.size(); ++k)
    for (const Placement& p : sol.stations[k]) {
      const auto var = model.find(p.task, p.q, static_cast<int>(k) + 1);
      if (!var)
        throw MilpError("no variable for " + node_label(model.instance, p.task, p.q) + " at station " +
                        std::to_string(k + 1));
      x[static_cast<std::size_t>(*var)] = 1;
    }
  return x;
}

inline std::int64_t row_activity(const MilpRow& r, const std::vector<int>& x) {
  std::int64_t lhs = 0;
  for (const MilpTerm& t : r.terms) lhs += t.coef * x.at(static_cast<std::size_t>(t.var));
  return lhs;
}

// Names of the rows the assignment violates.
inline std::vector<std::string> evaluate(const MilpModel& model, const std::vector<int>& x) {
  std::vector<std::string> out;
  for (const MilpRow& r : model.rows) {
    const std::int64_t lhs = row_activity(r, x);
    const bool ok = r.sense == Sense::kEq ? lhs == r.rhs : lhs <= r.rhs;
    if (!ok) out.push_back(r.name);
  }
  return out;
}

inline std::int64_t objective_value(const MilpModel& model, const std::vector<int>& x) {
  std::int64_t v = 0;
  for (const MilpTerm& t : model.objective) v += t.coef * x.at(static_cast<std::size_t>(t.var));
  return v;
}

// Binary values from solver output, one `name value` pair per line. Lines
// that start with '#' and an optional `objective <value>` line are accepted.
inline std::vector<int> parse_lp_values(const MilpModel& model, const std::string& text,
                                        std::optional<double>* objective = nullptr) {
  std::vector<int> x(model.variables.size(), 0);
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::vector<std::string> toks;
    for (auto t : detail::tokens(line)) toks.emplace_back(t);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() != 2) throw MilpError("line " + std::to_string(number) + ": expected 'name value'");
    double value = 0;
    try {
      std::size_t used = 0;
      value = std::stod(toks[1], &used);
      if (used != toks[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw MilpError("line " + std::to_string(number) + ": bad value '" + toks[1] + "'");
    }
    std::string lower = toks[0];
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "objective" || lower == "obj") {
      if (objective != nullptr) *objective = value;
      continue;
    }
    auto it = model.index.find(toks[0]);
    if (it == model.index.end()) throw MilpError("line " + std::to_string(number) + ": unknown variable " + toks[0]);
    int bit = 0;
    if (std::fabs(value) <= 1e-6)
      bit = 0;
    else if (std::fabs(value - 1.0) <= 1e-6)
      bit = 1;
    else
      throw MilpError("variable " + toks[0] + " has non-binary value " + toks[1]);
    x[static_cast<std::size_t>(it->second)] = bit;
  }
  return x;
}

// Station loads from binary values. Empty stations are dropped; the result
// must pass validate_solution and the terminal must sit in the last used
// station.
inline Solution decode(const MilpModel& model, const std::vector<int>& x) {
  std::map<int, std::vector<Placement>> by_station;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) {
      const MilpVariable& v = model.variables[i];
      by_station[v.station].push_back(Placement{v.task, v.q});
    }
  std::vector<std::vector<Placement>> stations;
  for (auto& [k, load] : by_station) stations.push_back(std::move(load));
  Solution sol = make_solution(model.instance, std::move(stations));
  const ValidationReport rep = validate_solution(model.instance, sol);
  if (!rep.ok()) {
    std::string msg = "assignment is not a valid solution:";
    for (const Violation& v : rep.violations) msg += "\n  " + v.message;
    throw MilpError(msg);
  }
  const std::int64_t kappa = [&] {
    std::int64_t s = 0;
    for (const MilpTerm& t : model.objective) s += x[static_cast<std::size_t>(t.var)];
    return s;
  }();
  if (kappa != 1) throw MilpError("terminal task is not assigned exactly once");
  const std::int64_t last = objective_value(model, x);
  if (last != by_station.rbegin()->first)
    throw MilpError("terminal station " + std::to_string(last) + " is not the last used station");
  return sol;
}

inline Solution parse_lp_solution(const MilpModel& model, const std::string& text) {
  std::optional<double> reported;
  const std::vector<int> x = parse_lp_values(model, text, &reported);
  Solution sol = decode(model, x);
  if (reported && std::fabs(*reported - static_cast<double>(objective_value(model, x))) > 1e-6)
    throw MilpError("reported objective " + std::to_string(*reported) + " differs from the terminal station index " +
                    std::to_string(objective_value(model, x)));
  return sol;
}

}  // namespace tdalbp
