#pragma once

// Text formats:
//
//   alb    CYCLE header (optional), task count, one line per task (`id time`,
//          or just `time` in the classic benchmark layout), arc lines `i,j`,
//          terminated by `-1,-1`. The tagged layout of the newer benchmark
//          sets (`<number of tasks>`, `<cycle time>`, `<task times>`,
//          `<precedence relations>`, `<end>`) is accepted as well.
//   tdalb  alb content followed by `DIVISIONS` and one line per divisible
//          task: `j : t2/f2 ; t3/f3 ; ...`.
//
// Lines starting with '#' are comments. The full grammar is in
// docs/formats.md.

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tdalbp/instance.hpp"

namespace tdalbp {

enum class Format { kAlb, kTdalb };

class ParseError : public InstanceError {
 public:
  ParseError(int line, const std::string& what)
      : InstanceError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline int parse_int(std::string_view s, int line) {
  s = trim(s);
  if (s.empty()) throw ParseError(line, "expected an integer");
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw ParseError(line, "expected an integer, got '" + std::string(s) + "'");
  long long v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw ParseError(line, "expected an integer, got '" + std::string(s) + "'");
    v = v * 10 + (s[i] - '0');
    if (v > 1'000'000'000LL) throw ParseError(line, "integer out of range");
  }
  return static_cast<int>(neg ? -v : v);
}

struct Line {
  int number;
  std::string_view text;
};

inline std::vector<Line> significant_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = trim(text.substr(start, end - start));
    if (!line.empty() && line.front() != '#') out.push_back(Line{number, line});
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

inline Arc parse_arc(const Line& l) {
  auto parts = split(l.text, ',');
  if (parts.size() != 2) throw ParseError(l.number, "expected an arc 'i,j'");
  return Arc{parse_int(parts[0], l.number), parse_int(parts[1], l.number)};
}

inline RawInstance parse_tagged(const std::vector<Line>& lines, std::optional<int> cycle) {
  RawInstance raw;
  std::string section;
  int n = -1;
  int file_cycle = 0;
  for (const Line& l : lines) {
    if (l.text.front() == '<') {
      section = std::string(l.text);
      if (section == "<end>") break;
      continue;
    }
    if (section == "<number of tasks>") {
      n = parse_int(l.text, l.number);
      if (n < 1) throw ParseError(l.number, "task count must be positive");
      raw.times.assign(static_cast<std::size_t>(n), 0);
    } else if (section == "<cycle time>") {
      file_cycle = parse_int(l.text, l.number);
    } else if (section == "<task times>") {
      auto t = tokens(l.text);
      if (t.size() != 2 || n < 0) throw ParseError(l.number, "expected 'id time'");
      const int id = parse_int(t[0], l.number);
      if (id < 1 || id > n) throw ParseError(l.number, "task id out of range");
      raw.times[static_cast<std::size_t>(id - 1)] = parse_int(t[1], l.number);
    } else if (section == "<precedence relations>") {
      raw.arcs.push_back(parse_arc(l));
    }
  }
  if (n < 0) throw ParseError(1, "missing <number of tasks>");
  raw.cycle_time = cycle.value_or(file_cycle);
  return raw;
}

}  // namespace detail

inline Format detect_format(std::string_view text) {
  for (const auto& l : detail::significant_lines(text))
    if (l.text == "DIVISIONS") return Format::kTdalb;
  return Format::kAlb;
}

// Parses and normalizes an instance. A cycle time passed explicitly overrides
// any CYCLE header in the text; one of the two is required.
inline Instance parse_instance(std::string_view text, Format format,
                               std::optional<int> cycle_time = std::nullopt) {
  using detail::Line;
  const auto lines = detail::significant_lines(text);
  if (lines.empty()) throw ParseError(1, "empty input");

  RawInstance raw;
  if (lines.front().text.front() == '<') {
    raw = detail::parse_tagged(lines, cycle_time);
  } else {
    std::size_t i = 0;
    std::optional<int> header_cycle;
    {
      auto t = detail::tokens(lines[i].text);
      if (!t.empty() && t[0] == "CYCLE") {
        if (t.size() != 2) throw ParseError(lines[i].number, "expected 'CYCLE c'");
        header_cycle = detail::parse_int(t[1], lines[i].number);
        ++i;
      }
    }
    if (i >= lines.size()) throw ParseError(lines.back().number, "missing task count");
    const int n = detail::parse_int(lines[i].text, lines[i].number);
    if (n < 1) throw ParseError(lines[i].number, "task count must be positive");
    ++i;
    raw.times.assign(static_cast<std::size_t>(n), 0);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k, ++i) {
      if (i >= lines.size())
        throw ParseError(lines.back().number, "expected " + std::to_string(n) + " task lines");
      const Line& l = lines[i];
      auto t = detail::tokens(l.text);
      int id = k + 1;
      int time = 0;
      if (t.size() == 2) {
        id = detail::parse_int(t[0], l.number);
        time = detail::parse_int(t[1], l.number);
      } else if (t.size() == 1 && t[0].find(',') == std::string_view::npos) {
        time = detail::parse_int(t[0], l.number);
      } else {
        throw ParseError(l.number, "expected 'id time'");
      }
      if (id < 1 || id > n) throw ParseError(l.number, "task id out of range");
      if (seen[static_cast<std::size_t>(id - 1)])
        throw ParseError(l.number, "task " + std::to_string(id) + " listed twice");
      seen[static_cast<std::size_t>(id - 1)] = 1;
      if (time < 1) throw ParseError(l.number, "processing time must be >= 1");
      raw.times[static_cast<std::size_t>(id - 1)] = time;
    }
    bool terminated = false;
    for (; i < lines.size(); ++i) {
      const Line& l = lines[i];
      if (l.text == "DIVISIONS") break;
      if (terminated) throw ParseError(l.number, "unexpected content after '-1,-1'");
      const Arc a = detail::parse_arc(l);
      if (a.pred == -1 && a.succ == -1) {
        terminated = true;
        continue;
      }
      raw.arcs.push_back(a);
    }
    if (i < lines.size()) {
      if (format != Format::kTdalb)
        throw ParseError(lines[i].number, "DIVISIONS section in alb input");
      for (++i; i < lines.size(); ++i) {
        const Line& l = lines[i];
        const auto colon = l.text.find(':');
        if (colon == std::string_view::npos)
          throw ParseError(l.number, "expected 'j : t2/f2 ; ...'");
        DivisionSpec spec;
        spec.task_id = detail::parse_int(l.text.substr(0, colon), l.number);
        for (auto item : detail::split(l.text.substr(colon + 1), ';')) {
          auto tf = detail::split(item, '/');
          if (tf.size() != 2) throw ParseError(l.number, "expected 'time/penalty'");
          spec.options.push_back(DivisionOption{detail::parse_int(tf[0], l.number),
                                                detail::parse_int(tf[1], l.number)});
        }
        if (spec.task_id < 1 || spec.task_id > n)
          throw ParseError(l.number, "division for unknown task");
        const int t = raw.times[static_cast<std::size_t>(spec.task_id - 1)];
        for (const auto& o : spec.options)
          if (o.sub_time < 1 || o.sub_time > t - 2)
            throw ParseError(l.number, "subtask time " + std::to_string(o.sub_time) +
                                           " outside [1, " + std::to_string(t - 2) + "]");
        raw.divisions.push_back(std::move(spec));
      }
    }
    raw.cycle_time = cycle_time.value_or(header_cycle.value_or(0));
  }
  if (raw.cycle_time == 0)
    throw ParseError(lines.front().number, "cycle time missing (CYCLE header or explicit value)");
  for (const Arc& a : raw.arcs) {
    const int n = static_cast<int>(raw.times.size());
    if (a.pred < 1 || a.pred > n || a.succ < 1 || a.succ > n)
      throw InstanceError("arc " + std::to_string(a.pred) + "," + std::to_string(a.succ) +
                          " references an unknown task");
  }
  return Instance::create(raw);
}

inline Instance parse_instance(std::string_view text, std::optional<int> cycle_time = std::nullopt) {
  return parse_instance(text, detect_format(text), cycle_time);
}

// Writes the instance with its original ids; the dummy terminal is left out
// (parsing re-creates it).
inline std::string write_instance(const Instance& inst, Format format = Format::kTdalb) {
  const RawInstance raw = inst.to_raw();
  std::ostringstream os;
  os << "CYCLE " << raw.cycle_time << '\n';
  os << raw.times.size() << '\n';
  for (std::size_t i = 0; i < raw.times.size(); ++i) os << i + 1 << ' ' << raw.times[i] << '\n';
  for (const Arc& a : raw.arcs) os << a.pred << ',' << a.succ << '\n';
  os << "-1,-1\n";
  if (format == Format::kTdalb && !raw.divisions.empty()) {
    os << "DIVISIONS\n";
    for (const DivisionSpec& d : raw.divisions) {
      os << d.task_id << " :";
      for (std::size_t k = 0; k < d.options.size(); ++k)
        os << (k == 0 ? " " : " ; ") << d.options[k].sub_time << '/' << d.options[k].penalty;
      os << '\n';
    }
  }
  return os.str();
}

// Node label in the j^q style, original ids.
inline std::string node_label(const Instance& inst, int task, int q) {
  std::string s = std::to_string(inst.task(task).original_id);
  if (q > 1) s += "^" + std::to_string(q);
  return s;
}

// One line per station, `k: a b^2 ...`, original ids, dummy terminal omitted.
inline std::string write_solution(const Instance& inst, const Solution& sol) {
  std::ostringstream os;
  for (std::size_t k = 0; k < sol.stations.size(); ++k) {
    std::vector<Placement> load;
    for (const Placement& p : sol.stations[k])
      if (!inst.is_dummy(p.task)) load.push_back(p);
    std::sort(load.begin(), load.end(), [&](const Placement& a, const Placement& b) {
      const int oa = inst.task(a.task).original_id;
      const int ob = inst.task(b.task).original_id;
      return oa != ob ? oa < ob : a.q < b.q;
    });
    os << k + 1 << ':';
    for (const Placement& p : load) os << ' ' << node_label(inst, p.task, p.q);
    os << '\n';
  }
  return os.str();
}

// Inverse of write_solution. Station prefixes `k:` are optional (line order
// gives the station order). The dummy terminal is added to the last station
// when absent.
inline std::vector<std::vector<Placement>> parse_solution_loads(const Instance& inst,
                                                                std::string_view text) {
  std::vector<std::vector<Placement>> stations;
  for (const auto& l : detail::significant_lines(text)) {
    std::string_view body = l.text;
    if (auto colon = body.find(':'); colon != std::string_view::npos) body = body.substr(colon + 1);
    std::vector<Placement> load;
    for (auto tok : detail::tokens(body)) {
      int task = 0;
      int q = 1;
      if (auto caret = tok.find('^'); caret != std::string_view::npos) {
        task = detail::parse_int(tok.substr(0, caret), l.number);
        q = detail::parse_int(tok.substr(caret + 1), l.number);
      } else {
        task = detail::parse_int(tok, l.number);
      }
      const int id = inst.id_from_original(task);
      if (id == 0 || inst.is_dummy(id)) throw ParseError(l.number, "unknown task " + std::to_string(task));
      load.push_back(Placement{id, q});
    }
    stations.push_back(std::move(load));
  }
  if (inst.has_dummy_terminal() && !stations.empty()) {
    bool present = false;
    for (const auto& load : stations)
      for (const Placement& p : load) present |= inst.is_dummy(p.task);
    if (!present) stations.back().push_back(Placement{inst.terminal(), 1});
  }
  return stations;
}

inline Solution parse_solution(const Instance& inst, std::string_view text) {
  return make_solution(inst, parse_solution_loads(inst, text));
}

}  // namespace tdalbp
