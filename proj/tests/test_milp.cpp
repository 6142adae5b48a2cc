#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "tdalbp/milp.hpp"
#include "tdalbp/oracle.hpp"
#include "tdalbp/solver.hpp"

using namespace tdalbp;

namespace {

std::string values_text(const MilpModel& model, const std::vector<int>& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i)
    out += model.variables[i].name + " " + std::to_string(x[i]) + "\n";
  return out;
}

}  // namespace

TEST(Milp, ObjectiveOverTerminalInterval) {
  const MilpModel model = build_model(expand(fixtures::sample23(), 12));
  ASSERT_EQ(model.objective.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const MilpVariable& v = model.variables[static_cast<std::size_t>(model.objective[k].var)];
    EXPECT_EQ(v.task, 23);
    EXPECT_EQ(v.station, 10 + static_cast<int>(k));
    EXPECT_EQ(model.objective[k].coef, 10 + static_cast<int>(k));
  }
  const std::string lp = write_lp(model);
  EXPECT_NE(lp.find("obj: 10 x_23_1_10 + 11 x_23_1_11 + 12 x_23_1_12\n"), std::string::npos);
}

TEST(Milp, NoDivisionsMeansPlainAssignmentRows) {
  const MilpModel model = build_model(expand(fixtures::sample23_salbp(), 12));
  for (const char* fam : {"C3", "C3b", "C4", "C7", "C8", "C9"}) EXPECT_EQ(model.count(fam), 0u) << fam;
  EXPECT_EQ(model.count("C2"), 23u);
  EXPECT_GT(model.count("C6"), 0u);
  EXPECT_GT(model.count("C5"), 0u);
}

TEST(Milp, DivisibleTaskWorkRow) {
  const Instance inst = fixtures::sample23();
  const MilpModel model = build_model(expand(inst, 12));
  const auto it = std::find_if(model.rows.begin(), model.rows.end(), [](const MilpRow& r) { return r.name == "C3_2"; });
  ASSERT_NE(it, model.rows.end());
  EXPECT_EQ(it->sense, Sense::kEq);
  EXPECT_EQ(it->rhs, 6);
  for (const MilpTerm& t : it->terms) {
    const MilpVariable& v = model.variables[static_cast<std::size_t>(t.var)];
    EXPECT_EQ(v.task, 2);
    EXPECT_EQ(t.coef, inst.option(2, v.q).given);
  }
  std::set<int> coefs;
  for (const MilpTerm& t : it->terms) coefs.insert(static_cast<int>(t.coef));
  EXPECT_EQ(coefs, (std::set<int>{6, 3}));
}

TEST(Milp, DeterministicOutput) {
  const ExpandedGraph g = expand(fixtures::sample23(), 12);
  EXPECT_EQ(write_lp(build_model(g)), write_lp(build_model(g)));
}

TEST(Milp, LinesStayShort) {
  const std::string lp = write_lp(build_model(expand(fixtures::sample23(), 12)));
  std::istringstream in(lp);
  std::string line;
  while (std::getline(in, line)) EXPECT_LE(line.size(), 120u) << line;
}

TEST(Milp, MinimalFile) {
  RawInstance raw;
  raw.cycle_time = 5;
  raw.times = {1};
  MilpModel model;
  model.instance = Instance::create(raw);
  model.m_prime = 1;
  model.variables.push_back(MilpVariable{1, 1, 1, "x_1_1_1"});
  model.index["x_1_1_1"] = 0;
  model.objective.push_back(MilpTerm{0, 1});
  EXPECT_EQ(write_lp(model),
            "Minimize\n obj: x_1_1_1\nSubject To\nBounds\n 0 <= x_1_1_1 <= 1\nBinaries\n x_1_1_1\nEnd\n");
}

TEST(Milp, EmptyIntervalReported) {
  RawInstance raw;
  raw.cycle_time = 10;
  raw.times = {10, 10, 10};
  raw.arcs = {{1, 2}, {2, 3}};
  const ExpandedGraph g = expand(Instance::create(raw), 2);
  EXPECT_THROW(build_model(g), MilpError);
}

TEST(Milp, PublishedF4LayoutRoundTrips) {
  const Instance inst = fixtures::sample23();
  const MilpModel model = build_model(expand(inst, 12));
  const Solution sol = parse_solution(inst, fixtures::kSample23F4);
  const std::vector<int> x = encode(model, sol);
  EXPECT_TRUE(evaluate(model, x).empty());
  EXPECT_EQ(objective_value(model, x), 11);
  const Solution back = parse_lp_solution(model, "objective 11\n" + values_text(model, x));
  EXPECT_EQ(back.station_count(), 11);
  EXPECT_EQ(back.penalty_total, 4);
  EXPECT_EQ(write_solution(inst, back), fixtures::kSample23F4);
}

TEST(Milp, AllReferenceLayoutsSatisfyEveryRow) {
  const Instance inst = fixtures::sample23();
  const MilpModel model = build_model(expand(inst, 11));
  for (const char* text : {fixtures::kSample23F8, fixtures::kSample23F4, fixtures::kSample23F2})
    EXPECT_TRUE(evaluate(model, encode(model, parse_solution(inst, text))).empty()) << text;
}

TEST(Milp, AllZeroAssignmentFails) {
  const MilpModel model = build_model(expand(fixtures::sample23(), 12));
  const std::vector<int> x(model.variables.size(), 0);
  EXPECT_FALSE(evaluate(model, x).empty());
  EXPECT_THROW(decode(model, x), MilpError);
}

TEST(Milp, NonBinaryValueRejected) {
  const MilpModel model = build_model(expand(fixtures::sample23(), 12));
  EXPECT_THROW(parse_lp_values(model, model.variables[0].name + " 0.5\n"), MilpError);
  EXPECT_THROW(parse_lp_values(model, "x_99_1_1 1\n"), MilpError);
  EXPECT_THROW(parse_lp_values(model, "x_1_1_1\n"), MilpError);
  EXPECT_NO_THROW(parse_lp_values(model, "# header\nx_1_1_1 0.9999999\n"));
}

TEST(Milp, ReportedObjectiveMustMatch) {
  const Instance inst = fixtures::sample23();
  const MilpModel model = build_model(expand(inst, 12));
  const std::vector<int> x = encode(model, parse_solution(inst, fixtures::kSample23F4));
  EXPECT_THROW(parse_lp_solution(model, "objective 10\n" + values_text(model, x)), MilpError);
}

TEST(Milp, PlacementOutsideIntervalRejected) {
  const Instance inst = fixtures::sample23();
  const MilpModel model = build_model(expand(inst, 11));
  auto loads = parse_solution(inst, fixtures::kSample23F4).stations;
  loads.insert(loads.begin(), std::vector<Placement>{});
  EXPECT_THROW(encode(model, make_solution(inst, loads)), MilpError);
}

TEST(Milp, SolverOptimaSatisfyRowsOnRandomInstances) {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = fixtures::random_instance(rng);
    const SolveResult r = solve(inst);
    ASSERT_TRUE(r.optimal);
    const MilpModel model = build_model(expand(inst, r.best.station_count()));
    const std::vector<int> x = encode(model, r.best);
    EXPECT_TRUE(evaluate(model, x).empty()) << write_instance(inst);
    EXPECT_EQ(objective_value(model, x), r.best.station_count());
    EXPECT_EQ(decode(model, x).station_count(), r.best.station_count());
  }
}
