#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "tdalbp/instance_io.hpp"

using namespace tdalbp;

TEST(InstanceIo, ClassicAlbLayout) {
  const Instance inst = parse_instance("3\n4\n5\n6\n1,2\n1,3\n-1,-1\n", 10);
  EXPECT_EQ(inst.n(), 4);  // dummy joins tasks 2 and 3
  EXPECT_EQ(inst.cycle_time(), 10);
  EXPECT_EQ(inst.time(3), 6);
}

TEST(InstanceIo, CycleHeaderAndOverride) {
  const std::string text = "# comment\nCYCLE 9\n2\n1 4\n2 5\n1,2\n-1,-1\n";
  EXPECT_EQ(parse_instance(text).cycle_time(), 9);
  EXPECT_EQ(parse_instance(text, 12).cycle_time(), 12);
  EXPECT_THROW(parse_instance("2\n1 4\n2 5\n1,2\n"), ParseError);
}

TEST(InstanceIo, TaggedLayout) {
  const std::string text =
      "<number of tasks>\n3\n<cycle time>\n8\n<task times>\n1 3\n2 4\n3 5\n"
      "<precedence relations>\n1,2\n2,3\n<end>\n";
  const Instance inst = parse_instance(text);
  EXPECT_EQ(inst.n(), 3);
  EXPECT_EQ(inst.cycle_time(), 8);
  EXPECT_EQ(inst.time(2), 4);
}

TEST(InstanceIo, DivisionsSection) {
  const Instance inst = fixtures::sample23();
  EXPECT_EQ(inst.option_count(9), 3);
  EXPECT_EQ(inst.option(9, 2), (TaskOption{6, 1}));
  EXPECT_EQ(inst.option(9, 3), (TaskOption{2, 1}));
  EXPECT_EQ(detect_format(fixtures::slurp(fixtures::data_path("sample23.tdalb"))), Format::kTdalb);
  EXPECT_EQ(detect_format(fixtures::slurp(fixtures::data_path("sample23.alb"))), Format::kAlb);
}

TEST(InstanceIo, DivisionsRejectedInAlbMode) {
  const std::string text = "CYCLE 10\n1\n1 5\nDIVISIONS\n1 : 2/1 ; 3/1\n";
  EXPECT_THROW(parse_instance(text, Format::kAlb), ParseError);
  EXPECT_NO_THROW(parse_instance(text, Format::kTdalb));
}

TEST(InstanceIo, ErrorsCarryLineNumbers) {
  try {
    parse_instance("CYCLE 10\n2\n1 4\n2 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  try {
    parse_instance("CYCLE 10\n1\n1 5\nDIVISIONS\n1 : 4/1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(InstanceIo, StructuralErrors) {
  EXPECT_THROW(parse_instance(""), ParseError);
  EXPECT_THROW(parse_instance("CYCLE 10\n2\n1 4\n1 5\n"), ParseError);
  EXPECT_THROW(parse_instance("CYCLE 10\n2\n1 4\n2 5\n1,3\n"), InstanceError);
  EXPECT_THROW(parse_instance("CYCLE 10\n2\n1 4\n2 5\n1,2\n2,1\n"), InstanceError);
  EXPECT_THROW(parse_instance("CYCLE 10\n2\n1 4\n2 5\n-1,-1\n1,2\n"), ParseError);
}

TEST(InstanceIo, RoundTripSample23) {
  const Instance inst = fixtures::sample23();
  const std::string text = write_instance(inst);
  const Instance back = parse_instance(text);
  EXPECT_EQ(back, inst);
  EXPECT_EQ(write_instance(back), text);
}

TEST(InstanceIo, RoundTripRandom) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 100; ++k) {
    const Instance inst = fixtures::random_instance(rng);
    EXPECT_EQ(parse_instance(write_instance(inst)), inst);
  }
}

TEST(InstanceIo, AlbOutputDropsDivisions) {
  const Instance inst = fixtures::sample23();
  const Instance plain = parse_instance(write_instance(inst, Format::kAlb));
  EXPECT_EQ(plain, inst.without_divisions());
}

TEST(SolutionIo, RoundTripReferenceLayouts) {
  const Instance inst = fixtures::sample23();
  for (const char* text : {fixtures::kSample23F8, fixtures::kSample23F4, fixtures::kSample23F2}) {
    const Solution sol = parse_solution(inst, text);
    EXPECT_EQ(write_solution(inst, sol), text);
  }
}

TEST(SolutionIo, DummyAddedAndHidden) {
  const Instance inst = parse_instance("CYCLE 10\n3\n1 4\n2 4\n3 4\n1,2\n1,3\n-1,-1\n");
  ASSERT_TRUE(inst.has_dummy_terminal());
  const Solution sol = parse_solution(inst, "1 2\n3\n");
  EXPECT_TRUE(validate_solution(inst, sol).ok());
  EXPECT_EQ(sol.stations.back().back().task, inst.terminal());
  EXPECT_EQ(write_solution(inst, sol), "1: 1 2\n2: 3\n");
  EXPECT_THROW(parse_solution(inst, "1 2\n3 4\n"), ParseError);
}
