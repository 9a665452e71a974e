#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "support.hpp"

namespace rcm {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kTwoActivities =
    "2 1 0 0\n"
    "0 1 1 1 [0]\n"
    "1 1 2 2 3 [3] [4]\n"
    "2 1 1 1 [-3]\n"
    "3 1 0\n"
    "0 1 0 0\n"
    "1 1 3 2\n"
    "2 1 4 1\n"
    "3 1 0 0\n"
    "2\n";

fs::path temp_file(const std::string& name, std::string_view body) {
  const auto p = fs::temp_directory_path() / ("rcm_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + name);
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

template <typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(Psplib, TwoRealActivities) {
  const auto inst = parse_psplib(kTwoActivities);
  EXPECT_EQ(inst.n, 4u);
  EXPECT_EQ(inst.durations, (std::vector<Value>{0, 3, 4, 0}));
  EXPECT_EQ(inst.demands, (std::vector<std::vector<Value>>{{0}, {2}, {1}, {0}}));
  EXPECT_EQ(inst.capacities, (std::vector<Value>{2}));
  ASSERT_EQ(inst.precedences.size(), 4u);
  EXPECT_EQ(inst.precedences[1], (Precedence{1, 2, 3}));
  EXPECT_EQ(inst.precedences[2], (Precedence{1, 3, 4}));
  EXPECT_EQ(inst.precedences[3], (Precedence{2, 1, -3}));
  EXPECT_FALSE(inst.horizon.has_value());
  EXPECT_TRUE(validate(inst).empty());
}

TEST(Psplib, SolvesParsedInstance) {
  // 1 then 2 exactly three apart; capacity 2 forbids overlap (2+1 > 2), so
  // 2 starts at 3 and the makespan is 7.
  const auto out = solve(parse_psplib(kTwoActivities));
  ASSERT_EQ(out.status, Status::Optimal);
  EXPECT_EQ(out.schedule->makespan, 7);
}

TEST(Psplib, TruncatedCapacitySection) {
  std::string text(kTwoActivities);
  text.resize(text.rfind("2\n"));
  const auto msg = error_of([&] { parse_psplib(text); });
  EXPECT_NE(msg.find("truncated capacity section"), std::string::npos) << msg;
  EXPECT_EQ(msg.rfind("line ", 0), 0u) << msg;
}

TEST(Psplib, WeightCountMismatch) {
  std::string text(kTwoActivities);
  text.replace(text.find("[3] [4]"), 7, "[3]");
  const auto msg = error_of([&] { parse_psplib(text); });
  EXPECT_NE(msg.find("line 3: weight-count mismatch"), std::string::npos) << msg;
}

TEST(Psplib, NonIntegerToken) {
  std::string text(kTwoActivities);
  text.replace(text.find("1 1 3 2"), 7, "1 1 x 2");
  const auto msg = error_of([&] { parse_psplib(text); });
  EXPECT_NE(msg.find("line 7: non-integer token 'x'"), std::string::npos) << msg;
}

TEST(Psplib, OverflowIsReported) {
  std::string text(kTwoActivities);
  text.replace(text.find("1 1 3 2"), 7, "1 1 99999999999999999999 2");
  const auto msg = error_of([&] { parse_psplib(text); });
  EXPECT_NE(msg.find("out of 64-bit range"), std::string::npos) << msg;
}

TEST(Psplib, MultiWeightBracketRejected) {
  std::string text(kTwoActivities);
  text.replace(text.find("[-3]"), 4, "[-3 2]");
  const auto msg = error_of([&] { parse_psplib(text); });
  EXPECT_NE(msg.find("exactly one value"), std::string::npos) << msg;
}

TEST(Psplib, NonRenewableHeaderRejected) {
  std::string text(kTwoActivities);
  text.replace(0, 7, "2 1 1 0");
  EXPECT_NE(error_of([&] { parse_psplib(text); }).find("line 1: unsupported"), std::string::npos);
}

TEST(Psplib, UnterminatedBracket) {
  std::string text(kTwoActivities);
  text.replace(text.find("[-3]"), 4, "[-3");
  EXPECT_NE(error_of([&] { parse_psplib(text); }).find("unterminated"), std::string::npos);
}

TEST(Psplib, BlankLinesIgnored) {
  std::string text(kTwoActivities);
  text.insert(text.find("0 1 0 0"), "\n   \n");
  EXPECT_EQ(parse_psplib(text).n, 4u);
}

TEST(Native, Ex1FileMatchesFixture) {
  const auto inst = load_instance(fs::path(RCM_TEST_DATA_DIR) / "ex1.rcm.json");
  const auto want = testing::ex1();
  EXPECT_EQ(inst.n, want.n);
  EXPECT_EQ(inst.durations, want.durations);
  EXPECT_EQ(inst.demands, want.demands);
  EXPECT_EQ(inst.capacities, want.capacities);
  EXPECT_EQ(inst.precedences, want.precedences);
  EXPECT_EQ(inst.horizon, want.horizon);
}

TEST(Native, RoundTripEx1) {
  const auto a = testing::ex1();
  const auto b = parse_native(write_native(a));
  EXPECT_EQ(write_native(b), write_native(a));
  EXPECT_EQ(b.precedences, a.precedences);
}

TEST(Native, RoundTripRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto a = testing::random_instance(seed);
    if (seed % 3 == 0) a.horizon.reset();
    const auto b = parse_native(write_native(a));
    EXPECT_EQ(b.n, a.n);
    EXPECT_EQ(b.durations, a.durations);
    EXPECT_EQ(b.demands, a.demands);
    EXPECT_EQ(b.capacities, a.capacities);
    EXPECT_EQ(b.precedences, a.precedences);
    EXPECT_EQ(b.horizon, a.horizon);
  }
}

TEST(Native, PsplibToNativePreservesInstance) {
  const auto a = parse_psplib(kTwoActivities);
  const auto b = parse_native(write_native(a));
  EXPECT_EQ(b.precedences, a.precedences);
  EXPECT_EQ(b.durations, a.durations);
}

TEST(Native, FieldErrors) {
  EXPECT_NE(error_of([] { parse_native(R"({"n":1,"durations":[1],"demands":[[1]],"precedences":[]})"); })
                .find("capacities: missing field"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              parse_native(R"({"n":3,"durations":[1,1,1],"capacities":[2],"demands":[[1],[1],["a"]],"precedences":[]})");
            }).find("demands[2][0]: expected integer"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_native("{"); }).find("malformed JSON"), std::string::npos);
  EXPECT_NE(error_of([] {
              parse_native(R"({"n":1,"durations":[1],"capacities":[],"demands":[[]],"precedences":[[0,0]]})");
            }).find("precedences[0]: expected [i, j, d]"),
            std::string::npos);
}

TEST(LoadInstance, ValidationRejectsOutOfRangePrecedence) {
  const auto p = temp_file(
      "bad.rcm.json", R"({"n":2,"durations":[1,1],"capacities":[1],"demands":[[1],[1]],"precedences":[[0,9,1]]})");
  const auto msg = error_of([&] { load_instance(p); });
  fs::remove(p);
  EXPECT_NE(msg.find("invalid instance"), std::string::npos) << msg;
}

TEST(LoadInstance, DetectsFormatByExtension) {
  EXPECT_EQ(detect_format("a/b/x.rcm.json"), InstanceFormat::Native);
  EXPECT_EQ(detect_format("PSP1.SCH"), InstanceFormat::Psplib);
  const auto p = temp_file("two.sch", kTwoActivities);
  EXPECT_EQ(load_instance(p).n, 4u);
  EXPECT_THROW(load_instance(p, InstanceFormat::Native), ParseError);
  fs::remove(p);
  EXPECT_THROW(load_instance("/nonexistent/file.sch"), ParseError);
}

TEST(LoadInstance, Stems) {
  EXPECT_EQ(instance_stem("dir/PSP12.SCH"), "PSP12");
  EXPECT_EQ(instance_stem("ex1.rcm.json"), "ex1");
  EXPECT_EQ(instance_stem("a.json"), "a");
  EXPECT_EQ(instance_stem("plain"), "plain");
}

}  // namespace
}  // namespace rcm
