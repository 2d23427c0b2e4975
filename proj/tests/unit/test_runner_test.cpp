#include "dialogtest/test_runner.hpp"

#include <gtest/gtest.h>

#include <regex>

#include "dialogtest/error.hpp"
#include "test_support.hpp"

namespace dt = dialogtest;

namespace {

struct Env {
  std::shared_ptr<dt::ModelRegistry> registry = std::make_shared<dt::ModelRegistry>();
  dt::SemanticOracle oracle{registry};
  dt::DialogContext base = dt::builder().with_model("fixture").build();

  Env() { registry->add(dt::testing::greeting_model()); }
};

dt::AgentSpec echo() {
  return dt::AgentSpec::in_process([](std::string_view t) { return std::string(t); });
}

std::string strip_duration(const std::string& report) {
  return std::regex_replace(report, std::regex(R"(\d+\.\d+s)"), "<t>");
}

const char* kThreeCases = R"(case pass
  say: hi
  expect_equivalent: hi

case fail
  say: a
  expect_equivalent: b

case error
  say: zzz qqq
  expect_equivalent: hi
)";

}  // namespace

TEST(RunSuite, PassFailErrorExamples) {
  Env env;
  const auto report = dt::run_suite(dt::parse_suite(kThreeCases), env.base, echo(), env.oracle);
  ASSERT_EQ(report.cases.size(), 3u);
  EXPECT_EQ(report.cases[0].outcome, dt::Outcome::Pass);
  EXPECT_EQ(report.cases[1].outcome, dt::Outcome::Fail);
  EXPECT_NEAR(report.cases[1].steps.at(1).verdict->score, 0.0, 1e-12);
  EXPECT_EQ(report.cases[2].outcome, dt::Outcome::Error);
  EXPECT_NE(report.cases[2].error.find("AllTokensOutOfVocabulary"), std::string::npos) << report.cases[2].error;
  EXPECT_EQ(report.totals, (dt::Totals{1, 1, 1}));
  EXPECT_EQ(report.exit_code(), 2);
}

TEST(RunSuite, ExitCodeLaw) {
  Env env;
  auto run = [&](const std::string& text) {
    return dt::run_suite(dt::parse_suite(text), env.base, echo(), env.oracle).exit_code();
  };
  EXPECT_EQ(run("case p\n  say: hi\n  expect_equivalent: hello\n"), 0);
  EXPECT_EQ(run("case p\n  say: hi\n  expect_equivalent: hello\ncase f\n  say: a\n  expect_equivalent: b\n"), 1);
  EXPECT_EQ(run("case f\n  say: a\n  expect_equivalent: b\ncase e\n  say: zzz\n  expect_equivalent: b\n"), 2);
  EXPECT_EQ(run(""), 0);
}

TEST(RunCase, ContinuesPastFailStopsAtError) {
  Env env;
  const auto suite = dt::parse_suite(R"(case mixed
  say: a
  expect_equivalent: b
  expect_equivalent: a
  say: qqq
  expect_equivalent: a
  expect_equivalent: a
)");
  const auto r = dt::run_case(suite.cases[0], env.base, echo(), env.oracle);
  EXPECT_EQ(r.outcome, dt::Outcome::Error);
  ASSERT_EQ(r.steps.size(), 4u);
  EXPECT_FALSE(r.steps[1].verdict->passed);
  EXPECT_TRUE(r.steps[2].verdict->passed);
  EXPECT_FALSE(r.steps[3].verdict.has_value());
  EXPECT_NE(r.error.find("step 5"), std::string::npos) << r.error;
}

TEST(RunCase, StepThresholdOverride) {
  Env env;
  const auto suite = dt::parse_suite("case t\n  say: hi\n  expect_equivalent: hello threshold=0.9\n");
  const auto r = dt::run_case(suite.cases[0], env.base, echo(), env.oracle);
  EXPECT_EQ(r.outcome, dt::Outcome::Fail);
  EXPECT_EQ(r.steps[1].verdict->threshold, 0.9);
  EXPECT_NEAR(r.steps[1].verdict->score, 0.8, 1e-12);
}

TEST(RunCase, StateAndBreakdownSteps) {
  Env env;
  auto agent = dt::AgentSpec::in_process([](std::string_view t) { return std::string(t); },
                                         [] { return dt::parse_state("alarm.set=true"); });
  const auto suite = dt::parse_suite(R"(case s
  say: hi
  expect_state: alarm.set == true
  expect_state: alarm.time exists
  expect_no_breakdown
)");
  const auto r = dt::run_case(suite.cases[0], env.base, agent, env.oracle);
  EXPECT_EQ(r.outcome, dt::Outcome::Fail);
  EXPECT_TRUE(r.steps[1].verdict->passed);
  EXPECT_FALSE(r.steps[2].verdict->passed);
  EXPECT_TRUE(r.steps[3].verdict->passed);
}

TEST(RunCase, StateUnsupportedIsError) {
  Env env;
  const auto suite = dt::parse_suite("case s\n  say: hi\n  expect_state: a exists\n");
  const auto r = dt::run_case(suite.cases[0], env.base, echo(), env.oracle);
  EXPECT_EQ(r.outcome, dt::Outcome::Error);
  EXPECT_NE(r.error.find("StateUnsupported"), std::string::npos);
}

TEST(RunCase, WakePhrasePrefixedOnce) {
  Env env;
  std::vector<std::string> heard;
  std::mutex m;
  auto agent = dt::AgentSpec::in_process([&](std::string_view t) {
    std::lock_guard lock(m);
    heard.emplace_back(t);
    return std::string("hi");
  });
  const auto ctx = dt::ContextBuilder(env.base).with_wake_phrase("OK Google").build();
  const auto suite = dt::parse_suite("case w\n  say: hello\n  say: ok google, hello\n");
  dt::run_case(suite.cases[0], ctx, agent, env.oracle);
  EXPECT_EQ(heard, (std::vector<std::string>{"OK Google hello", "ok google, hello"}));
}

TEST(ResolveContext, Precedence) {
  const auto base = dt::builder().with_model("m").with_threshold(0.1).build();
  dt::TestSuite suite;
  suite.context.equivalence_threshold = 0.2;
  suite.context.relevance_threshold = 0.2;
  suite.context.words_per_second = 2;
  dt::TestCase c;
  c.context.equivalence_threshold = 0.3;
  c.context.relevance_threshold = 0.3;
  dt::ContextOverrides pinned;
  pinned.equivalence_threshold = 0.4;
  const auto ctx = dt::resolve_case_context(base, suite, c, pinned);
  EXPECT_EQ(ctx.equivalence_threshold(), 0.4);
  EXPECT_EQ(ctx.relevance_threshold(), 0.3);
  EXPECT_EQ(ctx.words_per_second(), 2.0);
  EXPECT_EQ(ctx.model_id(), "m");
}

TEST(RunSuite, UnknownCaseModelIsCaseError) {
  Env env;
  const auto report = dt::run_suite(
      dt::parse_suite("case m\n  context.model = missing\n  say: hi\n  expect_equivalent: hi\ncase ok\n  say: hi\n  "
                      "expect_equivalent: hi\n"),
      env.base, echo(), env.oracle);
  EXPECT_EQ(report.cases[0].outcome, dt::Outcome::Error);
  EXPECT_NE(report.cases[0].error.find("UnknownModel"), std::string::npos);
  EXPECT_EQ(report.cases[1].outcome, dt::Outcome::Pass);
}

TEST(RunSuite, MaxTurnsFromContext) {
  Env env;
  const auto report = dt::run_suite(
      dt::parse_suite("case m\n  context.max_turns = 1\n  say: hi\n  say: hi\n"), env.base, echo(), env.oracle);
  EXPECT_EQ(report.cases[0].outcome, dt::Outcome::Error);
  EXPECT_NE(report.cases[0].error.find("MaxTurnsExceeded"), std::string::npos);
}

TEST(RenderReport, TapExamples) {
  Env env;
  const auto two = dt::run_suite(dt::parse_suite("case one\n  say: hi\ncase two\n  say: hi\n"), env.base, echo(),
                                 env.oracle);
  const std::string tap = dt::render_report(two, dt::ReportFormat::Tap);
  EXPECT_EQ(tap.rfind("TAP version 13\n", 0), 0u);
  EXPECT_NE(tap.find("1..2\nok 1 - one\nok 2 - two\n"), std::string::npos) << tap;

  const auto fail = dt::run_suite(dt::parse_suite("case f\n  say: a\n  expect_equivalent: b\n"), env.base, echo(),
                                  env.oracle);
  const std::string fail_tap = dt::render_report(fail, dt::ReportFormat::Tap);
  EXPECT_NE(fail_tap.find("not ok 1 - f\n"), std::string::npos);
  EXPECT_NE(fail_tap.find("# score=0.0000 threshold=0.5000\n"), std::string::npos) << fail_tap;

  const auto empty = dt::run_suite(dt::parse_suite(""), env.base, echo(), env.oracle);
  EXPECT_NE(dt::render_report(empty, dt::ReportFormat::Tap).find("\n1..0\n"), std::string::npos);
}

TEST(RenderReport, ErrorAndHuman) {
  Env env;
  const auto report = dt::run_suite(dt::parse_suite(kThreeCases), env.base, echo(), env.oracle);
  const std::string tap = dt::render_report(report, dt::ReportFormat::Tap);
  EXPECT_NE(tap.find("not ok 3 - error\n# ERROR "), std::string::npos) << tap;
  EXPECT_NE(tap.find("# pass 1 fail 1 error 1\n"), std::string::npos);

  const std::string human = dt::render_report(report, dt::ReportFormat::Human);
  EXPECT_NE(human.find("PASS  pass\n"), std::string::npos) << human;
  EXPECT_NE(human.find("FAIL  fail\n"), std::string::npos);
  EXPECT_NE(human.find("ERROR error\n"), std::string::npos);
  EXPECT_NE(human.find("3 cases: 1 passed, 1 failed, 1 errored in "), std::string::npos);
  EXPECT_THROW(dt::parse_report_format("junit"), std::invalid_argument);
}

TEST(RunnerProperty, DeterministicReportsAcrossRunsAndJobs) {
  Env env;
  const auto suite = dt::parse_suite(kThreeCases);
  const std::string first = strip_duration(dt::render_report(dt::run_suite(suite, env.base, echo(), env.oracle),
                                                             dt::ReportFormat::Tap));
  for (std::size_t jobs : {1u, 2u, 3u, 8u}) {
    dt::RunOptions options;
    options.jobs = jobs;
    const auto report = dt::run_suite(suite, env.base, echo(), env.oracle, options);
    EXPECT_EQ(strip_duration(dt::render_report(report, dt::ReportFormat::Tap)), first) << jobs;
  }
}

TEST(RunnerProperty, CaseOrderDoesNotChangeOutcomes) {
  Env env;
  const auto suite = dt::parse_suite(std::string(kThreeCases) +
                                     "\ncase p2\n  say: hello\n  expect_equivalent: hi\ncase f2\n  say: b\n  "
                                     "expect_equivalent: a threshold=0.1\n");
  const auto baseline = dt::run_suite(suite, env.base, echo(), env.oracle);
  std::map<std::string, dt::Outcome> expected;
  for (const auto& c : baseline.cases) expected[c.name] = c.outcome;

  dt::testing::Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    dt::TestSuite shuffled = suite;
    rng.shuffle(shuffled.cases);
    dt::RunOptions options;
    options.jobs = rng.between(1, 4);
    const auto report = dt::run_suite(shuffled, env.base, echo(), env.oracle, options);
    for (std::size_t k = 0; k < shuffled.cases.size(); ++k) {
      EXPECT_EQ(report.cases[k].name, shuffled.cases[k].name);
      EXPECT_EQ(report.cases[k].outcome, expected.at(report.cases[k].name));
    }
  }
}

TEST(RunnerProperty, TotalsMatchOutcomes) {
  Env env;
  dt::testing::Rng rng(17);
  const std::vector<std::string> says = {"hi", "hello", "a", "b", "zzz"};
  for (int i = 0; i < 30; ++i) {
    std::string text;
    for (std::size_t k = rng.between(0, 6); k > 0; --k) {
      text += "case c" + std::to_string(k) + "\n  say: " + says[rng.index(says.size())] +
              "\n  expect_equivalent: " + says[rng.index(4)] + "\n";
    }
    const auto report = dt::run_suite(dt::parse_suite(text), env.base, echo(), env.oracle);
    dt::Totals t;
    for (const auto& c : report.cases) {
      bool failed_verdict = false;
      for (const auto& s : c.steps) failed_verdict |= s.verdict && !s.verdict->passed;
      if (c.outcome == dt::Outcome::Fail) EXPECT_TRUE(failed_verdict);
      if (c.outcome == dt::Outcome::Pass) EXPECT_FALSE(failed_verdict);
      t.passed += c.outcome == dt::Outcome::Pass;
      t.failed += c.outcome == dt::Outcome::Fail;
      t.errored += c.outcome == dt::Outcome::Error;
    }
    EXPECT_EQ(report.totals, t);
  }
}

TEST(RunSuite, SubprocessAgentFreshSessionPerCase) {
  Env env;
  auto spec = dt::AgentSpec::subprocess(std::string(dt::testing::stub_agent()) + " clock", true);
  const auto suite = dt::parse_suite(R"(case sets
  say: set an alarm
  expect_state: alarm.set == true
  expect_state: alarm.time == 06:00

case fresh
  say: what time is it
  expect_state: alarm.set == false
)");
  dt::RunOptions options;
  options.jobs = 2;
  const auto report = dt::run_suite(suite, env.base, spec, env.oracle, options);
  EXPECT_EQ(report.cases[0].outcome, dt::Outcome::Pass) << report.cases[0].error;
  EXPECT_EQ(report.cases[1].outcome, dt::Outcome::Pass) << report.cases[1].error;
}
