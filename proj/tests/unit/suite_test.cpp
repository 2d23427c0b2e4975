#include "dialogtest/suite.hpp"

#include <gtest/gtest.h>

#include "dialogtest/error.hpp"
#include "test_support.hpp"

namespace dt = dialogtest;

namespace {

struct Caught {
  dt::ErrorCode code;
  std::optional<std::size_t> line;
};

Caught parse_error(const std::string& text) {
  try {
    dt::parse_suite(text);
  } catch (const dt::Error& e) {
    return {e.code(), e.position()};
  }
  ADD_FAILURE() << "parsed without error:\n" << text;
  return {dt::ErrorCode::InvalidVector, std::nullopt};
}

// The two greeting and alarm tests, written as suite data.
const char* kListingSuite = R"(# greeting and alarm checks
case test_simple
  context.model = word2vec
  say: Hello
  expect_equivalent: Hi, how can I help you? message=Basic greeting test failure

case test_complex
  context.model = glove
  say: alarm for six a.m.
  expect_equivalent: You're alarm set of six a.m.
)";

}  // namespace

TEST(ParseSuite, ListingCases) {
  const auto suite = dt::parse_suite(kListingSuite);
  ASSERT_EQ(suite.cases.size(), 2u);
  const auto& simple = suite.cases[0];
  EXPECT_EQ(simple.name, "test_simple");
  EXPECT_EQ(simple.line, 2u);
  EXPECT_EQ(simple.context.model_id, "word2vec");
  ASSERT_EQ(simple.steps.size(), 2u);
  EXPECT_EQ(std::get<dt::SayStep>(simple.steps[0]).text, "Hello");
  const auto& eq = std::get<dt::ExpectEquivalentStep>(simple.steps[1]);
  EXPECT_EQ(eq.expected_text, "Hi, how can I help you?");
  EXPECT_EQ(eq.message, "Basic greeting test failure");
  EXPECT_FALSE(eq.threshold.has_value());

  const auto& complex = suite.cases[1];
  EXPECT_EQ(complex.context.model_id, "glove");
  EXPECT_EQ(std::get<dt::ExpectEquivalentStep>(complex.steps[1]).expected_text, "You're alarm set of six a.m.");
}

TEST(ParseSuite, AllStepKindsAndContextFields) {
  const auto suite = dt::parse_suite(R"(
context.threshold = 0.6
context.relevance_threshold = 0.2
context.wake_phrase = OK Google
context.dataset.glove = /data/glove.txt

case everything
  context.strategy = jaccard-tokens
  context.words_per_second = 3
  context.allow_confirmations = false
  context.max_turns = 5
  say: set an alarm
  expect_equivalent: alarm set threshold=0.75 message=alarm reply
  expect_state: alarm.set == true
  expect_state: alarm.time == 06:00
  expect_state: alarm exists
  expect_no_breakdown
)");
  EXPECT_EQ(suite.context.equivalence_threshold, 0.6);
  EXPECT_EQ(suite.context.relevance_threshold, 0.2);
  EXPECT_EQ(suite.context.wake_phrase, "OK Google");
  EXPECT_EQ(suite.context.dataset_paths.at("glove"), "/data/glove.txt");
  const auto& c = suite.cases.at(0);
  EXPECT_EQ(c.context.strategy_id, "jaccard-tokens");
  EXPECT_EQ(c.context.words_per_second, 3.0);
  EXPECT_EQ(c.context.allow_confirmations, false);
  EXPECT_EQ(c.context.max_turns, 5);
  ASSERT_EQ(c.steps.size(), 6u);
  const auto& eq = std::get<dt::ExpectEquivalentStep>(c.steps[1]);
  EXPECT_EQ(eq.expected_text, "alarm set");
  EXPECT_EQ(eq.threshold, 0.75);
  EXPECT_EQ(eq.message, "alarm reply");
  const auto& st = std::get<dt::ExpectStateStep>(c.steps[2]);
  EXPECT_EQ(st.path, "alarm.set");
  EXPECT_EQ(st.matcher.kind, dt::StateMatcher::Kind::Equals);
  EXPECT_EQ(st.matcher.value, dt::Scalar(true));
  EXPECT_EQ(std::get<dt::ExpectStateStep>(c.steps[3]).matcher.value, dt::Scalar(std::string("06:00")));
  EXPECT_EQ(std::get<dt::ExpectStateStep>(c.steps[4]).matcher.kind, dt::StateMatcher::Kind::Exists);
  EXPECT_TRUE(std::holds_alternative<dt::ExpectNoBreakdownStep>(c.steps[5]));
  EXPECT_EQ(dt::step_kind(c.steps[5]), "expect_no_breakdown");
}

TEST(ParseSuite, EmptyIsValid) {
  EXPECT_TRUE(dt::parse_suite("").cases.empty());
  EXPECT_TRUE(dt::parse_suite("# nothing here\n\n").cases.empty());
}

TEST(ParseSuite, OrderingAndDuplicates) {
  EXPECT_EQ(parse_error("case a\n  expect_equivalent: hi\n  say: hello\n").code, dt::ErrorCode::ValidationError);
  EXPECT_EQ(parse_error("case a\n  expect_no_breakdown\n").code, dt::ErrorCode::ValidationError);
  EXPECT_EQ(parse_error("case greet\n  say: hi\ncase greet\n  say: hi\n").code, dt::ErrorCode::DuplicateCaseName);
  EXPECT_EQ(parse_error("case empty\ncase b\n  say: x\n").code, dt::ErrorCode::ValidationError);
}

TEST(ParseSuite, SyntaxErrorsCarryLine) {
  const struct {
    const char* text;
    std::size_t line;
  } cases[] = {
      {"say: orphan\n", 1},
      {"case a\n  say: x\n  shout: y\n", 3},
      {"case a\n  say:\n", 2},
      {"case\n", 1},
      {"case a\n  say: x\n  expect_equivalent: hi threshold=abc\n", 3},
      {"case a\n  say: x\n  expect_state: alarm..set exists\n", 3},
      {"case a\n  say: x\n  expect_state: alarm.set\n", 3},
      {"\n\ncontext.colour = red\n", 3},
      {"case a\n  context.max_turns = 2.5\n  say: x\n", 2},
      {"case a\n  context.allow_confirmations = maybe\n  say: x\n", 2},
  };
  for (const auto& c : cases) {
    const auto err = parse_error(c.text);
    EXPECT_EQ(err.code, dt::ErrorCode::ParseError) << c.text;
    EXPECT_EQ(err.line, c.line) << c.text;
  }
}

TEST(ParseSuite, OutOfRangeValuesAreValidationErrors) {
  EXPECT_EQ(parse_error("context.threshold = 2\ncase a\n  say: x\n").code, dt::ErrorCode::ValidationError);
  EXPECT_EQ(parse_error("case a\n  context.max_turns = 0\n  say: x\n").code, dt::ErrorCode::ValidationError);
  EXPECT_EQ(parse_error("case a\n  say: x\n  expect_equivalent: y threshold=1.2\n").code,
            dt::ErrorCode::ValidationError);
}

TEST(ParseSuite, ThresholdWordInsideExpectedText) {
  const auto suite = dt::parse_suite("case a\n  say: x\n  expect_equivalent: the threshold=high setting\n");
  const auto& eq = std::get<dt::ExpectEquivalentStep>(suite.cases[0].steps[1]);
  EXPECT_EQ(eq.expected_text, "the threshold=high setting");
  EXPECT_FALSE(eq.threshold.has_value());
}

TEST(LoadSuite, FromFile) {
  dt::testing::TempDir dir;
  EXPECT_EQ(dt::load_suite(dir.write("s.dtest", kListingSuite)).cases.size(), 2u);
  EXPECT_THROW(dt::load_suite(dir.path() / "missing.dtest"), dt::Error);
}

TEST(WriteSuite, RoundTrip) {
  const auto suite = dt::parse_suite(std::string("context.threshold = 0.55\ncontext.dataset.g = /x/g.txt\n\n") +
                                     kListingSuite +
                                     "\ncase more\n  say: hi\n  expect_state: a.b == 3\n  expect_state: a exists\n"
                                     "  expect_equivalent: yo threshold=0.25\n  expect_no_breakdown\n");
  const std::string text = dt::write_suite(suite);
  const auto again = dt::parse_suite(text);
  EXPECT_EQ(dt::write_suite(again), text);
  ASSERT_EQ(again.cases.size(), suite.cases.size());
  EXPECT_EQ(again.context, suite.context);
  for (std::size_t i = 0; i < suite.cases.size(); ++i) {
    EXPECT_EQ(again.cases[i].name, suite.cases[i].name);
    EXPECT_EQ(again.cases[i].context, suite.cases[i].context);
    EXPECT_EQ(again.cases[i].steps.size(), suite.cases[i].steps.size());
  }
}
