#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dialogtest/dialog_context.hpp"
#include "dialogtest/semantic_oracle.hpp"

namespace dialogtest {

struct SayStep {
  std::string text;
};

struct ExpectEquivalentStep {
  std::string expected_text;
  std::optional<double> threshold;
  std::optional<std::string> message;
};

struct ExpectStateStep {
  std::string path;
  StateMatcher matcher;
};

struct ExpectNoBreakdownStep {};

using TestStep = std::variant<SayStep, ExpectEquivalentStep, ExpectStateStep, ExpectNoBreakdownStep>;

std::string_view step_kind(const TestStep& step) noexcept;

struct TestCase {
  std::string name;
  std::vector<TestStep> steps;
  ContextOverrides context;
  std::size_t line = 0;  // where `case` appeared; 0 for programmatic cases
};

struct TestSuite {
  ContextOverrides context;  // `context.*` lines before the first case
  std::vector<TestCase> cases;
};

// Line-oriented suite format:
//
//   # comment
//   context.threshold = 0.6          (suite-wide, before any case)
//
//   case greet
//     context.model = glove
//     say: hello there
//     expect_equivalent: hi [threshold=0.7] [message=greeting failed]
//     expect_state: alarm.set == true
//     expect_state: alarm.time exists
//     expect_no_breakdown
//
// Throws ParseError(line), ValidationError, DuplicateCaseName.
TestSuite parse_suite(std::string_view text);
TestSuite load_suite(const std::filesystem::path& path);

// Checks the ordering and naming rules; parse_suite already calls this.
void validate_suite(const TestSuite& suite);

// Renders a suite in the format parse_suite reads.
std::string write_suite(const TestSuite& suite);

}  // namespace dialogtest
