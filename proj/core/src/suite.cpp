#include "dialogtest/suite.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dialogtest/error.hpp"

namespace dialogtest {

std::string_view step_kind(const TestStep& step) noexcept {
  switch (step.index()) {
    case 0: return "say";
    case 1: return "expect_equivalent";
    case 2: return "expect_state";
    default: return "expect_no_breakdown";
  }
}

namespace {

constexpr std::string_view kSpaces = " \t\r\f\v";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kSpaces);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpaces);
  return s.substr(b, e - b + 1);
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& detail) {
  throw Error(ErrorCode::ParseError, detail, line);
}

double parse_number(std::string_view text, std::size_t line, std::string_view what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    parse_error(line, std::string(what) + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

long long parse_integer(std::string_view text, std::size_t line, std::string_view what) {
  long long value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    parse_error(line, std::string(what) + ": '" + std::string(text) + "' is not an integer");
  }
  return value;
}

bool parse_bool(std::string_view text, std::size_t line, std::string_view what) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  parse_error(line, std::string(what) + ": '" + std::string(text) + "' is not a boolean");
}

void parse_context_line(std::string_view body, std::size_t line, ContextOverrides& out) {
  const auto eq = body.find('=');
  if (eq == std::string_view::npos) parse_error(line, "context line needs '='");
  const std::string_view field = trim(body.substr(0, eq));
  const std::string_view value = trim(body.substr(eq + 1));
  if (field == "model") {
    if (value.empty()) parse_error(line, "empty model id");
    out.model_id = std::string(value);
  } else if (field == "strategy") {
    if (value.empty()) parse_error(line, "empty strategy id");
    out.strategy_id = std::string(value);
  } else if (field == "threshold" || field == "equivalence_threshold") {
    out.equivalence_threshold = parse_number(value, line, field);
  } else if (field == "relevance_threshold") {
    out.relevance_threshold = parse_number(value, line, field);
  } else if (field == "words_per_second") {
    out.words_per_second = parse_number(value, line, field);
  } else if (field == "allow_confirmations" || field == "confirmations") {
    out.allow_confirmations = parse_bool(value, line, field);
  } else if (field == "wake_phrase") {
    out.wake_phrase = std::string(value);
  } else if (field == "max_turns") {
    out.max_turns = parse_integer(value, line, field);
  } else if (starts_with(field, "dataset.") && field.size() > 8) {
    out.dataset_paths[std::string(field.substr(8))] = std::string(value);
  } else {
    parse_error(line, "unknown context field '" + std::string(field) + "'");
  }
}

ExpectEquivalentStep parse_expect_equivalent(std::string_view body, std::size_t line) {
  ExpectEquivalentStep step;
  if (auto m = body.find(" message="); m != std::string_view::npos) {
    step.message = std::string(trim(body.substr(m + 9)));
    body = body.substr(0, m);
  }
  body = trim(body);
  if (auto t = body.rfind(" threshold="); t != std::string_view::npos) {
    const std::string_view value = body.substr(t + 11);
    if (value.find_first_of(kSpaces) == std::string_view::npos) {
      step.threshold = parse_number(value, line, "threshold");
      body = trim(body.substr(0, t));
    }
  }
  if (body.empty()) parse_error(line, "expect_equivalent needs expected text");
  step.expected_text = std::string(body);
  return step;
}

ExpectStateStep parse_expect_state(std::string_view body, std::size_t line) {
  ExpectStateStep step;
  std::string_view path;
  if (auto eq = body.find("=="); eq != std::string_view::npos) {
    path = trim(body.substr(0, eq));
    step.matcher = StateMatcher::equals(parse_scalar(trim(body.substr(eq + 2))));
  } else {
    const auto space = body.find_last_of(kSpaces);
    if (space == std::string_view::npos || trim(body.substr(space)) != "exists") {
      parse_error(line, "expect_state needs '<path> == <value>' or '<path> exists'");
    }
    path = trim(body.substr(0, space));
    step.matcher = StateMatcher::exists();
  }
  try {
    split_path(path);
  } catch (const Error& e) {
    parse_error(line, e.what());
  }
  step.path = std::string(path);
  return step;
}

void check_overrides(const ContextOverrides& overrides, const std::string& where) {
  ContextBuilder b;
  b.with_model("validation");
  overrides.apply_to(b);
  try {
    b.build();
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, where + ": " + e.what());
  }
}

}  // namespace

void validate_suite(const TestSuite& suite) {
  check_overrides(suite.context, "suite context");
  std::set<std::string, std::less<>> names;
  for (const auto& c : suite.cases) {
    if (c.name.empty()) throw Error(ErrorCode::ValidationError, "case with empty name");
    if (!names.insert(c.name).second) throw Error(ErrorCode::DuplicateCaseName, c.name);
    if (c.steps.empty()) throw Error(ErrorCode::ValidationError, c.name + ": case has no steps");
    check_overrides(c.context, c.name);
    bool said = false;
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
      const auto& step = c.steps[i];
      if (std::holds_alternative<SayStep>(step)) {
        said = true;
      } else if (!said) {
        throw Error(ErrorCode::ValidationError,
                    c.name + ": step " + std::to_string(i + 1) + " (" +
                        std::string(step_kind(step)) + ") precedes any say step");
      }
      if (const auto* eq = std::get_if<ExpectEquivalentStep>(&step);
          eq && eq->threshold && !(*eq->threshold >= -1.0 && *eq->threshold <= 1.0)) {
        throw Error(ErrorCode::ValidationError,
                    c.name + ": step " + std::to_string(i + 1) + " threshold outside [-1, 1]");
      }
    }
  }
}

TestSuite parse_suite(std::string_view text) {
  TestSuite suite;
  TestCase* current = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line == "case" || starts_with(line, "case ") || starts_with(line, "case\t")) {
      const std::string_view name = trim(line.substr(4));
      if (name.empty()) parse_error(line_no, "case needs a name");
      suite.cases.push_back(TestCase{std::string(name), {}, {}, line_no});
      current = &suite.cases.back();
      continue;
    }
    if (starts_with(line, "context.")) {
      parse_context_line(line.substr(8), line_no, current ? current->context : suite.context);
      continue;
    }
    if (!current) parse_error(line_no, "step outside of a case");

    if (starts_with(line, "say:")) {
      const std::string_view body = trim(line.substr(4));
      if (body.empty()) parse_error(line_no, "say needs text");
      current->steps.emplace_back(SayStep{std::string(body)});
    } else if (starts_with(line, "expect_equivalent:")) {
      current->steps.emplace_back(parse_expect_equivalent(line.substr(18), line_no));
    } else if (starts_with(line, "expect_state:")) {
      current->steps.emplace_back(parse_expect_state(trim(line.substr(13)), line_no));
    } else if (line == "expect_no_breakdown" || line == "expect_no_breakdown:") {
      current->steps.emplace_back(ExpectNoBreakdownStep{});
    } else {
      parse_error(line_no, "unknown directive '" + std::string(line) + "'");
    }
  }
  validate_suite(suite);
  return suite;
}

TestSuite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_suite(buf.str());
}

namespace {

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_overrides(std::ostringstream& out, const ContextOverrides& o, std::string_view indent) {
  auto line = [&](std::string_view field, const std::string& value) {
    out << indent << "context." << field << " = " << value << '\n';
  };
  if (o.model_id) line("model", *o.model_id);
  if (o.strategy_id) line("strategy", *o.strategy_id);
  if (o.equivalence_threshold) line("threshold", number(*o.equivalence_threshold));
  if (o.relevance_threshold) line("relevance_threshold", number(*o.relevance_threshold));
  if (o.words_per_second) line("words_per_second", number(*o.words_per_second));
  if (o.allow_confirmations) line("allow_confirmations", *o.allow_confirmations ? "true" : "false");
  if (o.wake_phrase) line("wake_phrase", *o.wake_phrase);
  if (o.max_turns) line("max_turns", std::to_string(*o.max_turns));
  for (const auto& [id, path] : o.dataset_paths) line("dataset." + id, path.string());
}

}  // namespace

std::string write_suite(const TestSuite& suite) {
  std::ostringstream out;
  write_overrides(out, suite.context, "");
  bool first = suite.context.empty();
  for (const auto& c : suite.cases) {
    if (!first) out << '\n';
    first = false;
    out << "case " << c.name << '\n';
    write_overrides(out, c.context, "  ");
    for (const auto& step : c.steps) {
      out << "  ";
      if (const auto* say = std::get_if<SayStep>(&step)) {
        out << "say: " << say->text;
      } else if (const auto* eq = std::get_if<ExpectEquivalentStep>(&step)) {
        out << "expect_equivalent: " << eq->expected_text;
        if (eq->threshold) out << " threshold=" << number(*eq->threshold);
        if (eq->message) out << " message=" << *eq->message;
      } else if (const auto* st = std::get_if<ExpectStateStep>(&step)) {
        out << "expect_state: " << st->path;
        if (st->matcher.kind == StateMatcher::Kind::Exists) {
          out << " exists";
        } else {
          out << " == " << to_string(st->matcher.value);
        }
      } else {
        out << "expect_no_breakdown";
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace dialogtest
