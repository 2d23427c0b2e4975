#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "dialogtest/agent_adapter.hpp"
#include "dialogtest/dialog_context.hpp"
#include "dialogtest/embedding_store.hpp"
#include "dialogtest/error.hpp"
#include "dialogtest/semantic_oracle.hpp"
#include "dialogtest/suite.hpp"
#include "dialogtest/test_runner.hpp"
#include "dialogtest/vxml_testgen.hpp"

namespace dt = dialogtest;

namespace {

constexpr int kExitError = 2;

struct ModelOptions {
  std::string path;
  std::string format;  // empty: detect from the first line
};

void add_model_options(CLI::App& cmd, ModelOptions& opts) {
  cmd.add_option("--model", opts.path, "Word-vector model file")->required()->check(CLI::ExistingFile);
  cmd.add_option("--model-format", opts.format, "w2v-text or glove-text (detected when omitted)")
      ->check(CLI::IsMember({"w2v-text", "glove-text"}));
}

std::shared_ptr<const dt::WordVectorModel> load(const ModelOptions& opts) {
  const dt::ModelFormat format =
      opts.format.empty() ? dt::detect_format(opts.path) : dt::parse_model_format(opts.format);
  return std::make_shared<const dt::WordVectorModel>(dt::load_model(opts.path, format));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct RunArgs {
  std::string suite;
  ModelOptions model;
  std::optional<double> threshold;
  std::optional<double> relevance_threshold;
  std::string agent;
  bool agent_state = true;
  long long timeout_ms = 10'000;
  std::string report = "human";
  std::size_t jobs = 1;
  std::optional<std::string> wake_phrase;
};

int run(const RunArgs& args) {
  const dt::TestSuite suite = dt::load_suite(args.suite);
  auto model = load(args.model);

  auto registry = std::make_shared<dt::ModelRegistry>();
  registry->add(model);
  const dt::SemanticOracle oracle(registry);
  const dt::DialogContext base = dt::builder().with_model(model->name()).build();

  dt::RunOptions options;
  options.jobs = args.jobs;
  options.pinned.equivalence_threshold = args.threshold;
  options.pinned.relevance_threshold = args.relevance_threshold;
  options.pinned.wake_phrase = args.wake_phrase;

  dt::AgentSpec agent = args.agent.empty()
                            ? dt::AgentSpec::in_process([](std::string_view text) { return std::string(text); })
                            : dt::AgentSpec::subprocess(args.agent, args.agent_state);
  agent.response_timeout = std::chrono::milliseconds(args.timeout_ms);

  const dt::TestReport report = dt::run_suite(suite, base, agent, oracle, options);
  std::cout << dt::render_report(report, dt::parse_report_format(args.report));
  return report.exit_code();
}

int check_suite(const std::string& path) {
  const dt::TestSuite suite = dt::load_suite(path);
  std::size_t steps = 0;
  for (const auto& c : suite.cases) steps += c.steps.size();
  std::cout << path << ": " << suite.cases.size() << " cases, " << steps << " steps\n";
  return 0;
}

int similarity(const std::string& a, const std::string& b, const ModelOptions& model_opts,
               const std::string& strategy) {
  auto model = load(model_opts);
  auto registry = std::make_shared<dt::ModelRegistry>();
  registry->add(model);
  dt::SemanticOracle oracle(registry);
  if (!oracle.has_strategy(strategy)) oracle.register_strategy(dt::make_token_jaccard_strategy());
  const dt::DialogContext ctx = dt::builder().with_model(model->name()).with_strategy(strategy).build();
  const dt::SimilarityScore score = oracle.score(dt::Utterance(a), dt::Utterance(b), ctx);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", score.value);
  std::cout << buf << '\n';
  if (score.skipped && (score.skipped->first > 0 || score.skipped->second > 0)) {
    std::cerr << "out-of-vocabulary tokens skipped: " << score.skipped->first << " / "
              << score.skipped->second << '\n';
  }
  return 0;
}

int gen_vxml(const std::string& in, const std::string& out, std::size_t loop_bound) {
  const dt::DialogAutomaton automaton = dt::parse_vxml(read_file(in));
  const dt::GenerationResult result = dt::generate_sequences(automaton, loop_bound);
  const std::string text = dt::emit_suite(result.sequences, automaton);
  dt::parse_suite(text);
  {
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + out);
    file << text;
    if (!file.flush()) throw std::runtime_error("cannot write " + out);
  }
  std::cerr << out << ": " << result.sequences.size() << " cases from "
            << automaton.states().size() << " states and " << automaton.transitions().size()
            << " transitions\n";
  for (const auto& s : result.unreachable_states) std::cerr << "unreachable state: " << s << '\n';
  for (const auto& t : result.uncovered) {
    std::cerr << "uncovered transition: " << t.from << " --" << t.label << "--> " << t.to << '\n';
  }
  return result.uncovered.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversational agent test runner"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a test suite against an agent");
  run_cmd->add_option("--suite", run_args.suite, "Suite file")->required();
  add_model_options(*run_cmd, run_args.model);
  run_cmd->add_option("--threshold", run_args.threshold, "Equivalence threshold");
  run_cmd->add_option("--relevance-threshold", run_args.relevance_threshold,
                      "Relevance threshold for breakdown detection");
  run_cmd->add_option("--agent", run_args.agent,
                      "Agent command line (line protocol); an in-process echo agent when omitted");
  run_cmd->add_flag("!--agent-no-state", run_args.agent_state,
                    "The agent does not answer state queries");
  run_cmd->add_option("--timeout-ms", run_args.timeout_ms, "Per-response timeout")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--report", run_args.report, "Report format")
      ->check(CLI::IsMember({"human", "tap"}));
  run_cmd->add_option("--jobs", run_args.jobs, "Cases run concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_option("--wake-phrase", run_args.wake_phrase, "Wake phrase prefixed to user turns");

  std::string check_path;
  auto* check_cmd = app.add_subcommand("check-suite", "Parse and validate a suite file");
  check_cmd->add_option("path", check_path, "Suite file")->required();

  std::string sim_a;
  std::string sim_b;
  std::string sim_strategy = dt::kDefaultStrategy;
  ModelOptions sim_model;
  auto* sim_cmd = app.add_subcommand("similarity", "Score two utterances");
  sim_cmd->add_option("a", sim_a, "First utterance")->required();
  sim_cmd->add_option("b", sim_b, "Second utterance")->required();
  add_model_options(*sim_cmd, sim_model);
  sim_cmd->add_option("--strategy", sim_strategy, "Similarity strategy")
      ->check(CLI::IsMember({std::string(dt::kDefaultStrategy), std::string("jaccard-tokens")}));

  std::string vxml_in;
  std::string vxml_out;
  std::size_t loop_bound = 1;
  auto* gen_cmd = app.add_subcommand("gen-vxml", "Generate a suite from a VoiceXML dialog");
  gen_cmd->add_option("--in", vxml_in, "VoiceXML document")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", vxml_out, "Suite file to write")->required();
  gen_cmd->add_option("--loop-bound", loop_bound, "Extra traversals allowed per transition");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*check_cmd) return check_suite(check_path);
    if (*sim_cmd) return similarity(sim_a, sim_b, sim_model, sim_strategy);
    if (*gen_cmd) return gen_vxml(vxml_in, vxml_out, loop_bound);
  } catch (const std::exception& e) {
    std::cerr << "dialogtest: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
