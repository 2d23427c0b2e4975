#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dialogtest {

struct Transition {
  std::string from;
  std::string label;
  std::string to;

  friend auto operator<=>(const Transition&, const Transition&) = default;
};

// Deterministic finite dialog model: states are fields awaiting input plus
// the terminal END state; transitions are admissible user inputs.
class DialogAutomaton {
 public:
  static constexpr std::string_view kEnd = "END";

  // Validates: initial and every endpoint are states, labels nonempty, no
  // two transitions share (from, label). Throws NondeterministicField for
  // the latter and std::invalid_argument for the rest. END is added to
  // `states` when missing.
  DialogAutomaton(std::vector<std::string> states, std::string initial,
                  std::vector<Transition> transitions,
                  std::map<std::string, std::string> prompts = {});

  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::string& initial() const noexcept { return initial_; }
  // Sorted by (from, label, to).
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  const std::map<std::string, std::string>& prompts() const noexcept { return prompts_; }

  bool has_state(std::string_view id) const;
  // Outgoing transitions of `state`, sorted by label.
  std::vector<const Transition*> outgoing(std::string_view state) const;
  std::optional<std::string> next(std::string_view state, std::string_view label) const;
  const std::string* prompt(std::string_view state) const;

  friend bool operator==(const DialogAutomaton&, const DialogAutomaton&) = default;

 private:
  std::vector<std::string> states_;
  std::string initial_;
  std::vector<Transition> transitions_;
  std::map<std::string, std::string> prompts_;
};

// Parses the VoiceXML subset <vxml>, <form id>, <field name>, <prompt>,
// <option>, <goto next="#form">, <exit/>. One state per field, named
// "<form>.<field>", in document order, plus END. An option's target is, in
// order of preference: its own <goto>/<exit/> child, the field's
// <goto>/<exit/>, the next field of the form, the form's trailing
// <goto>/<exit/>, END.
//
// Throws UnsupportedElement, DanglingGoto, MalformedMarkup,
// NondeterministicField.
DialogAutomaton parse_vxml(std::string_view document);

struct InputSequence {
  std::vector<std::string> labels;
  std::string terminal;

  friend auto operator<=>(const InputSequence&, const InputSequence&) = default;
};

struct GenerationResult {
  std::vector<InputSequence> sequences;
  std::vector<std::string> unreachable_states;
  std::vector<Transition> uncovered;  // reachable but not exercised; empty unless the bound bites
  bool initial_dead_end = false;      // initial has no way out while other states exist
};

// Transition coverage: every transition reachable from the initial state
// appears in at least one sequence; no transition occurs more than
// loop_bound + 1 times in one sequence. Ties break lexicographically by
// label, so the result is a function of the automaton alone.
GenerationResult generate_sequences(const DialogAutomaton& automaton, std::size_t loop_bound = 1);

// The state reached by feeding `labels` from the initial state, or nullopt
// when some (state, label) pair has no transition.
std::optional<std::string> replay(const DialogAutomaton& automaton,
                                  const std::vector<std::string>& labels);

// One case per sequence, named path-1, path-2, ...: `say: <label>` for each
// input, followed by `expect_equivalent: <prompt>` when the state the input
// was given in has a prompt.
std::string emit_suite(const std::vector<InputSequence>& sequences,
                       const DialogAutomaton& automaton);

}  // namespace dialogtest
