#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dialogtest/state_document.hpp"
#include "dialogtest/transcript.hpp"
#include "dialogtest/utterance.hpp"

namespace dialogtest {

// Agent living in the test process. `state` may be empty when the agent
// exposes none.
struct InProcessAgent {
  std::function<std::string(std::string_view)> respond;
  std::function<StateDocument()> state;
};

// Agent spoken to over stdin/stdout with the line protocol:
//   agent: READY            (once, on start)
//   runner: U <text>        agent: A <text>
//   runner: Q               agent: S <state document>
//   runner: BYE
struct SubprocessAgent {
  std::vector<std::string> argv;
};

struct AgentSpec {
  std::variant<InProcessAgent, SubprocessAgent> entry;
  bool supports_state = false;
  std::chrono::milliseconds response_timeout{10'000};

  static AgentSpec in_process(std::function<std::string(std::string_view)> respond,
                              std::function<StateDocument()> state = {});
  // `command_line` is split into words; single and double quotes group,
  // backslash escapes the next character.
  static AgentSpec subprocess(std::string_view command_line, bool supports_state = false);
};

std::vector<std::string> split_command_line(std::string_view command_line);

class AgentSession {
 public:
  class Transport {
   public:
    virtual ~Transport() = default;
    virtual std::string respond(std::string_view user_text) = 0;
    virtual StateDocument state() = 0;
    virtual void close() noexcept = 0;
  };

  AgentSession(std::unique_ptr<Transport> transport, const AgentSpec& spec,
               std::size_t max_turns, std::string session_id);
  AgentSession(AgentSession&&) noexcept;
  AgentSession& operator=(AgentSession&&) noexcept;
  ~AgentSession();

  // Sends one user turn and waits for exactly one reply. Throws
  // SessionClosed, MaxTurnsExceeded, ResponseTimeout, ProtocolViolation.
  // After a timeout or protocol violation the session is unusable.
  const Exchange& send(const Utterance& user);

  // Throws StateUnsupported, ResponseTimeout, MalformedState.
  StateDocument query_state();

  // Idempotent. Never throws.
  const Transcript& close() noexcept;

  const Transcript& transcript() const noexcept { return transcript_; }
  bool is_open() const noexcept { return transport_ != nullptr && !broken_; }

 private:
  std::unique_ptr<Transport> transport_;
  bool supports_state_ = false;
  std::size_t max_turns_ = 0;
  bool broken_ = false;
  std::string broken_reason_;
  Transcript transcript_;
};

// Throws LaunchFailure or HandshakeTimeout (subprocess agents only).
AgentSession open_session(const AgentSpec& spec, std::size_t max_turns = 50);

}  // namespace dialogtest
