#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dialogtest {

enum class ErrorCode : std::uint8_t {
  // embedding_store
  FileUnreadable,
  MalformedLine,
  DimensionMismatch,
  EmptyModel,
  EmptyInput,
  ZeroVector,
  InvalidVector,
  // utterance
  NoTokens,
  AllTokensOutOfVocabulary,
  WakePhraseAbsent,
  // semantic_oracle
  UnknownStrategy,
  UnknownModel,
  DuplicateStrategyId,
  MalformedPath,
  EmptyTranscript,
  // dialog_context
  MissingModel,
  InvalidThreshold,
  InvalidRate,
  InvalidMaxTurns,
  // agent_adapter
  LaunchFailure,
  HandshakeTimeout,
  ResponseTimeout,
  SessionClosed,
  ProtocolViolation,
  MaxTurnsExceeded,
  StateUnsupported,
  MalformedState,
  // test_runner
  ParseError,
  ValidationError,
  DuplicateCaseName,
  // vxml_testgen
  UnsupportedElement,
  DanglingGoto,
  MalformedMarkup,
  NondeterministicField,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library. `position` carries the
// code-specific locator: a 1-based line number for parse errors, the
// 0-based argument index for ZeroVector, unset otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail,
        std::optional<std::size_t> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> position_;
};

}  // namespace dialogtest
