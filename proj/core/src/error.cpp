#include "dialogtest/error.hpp"

namespace dialogtest {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyModel: return "EmptyModel";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InvalidVector: return "InvalidVector";
    case ErrorCode::NoTokens: return "NoTokens";
    case ErrorCode::AllTokensOutOfVocabulary: return "AllTokensOutOfVocabulary";
    case ErrorCode::WakePhraseAbsent: return "WakePhraseAbsent";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::DuplicateStrategyId: return "DuplicateStrategyId";
    case ErrorCode::MalformedPath: return "MalformedPath";
    case ErrorCode::EmptyTranscript: return "EmptyTranscript";
    case ErrorCode::MissingModel: return "MissingModel";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::InvalidMaxTurns: return "InvalidMaxTurns";
    case ErrorCode::LaunchFailure: return "LaunchFailure";
    case ErrorCode::HandshakeTimeout: return "HandshakeTimeout";
    case ErrorCode::ResponseTimeout: return "ResponseTimeout";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::MaxTurnsExceeded: return "MaxTurnsExceeded";
    case ErrorCode::StateUnsupported: return "StateUnsupported";
    case ErrorCode::MalformedState: return "MalformedState";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::DuplicateCaseName: return "DuplicateCaseName";
    case ErrorCode::UnsupportedElement: return "UnsupportedElement";
    case ErrorCode::DanglingGoto: return "DanglingGoto";
    case ErrorCode::MalformedMarkup: return "MalformedMarkup";
    case ErrorCode::NondeterministicField: return "NondeterministicField";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail,
                    std::optional<std::size_t> position) {
  std::string out(to_string(code));
  if (position) {
    out += "(" + std::to_string(*position) + ")";
  }
  if (!detail.empty()) {
    out += ": " + detail;
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string detail,
             std::optional<std::size_t> position)
    : std::runtime_error(compose(code, detail, position)),
      code_(code),
      detail_(std::move(detail)),
      position_(position) {}

}  // namespace dialogtest
