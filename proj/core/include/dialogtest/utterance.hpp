#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dialogtest/embedding_store.hpp"

namespace dialogtest {

// Lowercase, map everything but letters/digits/apostrophes to spaces, split.
// Letters and digits are classified per Unicode (via the C.UTF-8 ctype
// tables); typographic apostrophes (U+2019) are folded to '\''.
std::vector<std::string> normalize(std::string_view text);

// Unicode-aware lowercase of UTF-8 text. Invalid sequences pass through as
// U+FFFD.
std::string to_lower(std::string_view text);

struct Encoding {
  Vector vector;
  std::size_t skipped = 0;  // out-of-vocabulary tokens left out of the mean
  std::string model_name;
};

class Utterance {
 public:
  explicit Utterance(std::string raw);
  Utterance(const char* raw) : Utterance(std::string(raw)) {}

  const std::string& raw() const noexcept { return raw_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // Encoding under `model`, cached per model name. Safe to call from
  // several threads; copies of an Utterance share the cache.
  const Encoding& encoding(const WordVectorModel& model) const;

  friend bool operator==(const Utterance& a, const Utterance& b) { return a.raw_ == b.raw_; }

 private:
  struct Cache;

  std::string raw_;
  std::vector<std::string> tokens_;
  std::shared_ptr<Cache> cache_;
};

// Mean of the in-vocabulary token vectors. Throws NoTokens or
// AllTokensOutOfVocabulary.
Encoding encode(const Utterance& u, const WordVectorModel& model);

// Returns a copy whose raw text starts with `wake_phrase` repeated
// `repetitions` times (single-space separated) followed by the remainder.
Utterance perturb_duplicate_wake(const Utterance& u, std::string_view wake_phrase,
                                 int repetitions);

// Removes every leading case-insensitive repetition of `wake_phrase` and the
// punctuation/whitespace around them. No-op when the phrase is absent.
Utterance strip_wake(const Utterance& u, std::string_view wake_phrase);

// Byte length of the case-insensitive match of `phrase` at the start of
// `text` (ending on a word boundary), or 0 when it does not match.
std::size_t match_phrase_prefix(std::string_view text, std::string_view phrase);

}  // namespace dialogtest
