#include "dialogtest/utterance.hpp"

#include <clocale>
#include <cwctype>
#include <locale.h>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "dialogtest/error.hpp"

namespace dialogtest {

namespace {

constexpr char32_t kReplacement = 0xFFFD;
constexpr char32_t kRightSingleQuote = 0x2019;

struct Decoded {
  char32_t cp;
  std::size_t length;  // bytes consumed
};

Decoded decode_one(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {kReplacement, 1};
  }
  if (i + len > s.size()) return {kReplacement, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {kReplacement, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong forms, surrogates and out-of-range values.
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    return {kReplacement, 1};
  }
  return {cp, len};
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Character classification independent of the process-global locale.
class CharClass {
 public:
  CharClass() {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      locale_ = newlocale(LC_CTYPE_MASK, name, static_cast<locale_t>(nullptr));
      if (locale_ != static_cast<locale_t>(nullptr)) break;
    }
  }
  ~CharClass() {
    if (locale_ != static_cast<locale_t>(nullptr)) freelocale(locale_);
  }
  CharClass(const CharClass&) = delete;
  CharClass& operator=(const CharClass&) = delete;

  char32_t lower(char32_t cp) const {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    if (!has_locale()) return cp;
    return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), locale_));
  }

  bool alnum(char32_t cp) const {
    if (cp < 0x80) {
      return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    }
    if (!has_locale() || cp == kReplacement) return false;
    return iswalnum_l(static_cast<wint_t>(cp), locale_) != 0;
  }

 private:
  bool has_locale() const { return locale_ != static_cast<locale_t>(nullptr); }

  locale_t locale_ = static_cast<locale_t>(nullptr);
};

const CharClass& char_class() {
  static const CharClass instance;
  return instance;
}

bool is_word_char(char32_t cp) {
  return cp == '\'' || cp == kRightSingleQuote || char_class().alnum(cp);
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    auto [cp, len] = decode_one(text, i);
    append_utf8(out, char_class().lower(cp));
    i += len;
  }
  return out;
}

std::vector<std::string> normalize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto& cc = char_class();
  for (std::size_t i = 0; i < text.size();) {
    auto [cp, len] = decode_one(text, i);
    i += len;
    if (cp == kRightSingleQuote) cp = '\'';
    if (is_word_char(cp)) {
      append_utf8(current, cc.lower(cp));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

struct Utterance::Cache {
  std::mutex mutex;
  std::unordered_map<std::string, std::shared_ptr<const Encoding>> by_model;
};

Utterance::Utterance(std::string raw)
    : raw_(std::move(raw)), tokens_(normalize(raw_)), cache_(std::make_shared<Cache>()) {}

const Encoding& Utterance::encoding(const WordVectorModel& model) const {
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->by_model.find(model.name()); it != cache_->by_model.end()) {
      return *it->second;
    }
  }
  // Computed outside the lock; concurrent fills produce identical values.
  auto computed = std::make_shared<const Encoding>(encode(*this, model));
  std::lock_guard lock(cache_->mutex);
  auto [it, inserted] = cache_->by_model.try_emplace(model.name(), std::move(computed));
  return *it->second;
}

Encoding encode(const Utterance& u, const WordVectorModel& model) {
  if (u.tokens().empty()) throw Error(ErrorCode::NoTokens, "'" + u.raw() + "'");
  std::vector<Vector> found;
  found.reserve(u.tokens().size());
  std::size_t skipped = 0;
  for (const auto& token : u.tokens()) {
    if (const Vector* v = model.lookup(token)) {
      found.push_back(*v);
    } else {
      ++skipped;
    }
  }
  if (found.empty()) {
    throw Error(ErrorCode::AllTokensOutOfVocabulary,
                "'" + u.raw() + "' under model '" + model.name() + "'");
  }
  return Encoding{average(found), skipped, model.name()};
}

std::size_t match_phrase_prefix(std::string_view text, std::string_view phrase) {
  const auto& cc = char_class();
  std::size_t ti = 0;
  std::size_t pi = 0;
  char32_t last = 0;
  while (pi < phrase.size()) {
    if (ti >= text.size()) return 0;
    auto [pc, plen] = decode_one(phrase, pi);
    auto [tc, tlen] = decode_one(text, ti);
    if (cc.lower(pc) != cc.lower(tc)) return 0;
    last = pc;
    pi += plen;
    ti += tlen;
  }
  if (ti == 0) return 0;
  // "OK Googler" does not start with "OK Google".
  if (ti < text.size() && cc.alnum(last) && cc.alnum(decode_one(text, ti).cp)) return 0;
  return ti;
}

namespace {

bool is_separator(char32_t cp) { return !is_word_char(cp); }

std::size_t skip_separators(std::string_view text, std::size_t i) {
  while (i < text.size()) {
    auto [cp, len] = decode_one(text, i);
    if (!is_separator(cp)) break;
    i += len;
  }
  return i;
}

std::size_t skip_whitespace(std::string_view text, std::size_t i) {
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' ||
                             text[i] == '\r' || text[i] == '\f' || text[i] == '\v')) {
    ++i;
  }
  return i;
}

}  // namespace

Utterance perturb_duplicate_wake(const Utterance& u, std::string_view wake_phrase,
                                 int repetitions) {
  if (repetitions < 2) {
    throw std::invalid_argument("repetitions must be at least 2");
  }
  const std::string_view raw = u.raw();
  const std::size_t start = skip_whitespace(raw, 0);
  const std::size_t matched = wake_phrase.empty() ? 0 : match_phrase_prefix(raw.substr(start), wake_phrase);
  if (matched == 0) {
    throw Error(ErrorCode::WakePhraseAbsent,
                "'" + u.raw() + "' does not start with '" + std::string(wake_phrase) + "'");
  }
  std::string out(raw.substr(0, start));
  for (int k = 0; k < repetitions; ++k) {
    if (k > 0) out += ' ';
    out += wake_phrase;
  }
  out += raw.substr(start + matched);
  return Utterance(std::move(out));
}

Utterance strip_wake(const Utterance& u, std::string_view wake_phrase) {
  const std::string_view raw = u.raw();
  if (wake_phrase.empty()) return u;
  std::size_t pos = 0;
  bool removed = false;
  for (;;) {
    const std::size_t at = skip_separators(raw, pos);
    const std::size_t matched = match_phrase_prefix(raw.substr(at), wake_phrase);
    if (matched == 0) break;
    pos = at + matched;
    removed = true;
  }
  if (!removed) return u;
  return Utterance(std::string(raw.substr(skip_separators(raw, pos))));
}

}  // namespace dialogtest
