#include "dialogtest/utterance.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "dialogtest/error.hpp"
#include "test_support.hpp"

namespace dt = dialogtest;
using Tokens = std::vector<std::string>;

namespace {

std::shared_ptr<const dt::WordVectorModel> hello_world() {
  return dt::testing::make_model("hw", {{"hello", {1, 0}}, {"world", {0, 1}}});
}

dt::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const dt::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no dialogtest::Error thrown";
  return dt::ErrorCode::InvalidVector;
}

std::string join(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_EQ(dt::normalize("OK Google, what time is it?"),
            (Tokens{"ok", "google", "what", "time", "is", "it"}));
  EXPECT_EQ(dt::normalize("Hello"), Tokens{"hello"});
  EXPECT_EQ(dt::normalize(""), Tokens{});
}

TEST(Normalize, KeepsApostrophesAndDigits) {
  EXPECT_EQ(dt::normalize("It's 6:00, isn't it?"), (Tokens{"it's", "6", "00", "isn't", "it"}));
  EXPECT_EQ(dt::normalize("it’s"), Tokens{"it's"});
  EXPECT_EQ(dt::normalize("  \t\n "), Tokens{});
}

TEST(Normalize, UnicodeLowercase) {
  EXPECT_EQ(dt::normalize("ÉCOLE Über ΣΟΦΙΑ"), (Tokens{"école", "über", "σοφια"}));
  EXPECT_EQ(dt::normalize("naïve—café"), (Tokens{"naïve", "café"}));
}

TEST(NormalizeProperty, IdempotentOnJoinedOutput) {
  dt::testing::Rng rng(11);
  const std::string alphabet = "abcXYZ019 ,.?!'-\t\n";
  const std::vector<std::string> extras = {"é", "Ü", "’", "ß", "Ω", "—"};
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    for (std::size_t k = rng.between(0, 40); k > 0; --k) {
      if (rng.index(8) == 0) {
        text += extras[rng.index(extras.size())];
      } else {
        text += alphabet[rng.index(alphabet.size())];
      }
    }
    const Tokens once = dt::normalize(text);
    EXPECT_EQ(dt::normalize(join(once)), once) << text;
    EXPECT_EQ(dt::Utterance(text).tokens(), once);
  }
}

TEST(Encode, Examples) {
  const auto model = hello_world();
  const auto both = dt::encode(dt::Utterance("hello world"), *model);
  EXPECT_EQ(both.vector, (dt::Vector{0.5, 0.5}));
  EXPECT_EQ(both.skipped, 0u);
  EXPECT_EQ(both.model_name, "hw");

  const auto partial = dt::encode(dt::Utterance("hello zzz"), *model);
  EXPECT_EQ(partial.vector, (dt::Vector{1, 0}));
  EXPECT_EQ(partial.skipped, 1u);

  EXPECT_EQ(code_of([&] { dt::encode(dt::Utterance("zzz qqq"), *model); }),
            dt::ErrorCode::AllTokensOutOfVocabulary);
  EXPECT_EQ(code_of([&] { dt::encode(dt::Utterance("?!"), *model); }), dt::ErrorCode::NoTokens);
}

TEST(Encode, CacheIsPerModel) {
  const auto m1 = hello_world();
  const auto m2 = dt::testing::make_model("other", {{"hello", {0, 3}}, {"world", {3, 0}}});
  const dt::Utterance u("Hello");
  EXPECT_EQ(u.encoding(*m1).vector, (dt::Vector{1, 0}));
  EXPECT_EQ(u.encoding(*m2).vector, (dt::Vector{0, 3}));
  EXPECT_EQ(u.encoding(*m2).model_name, "other");
  EXPECT_EQ(u.encoding(*m1).vector, (dt::Vector{1, 0}));
}

TEST(Encode, ConcurrentCacheFillAgrees) {
  const auto model = hello_world();
  const dt::Utterance u("hello world hello");
  std::vector<dt::Vector> seen(8, dt::Vector{0});
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < seen.size(); ++i) {
      threads.emplace_back([&, i] { seen[i] = u.encoding(*model).vector; });
    }
  }
  for (const auto& v : seen) EXPECT_EQ(v, seen.front());
}

TEST(EncodeProperty, OrderInvariant) {
  dt::testing::Rng rng(5);
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (int w = 0; w < 30; ++w) rows.emplace_back("w" + std::to_string(w), rng.vector(50));
  const auto model = dt::testing::make_model("rand", rows);
  for (int i = 0; i < 300; ++i) {
    Tokens words;
    for (std::size_t k = rng.between(1, 15); k > 0; --k) {
      words.push_back(rng.index(5) == 0 ? "oov" + std::to_string(k) : rows[rng.index(rows.size())].first);
    }
    if (std::all_of(words.begin(), words.end(), [](auto& w) { return w.rfind("oov", 0) == 0; })) {
      words.push_back("w0");
    }
    Tokens shuffled = words;
    rng.shuffle(shuffled);
    const auto a = dt::encode(dt::Utterance(join(words)), *model);
    const auto b = dt::encode(dt::Utterance(join(shuffled)), *model);
    EXPECT_EQ(a.skipped, b.skipped);
    for (std::size_t k = 0; k < a.vector.dim(); ++k) EXPECT_NEAR(a.vector[k], b.vector[k], 1e-12);
  }
}

TEST(PerturbDuplicateWake, Examples) {
  EXPECT_EQ(dt::perturb_duplicate_wake(dt::Utterance("OK Google, what time is it?"), "OK Google", 2).raw(),
            "OK Google OK Google, what time is it?");
  EXPECT_EQ(dt::perturb_duplicate_wake(dt::Utterance("OK Google."), "OK Google", 2).raw(),
            "OK Google OK Google.");
  EXPECT_EQ(code_of([] {
              dt::perturb_duplicate_wake(dt::Utterance("what time is it"), "OK Google", 2);
            }),
            dt::ErrorCode::WakePhraseAbsent);
}

TEST(PerturbDuplicateWake, CaseInsensitiveAndLeadingSpace) {
  EXPECT_EQ(dt::perturb_duplicate_wake(dt::Utterance("  ok google hi"), "OK Google", 3).raw(),
            "  OK Google OK Google OK Google hi");
  EXPECT_EQ(code_of([] { dt::perturb_duplicate_wake(dt::Utterance("OK Googled"), "OK Google", 2); }),
            dt::ErrorCode::WakePhraseAbsent);
  EXPECT_THROW(dt::perturb_duplicate_wake(dt::Utterance("OK Google"), "OK Google", 1),
               std::invalid_argument);
}

TEST(PerturbDuplicateWake, LeavesInputUntouched) {
  const dt::Utterance u("OK Google, set an alarm");
  const std::string before = u.raw();
  const Tokens tokens = u.tokens();
  (void)dt::perturb_duplicate_wake(u, "OK Google", 4);
  EXPECT_EQ(u.raw(), before);
  EXPECT_EQ(u.tokens(), tokens);
}

TEST(StripWake, Examples) {
  EXPECT_EQ(dt::strip_wake(dt::Utterance("OK Google OK Google, what time is it?"), "OK Google").raw(),
            "what time is it?");
  EXPECT_EQ(dt::strip_wake(dt::Utterance("what time is it?"), "OK Google").raw(), "what time is it?");
  EXPECT_EQ(dt::strip_wake(dt::Utterance("ok google ok google ok google hi"), "OK Google").raw(), "hi");
}

TEST(StripWake, Idempotent) {
  for (const char* text : {"OK Google, OK Google. hi", "OK Google", "hi OK Google", ""}) {
    const auto once = dt::strip_wake(dt::Utterance(text), "OK Google");
    EXPECT_EQ(dt::strip_wake(once, "OK Google").raw(), once.raw()) << text;
  }
}

TEST(WakeProperty, StripUndoesPerturb) {
  dt::testing::Rng rng(99);
  const std::vector<std::string> wakes = {"OK Google", "hey siri", "Alexa"};
  const std::vector<std::string> words = {"what", "time", "is", "it", "set", "alarm", "six", "a.m."};
  const std::vector<std::string> seps = {" ", ", ", ". ", "! ", "  "};
  for (int i = 0; i < 500; ++i) {
    const std::string& wake = wakes[rng.index(wakes.size())];
    std::string text = (rng.coin() ? wake : dt::to_lower(wake)) + seps[rng.index(seps.size())];
    for (std::size_t k = rng.between(1, 6); k > 0; --k) text += words[rng.index(words.size())] + " ";
    const dt::Utterance u(text);
    const int reps = static_cast<int>(rng.between(2, 5));
    const dt::Utterance twin = dt::perturb_duplicate_wake(u, wake, reps);
    EXPECT_EQ(dt::normalize(dt::strip_wake(twin, wake).raw()), dt::normalize(dt::strip_wake(u, wake).raw()))
        << text;
  }
}

TEST(MatchPhrasePrefix, BoundaryAndMultibyte) {
  EXPECT_EQ(dt::match_phrase_prefix("OK Google, hi", "ok google"), 9u);
  EXPECT_EQ(dt::match_phrase_prefix("OK Googles", "ok google"), 0u);
  EXPECT_EQ(dt::match_phrase_prefix("ÉCOLE ouverte", "école"), std::string("ÉCOLE").size());
  EXPECT_EQ(dt::match_phrase_prefix("hi", "ok google"), 0u);
}
