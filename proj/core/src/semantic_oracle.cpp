#include "dialogtest/semantic_oracle.hpp"

#include <algorithm>
#include <charconv>

#include "dialogtest/error.hpp"

namespace dialogtest {

void ModelRegistry::add(std::shared_ptr<const WordVectorModel> model) {
  std::string id = model->name();
  add(std::move(id), std::move(model));
}

void ModelRegistry::add(std::string id, std::shared_ptr<const WordVectorModel> model) {
  std::lock_guard lock(mutex_);
  models_[std::move(id)] = std::move(model);
}

std::shared_ptr<const WordVectorModel> ModelRegistry::find(std::string_view id) const {
  std::lock_guard lock(mutex_);
  auto it = models_.find(id);
  return it == models_.end() ? nullptr : it->second;
}

std::shared_ptr<const WordVectorModel> ModelRegistry::resolve(const DialogContext& ctx) {
  if (auto model = find(ctx.model_id())) return model;
  auto path = ctx.dataset_paths().find(ctx.model_id());
  if (path == ctx.dataset_paths().end()) {
    throw Error(ErrorCode::UnknownModel, "'" + ctx.model_id() + "' is not loaded");
  }
  // Loading happens outside the lock; a racing loader's result is discarded.
  std::shared_ptr<const WordVectorModel> loaded;
  try {
    loaded = std::make_shared<const WordVectorModel>(
        load_model(path->second, detect_format(path->second), ctx.model_id()));
  } catch (const Error& e) {
    throw Error(ErrorCode::UnknownModel, "'" + ctx.model_id() + "': " + e.what());
  }
  std::lock_guard lock(mutex_);
  auto [it, inserted] = models_.try_emplace(ctx.model_id(), std::move(loaded));
  return it->second;
}

SimilarityStrategy make_embedding_cosine_strategy() {
  return {kDefaultStrategy,
          [](const Utterance& a, const Utterance& b, const DialogContext& ctx,
             ModelRegistry& models) {
            auto model = models.resolve(ctx);
            const Encoding& ea = a.encoding(*model);
            const Encoding& eb = b.encoding(*model);
            return SimilarityScore{cosine(ea.vector, eb.vector), SkipCounts{ea.skipped, eb.skipped}};
          }};
}

SimilarityStrategy make_token_jaccard_strategy(std::string id) {
  return {std::move(id),
          [](const Utterance& a, const Utterance& b, const DialogContext&, ModelRegistry&) {
            std::set<std::string> sa(a.tokens().begin(), a.tokens().end());
            std::set<std::string> sb(b.tokens().begin(), b.tokens().end());
            if (sa.empty() && sb.empty()) throw Error(ErrorCode::NoTokens, "both utterances are empty");
            std::size_t common = 0;
            for (const auto& t : sa) common += sb.count(t);
            const std::size_t total = sa.size() + sb.size() - common;
            return SimilarityScore{static_cast<double>(common) / static_cast<double>(total), {}};
          }};
}

std::string_view to_string(BreakdownLabel label) noexcept {
  switch (label) {
    case BreakdownLabel::None: return "none";
    case BreakdownLabel::IrrelevantResponse: return "irrelevant_response";
    case BreakdownLabel::IgnoredQuestion: return "ignored_question";
    case BreakdownLabel::UnclearIntent: return "unclear_intent";
  }
  return "none";
}

BreakdownCues BreakdownCues::defaults() {
  BreakdownCues c;
  c.question_words = {"what", "when", "where", "who",  "why",   "how", "do",
                      "does", "is",   "are",   "can",  "could", "will"};
  c.acknowledgments = {"yes", "no", "ok", "okay", "sure", "yeah"};
  c.tag_heads = {"isn't",   "aren't",   "wasn't",   "weren't", "don't",    "doesn't",
                 "didn't",  "won't",    "wouldn't", "can't",   "couldn't", "shouldn't",
                 "haven't", "hasn't",   "hadn't",   "ain't",   "is",       "are",
                 "was",     "were",     "do",       "does",    "did",      "will",
                 "would",   "can",      "could",    "should",  "have",     "has"};
  c.tag_subjects = {"it", "you", "he", "she", "we", "they", "i", "there", "that", "this"};
  c.tag_words = {"right", "eh", "huh"};
  c.function_words = {
      "a",     "an",    "the",   "and",   "or",    "but",   "if",    "then",  "so",
      "of",    "to",    "in",    "on",    "at",    "for",   "with",  "by",    "from",
      "about", "as",    "into",  "it",    "it's",  "its",   "i",     "i'm",   "me",
      "my",    "you",   "your",  "you're", "he",   "she",   "we",    "they",  "them",
      "this",  "that",  "these", "those", "there", "here",  "is",    "are",   "was",
      "were",  "be",    "been",  "am",    "do",    "does",  "did",   "have",  "has",
      "had",   "will",  "would", "can",   "could", "should", "shall", "may",  "might",
      "must",  "not",   "isn't", "don't", "what",  "when",  "where", "who",   "why",
      "how",   "which", "know",  "please", "tell", "let",   "let's", "just",  "very"};
  return c;
}

SemanticOracle::SemanticOracle(std::shared_ptr<ModelRegistry> models, BreakdownCues cues)
    : models_(std::move(models)), cues_(std::move(cues)) {
  auto builtin = make_embedding_cosine_strategy();
  strategies_.emplace(builtin.id, std::move(builtin));
}

void SemanticOracle::register_strategy(SimilarityStrategy strategy) {
  std::unique_lock lock(strategies_mutex_);
  if (strategies_.count(strategy.id)) throw Error(ErrorCode::DuplicateStrategyId, strategy.id);
  std::string id = strategy.id;
  strategies_.emplace(std::move(id), std::move(strategy));
}

bool SemanticOracle::has_strategy(std::string_view id) const {
  std::shared_lock lock(strategies_mutex_);
  return strategies_.find(id) != strategies_.end();
}

SimilarityScore SemanticOracle::score(const Utterance& a, const Utterance& b,
                                      const DialogContext& ctx) const {
  SimilarityStrategy::Scorer scorer;
  {
    std::shared_lock lock(strategies_mutex_);
    auto it = strategies_.find(ctx.strategy_id());
    if (it == strategies_.end()) throw Error(ErrorCode::UnknownStrategy, ctx.strategy_id());
    scorer = it->second.scorer;
  }
  return scorer(a, b, ctx, *models_);
}

Verdict SemanticOracle::assert_equivalent(const Utterance& actual, const Utterance& expected,
                                          const DialogContext& ctx,
                                          std::string_view message) const {
  SimilarityScore s = score(actual, expected, ctx);
  Verdict v;
  v.kind = VerdictKind::Equivalence;
  v.score = s.value;
  v.threshold = ctx.equivalence_threshold();
  v.passed = v.score >= v.threshold;
  v.strategy_id = ctx.strategy_id();
  v.skipped = s.skipped;
  v.message = message.empty() ? "'" + actual.raw() + "' ~ '" + expected.raw() + "'"
                              : std::string(message);
  return v;
}

namespace {

template <class Set>
bool contains(const Set& set, std::string_view token) {
  return set.find(token) != set.end();
}

char last_visible(std::string_view raw) {
  auto pos = raw.find_last_not_of(" \t\r\n\f\v");
  return pos == std::string_view::npos ? '\0' : raw[pos];
}

}  // namespace

bool SemanticOracle::is_question(const Utterance& u) const {
  const auto& tokens = u.tokens();
  if (!tokens.empty() && contains(cues_.question_words, tokens.front())) return true;
  if (last_visible(u.raw()) != '?') return false;
  // Tag questions ("it's hot today, isn't it?") ask for agreement, not
  // information.
  const auto comma = u.raw().rfind(',');
  if (comma == std::string::npos) return true;
  const auto tag = normalize(std::string_view(u.raw()).substr(comma + 1));
  const bool tagged =
      (tag.size() == 1 && contains(cues_.tag_words, tag[0])) ||
      ((tag.size() == 2 || tag.size() == 3) && contains(cues_.tag_heads, tag[0]) &&
       contains(cues_.tag_subjects, tag.back()));
  return !tagged;
}

BreakdownResult SemanticOracle::classify_breakdown(const Transcript& transcript,
                                                   const Utterance& response,
                                                   const DialogContext& ctx) const {
  if (transcript.empty()) throw Error(ErrorCode::EmptyTranscript, transcript.session_id());
  Utterance user = transcript.exchanges().back().user;
  if (ctx.wake_phrase()) user = strip_wake(user, *ctx.wake_phrase());

  BreakdownResult result;
  auto& ev = result.evidence;
  ev.relevance_threshold = ctx.relevance_threshold();
  ev.question = is_question(user);
  ev.tag_question = !ev.question && last_visible(user.raw()) == '?';

  auto is_ack = [&](const std::string& t) { return contains(cues_.acknowledgments, t); };
  ev.acknowledgment_only = !response.tokens().empty() &&
                           std::all_of(response.tokens().begin(), response.tokens().end(), is_ack);
  const bool substantive_question = !std::all_of(user.tokens().begin(), user.tokens().end(), is_ack);

  auto is_content = [&](const std::string& t) {
    return !contains(cues_.function_words, t) && !is_ack(t);
  };
  for (const auto& t : response.tokens()) {
    if (is_content(t) && std::find(user.tokens().begin(), user.tokens().end(), t) != user.tokens().end()) {
      ev.shares_content_token = true;
      break;
    }
  }

  if (ev.question && ev.acknowledgment_only && substantive_question) {
    result.label = BreakdownLabel::UnclearIntent;
    return result;
  }
  ev.similarity = similarity(response, user, ctx);
  const bool dissimilar = *ev.similarity < ctx.relevance_threshold();
  if (ev.question && dissimilar && !ev.shares_content_token) {
    result.label = BreakdownLabel::IgnoredQuestion;
  } else if (dissimilar) {
    result.label = BreakdownLabel::IrrelevantResponse;
  } else {
    result.label = BreakdownLabel::None;
  }
  return result;
}

Verdict assert_state(const StateDocument& state, std::string_view path,
                     const StateMatcher& matcher) {
  split_path(path);
  Verdict v;
  v.kind = VerdictKind::State;
  v.threshold = 1.0;
  v.strategy_id = "state";
  const std::string p(path);
  if (matcher.kind == StateMatcher::Kind::Exists) {
    v.passed = state.contains(path);
    v.message = p + (v.passed ? " exists" : " is absent");
  } else {
    const Scalar* actual = state.find_leaf(path);
    v.passed = actual != nullptr && *actual == matcher.value;
    v.message = p + " == " + to_string(matcher.value) +
                (actual ? " (actual: " + to_string(*actual) + ")"
                        : state.contains(path) ? " (actual: subtree)" : " (actual: absent)");
  }
  v.score = v.passed ? 1.0 : 0.0;
  return v;
}

}  // namespace dialogtest
