#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "dialogtest/dialog_context.hpp"
#include "dialogtest/embedding_store.hpp"
#include "dialogtest/state_document.hpp"
#include "dialogtest/transcript.hpp"
#include "dialogtest/utterance.hpp"

namespace dialogtest {

// Models available to oracles, keyed by id. Thread-safe.
class ModelRegistry {
 public:
  // Registers under the model's own name.
  void add(std::shared_ptr<const WordVectorModel> model);
  void add(std::string id, std::shared_ptr<const WordVectorModel> model);

  std::shared_ptr<const WordVectorModel> find(std::string_view id) const;

  // The model named by ctx.model_id(). Falls back to loading
  // ctx.dataset_paths()[model_id] on first use. Throws UnknownModel.
  std::shared_ptr<const WordVectorModel> resolve(const DialogContext& ctx);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const WordVectorModel>, std::less<>> models_;
};

struct SkipCounts {
  std::size_t first = 0;
  std::size_t second = 0;
  friend bool operator==(const SkipCounts&, const SkipCounts&) = default;
};

struct SimilarityScore {
  double value = 0.0;
  std::optional<SkipCounts> skipped;
};

struct SimilarityStrategy {
  using Scorer = std::function<SimilarityScore(const Utterance&, const Utterance&,
                                               const DialogContext&, ModelRegistry&)>;
  std::string id;
  Scorer scorer;
};

// Cosine of the averaged word embeddings under ctx.model_id().
SimilarityStrategy make_embedding_cosine_strategy();
// |A ∩ B| / |A ∪ B| over normalized token sets. Needs no model.
SimilarityStrategy make_token_jaccard_strategy(std::string id = "jaccard-tokens");

enum class VerdictKind { Equivalence, State, Breakdown };

struct Verdict {
  VerdictKind kind = VerdictKind::Equivalence;
  bool passed = false;
  double score = 0.0;
  double threshold = 0.0;
  std::string strategy_id;
  std::string message;
  std::optional<SkipCounts> skipped;
};

enum class BreakdownLabel { None, IrrelevantResponse, IgnoredQuestion, UnclearIntent };

std::string_view to_string(BreakdownLabel label) noexcept;

// Word lists consulted by classify_breakdown. All lowercase, normalized.
struct BreakdownCues {
  std::set<std::string, std::less<>> question_words;
  std::set<std::string, std::less<>> acknowledgments;
  // First word of a trailing tag ("isn't it?") that makes a '?' rhetorical.
  std::set<std::string, std::less<>> tag_heads;
  std::set<std::string, std::less<>> tag_subjects;
  // Single-word tags such as "right?".
  std::set<std::string, std::less<>> tag_words;
  // Words ignored when looking for a content token shared with the question.
  std::set<std::string, std::less<>> function_words;

  static BreakdownCues defaults();
};

struct BreakdownEvidence {
  bool question = false;
  bool tag_question = false;
  bool acknowledgment_only = false;
  bool shares_content_token = false;
  std::optional<double> similarity;
  double relevance_threshold = 0.0;
};

struct BreakdownResult {
  BreakdownLabel label = BreakdownLabel::None;
  BreakdownEvidence evidence;
};

class SemanticOracle {
 public:
  explicit SemanticOracle(std::shared_ptr<ModelRegistry> models = std::make_shared<ModelRegistry>(),
                          BreakdownCues cues = BreakdownCues::defaults());

  // Throws DuplicateStrategyId.
  void register_strategy(SimilarityStrategy strategy);
  bool has_strategy(std::string_view id) const;

  ModelRegistry& models() noexcept { return *models_; }
  const BreakdownCues& cues() const noexcept { return cues_; }

  // Throws UnknownStrategy, UnknownModel and the encode errors.
  SimilarityScore score(const Utterance& a, const Utterance& b, const DialogContext& ctx) const;
  double similarity(const Utterance& a, const Utterance& b, const DialogContext& ctx) const {
    return score(a, b, ctx).value;
  }

  // passed == (score >= ctx.equivalence_threshold()). Oracle problems throw.
  Verdict assert_equivalent(const Utterance& actual, const Utterance& expected,
                            const DialogContext& ctx, std::string_view message = {}) const;

  // Rule cascade over the last user turn of `transcript`:
  //   1. question answered only with acknowledgments  -> UnclearIntent
  //   2. question, dissimilar, no shared content word  -> IgnoredQuestion
  //   3. dissimilar                                     -> IrrelevantResponse
  //   4. otherwise                                      -> None
  // "Dissimilar" means similarity < ctx.relevance_threshold().
  BreakdownResult classify_breakdown(const Transcript& transcript, const Utterance& response,
                                     const DialogContext& ctx) const;

  // Whether the utterance reads as a (non-tag) question under these cues.
  bool is_question(const Utterance& u) const;

 private:
  std::shared_ptr<ModelRegistry> models_;
  BreakdownCues cues_;
  mutable std::shared_mutex strategies_mutex_;
  std::map<std::string, SimilarityStrategy, std::less<>> strategies_;
};

struct StateMatcher {
  enum class Kind { Equals, Exists };
  Kind kind = Kind::Exists;
  Scalar value;

  static StateMatcher equals(Scalar v) { return {Kind::Equals, std::move(v)}; }
  static StateMatcher exists() { return {Kind::Exists, {}}; }
};

// Resolves a dot path in the state document. A missing path fails the
// verdict; only a malformed path throws.
Verdict assert_state(const StateDocument& state, std::string_view path,
                     const StateMatcher& matcher);

}  // namespace dialogtest
