#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace dialogtest {

inline constexpr const char* kDefaultStrategy = "avg-embedding-cosine";

// Bound test-environment parameters. Immutable; obtain one from
// ContextBuilder::build().
class DialogContext {
 public:
  const std::string& model_id() const noexcept { return model_id_; }
  const std::string& strategy_id() const noexcept { return strategy_id_; }
  double equivalence_threshold() const noexcept { return equivalence_threshold_; }
  double relevance_threshold() const noexcept { return relevance_threshold_; }
  // Pacing metadata for adapters; never affects oracle results.
  double words_per_second() const noexcept { return words_per_second_; }
  bool allow_confirmations() const noexcept { return allow_confirmations_; }
  const std::optional<std::string>& wake_phrase() const noexcept { return wake_phrase_; }
  const std::map<std::string, std::filesystem::path>& dataset_paths() const noexcept {
    return dataset_paths_;
  }
  std::size_t max_turns() const noexcept { return max_turns_; }

  friend bool operator==(const DialogContext&, const DialogContext&) = default;

 private:
  friend class ContextBuilder;
  DialogContext() = default;

  std::string model_id_;
  std::string strategy_id_ = kDefaultStrategy;
  double equivalence_threshold_ = 0.5;
  double relevance_threshold_ = 0.3;
  double words_per_second_ = 2.5;
  bool allow_confirmations_ = true;
  std::optional<std::string> wake_phrase_;
  std::map<std::string, std::filesystem::path> dataset_paths_;
  std::size_t max_turns_ = 50;
};

class ContextBuilder {
 public:
  ContextBuilder() = default;
  // Starts from every field of an existing context.
  explicit ContextBuilder(const DialogContext& base);

  ContextBuilder& with_model(std::string id);
  ContextBuilder& with_strategy(std::string id);
  ContextBuilder& with_threshold(double t);
  ContextBuilder& with_relevance_threshold(double t);
  ContextBuilder& with_words_per_second(double w);
  ContextBuilder& with_confirmations(bool allow);
  ContextBuilder& with_wake_phrase(std::string phrase);
  ContextBuilder& with_dataset(std::string id, std::filesystem::path path);
  ContextBuilder& with_max_turns(long long n);

  // Fills defaults and validates. Throws MissingModel, InvalidThreshold,
  // InvalidRate or InvalidMaxTurns.
  DialogContext build() const;

 private:
  std::optional<std::string> model_id_;
  std::optional<std::string> strategy_id_;
  std::optional<double> equivalence_threshold_;
  std::optional<double> relevance_threshold_;
  std::optional<double> words_per_second_;
  std::optional<bool> allow_confirmations_;
  std::optional<std::string> wake_phrase_;
  std::map<std::string, std::filesystem::path> dataset_paths_;
  std::optional<long long> max_turns_;
};

inline ContextBuilder builder() { return ContextBuilder{}; }

// Partial set of context fields, as written in suite files or given on the
// command line. Unset fields leave the builder untouched.
struct ContextOverrides {
  std::optional<std::string> model_id;
  std::optional<std::string> strategy_id;
  std::optional<double> equivalence_threshold;
  std::optional<double> relevance_threshold;
  std::optional<double> words_per_second;
  std::optional<bool> allow_confirmations;
  std::optional<std::string> wake_phrase;
  std::map<std::string, std::filesystem::path> dataset_paths;
  std::optional<long long> max_turns;

  void apply_to(ContextBuilder& b) const;
  bool empty() const;

  friend bool operator==(const ContextOverrides&, const ContextOverrides&) = default;
};

}  // namespace dialogtest
