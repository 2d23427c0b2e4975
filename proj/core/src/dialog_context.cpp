#include "dialogtest/dialog_context.hpp"

#include <charconv>
#include <cmath>

#include "dialogtest/error.hpp"

namespace dialogtest {

namespace {

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void check_threshold(double t) {
  if (!(t >= -1.0 && t <= 1.0)) throw Error(ErrorCode::InvalidThreshold, number(t));
}

}  // namespace

ContextBuilder::ContextBuilder(const DialogContext& base)
    : model_id_(base.model_id()),
      strategy_id_(base.strategy_id()),
      equivalence_threshold_(base.equivalence_threshold()),
      relevance_threshold_(base.relevance_threshold()),
      words_per_second_(base.words_per_second()),
      allow_confirmations_(base.allow_confirmations()),
      wake_phrase_(base.wake_phrase()),
      dataset_paths_(base.dataset_paths()),
      max_turns_(static_cast<long long>(base.max_turns())) {}

ContextBuilder& ContextBuilder::with_model(std::string id) {
  model_id_ = std::move(id);
  return *this;
}

ContextBuilder& ContextBuilder::with_strategy(std::string id) {
  strategy_id_ = std::move(id);
  return *this;
}

ContextBuilder& ContextBuilder::with_threshold(double t) {
  equivalence_threshold_ = t;
  return *this;
}

ContextBuilder& ContextBuilder::with_relevance_threshold(double t) {
  relevance_threshold_ = t;
  return *this;
}

ContextBuilder& ContextBuilder::with_words_per_second(double w) {
  words_per_second_ = w;
  return *this;
}

ContextBuilder& ContextBuilder::with_confirmations(bool allow) {
  allow_confirmations_ = allow;
  return *this;
}

ContextBuilder& ContextBuilder::with_wake_phrase(std::string phrase) {
  wake_phrase_ = std::move(phrase);
  return *this;
}

ContextBuilder& ContextBuilder::with_dataset(std::string id, std::filesystem::path path) {
  dataset_paths_[std::move(id)] = std::move(path);
  return *this;
}

ContextBuilder& ContextBuilder::with_max_turns(long long n) {
  max_turns_ = n;
  return *this;
}

DialogContext ContextBuilder::build() const {
  if (!model_id_ || model_id_->empty()) throw Error(ErrorCode::MissingModel, "no model id set");
  DialogContext ctx;
  ctx.model_id_ = *model_id_;
  if (strategy_id_) ctx.strategy_id_ = *strategy_id_;
  if (equivalence_threshold_) {
    check_threshold(*equivalence_threshold_);
    ctx.equivalence_threshold_ = *equivalence_threshold_;
  }
  if (relevance_threshold_) {
    check_threshold(*relevance_threshold_);
    ctx.relevance_threshold_ = *relevance_threshold_;
  }
  if (words_per_second_) {
    if (!(*words_per_second_ > 0.0) || !std::isfinite(*words_per_second_)) {
      throw Error(ErrorCode::InvalidRate, number(*words_per_second_));
    }
    ctx.words_per_second_ = *words_per_second_;
  }
  if (allow_confirmations_) ctx.allow_confirmations_ = *allow_confirmations_;
  ctx.wake_phrase_ = wake_phrase_;
  ctx.dataset_paths_ = dataset_paths_;
  if (max_turns_) {
    if (*max_turns_ < 1) throw Error(ErrorCode::InvalidMaxTurns, std::to_string(*max_turns_));
    ctx.max_turns_ = static_cast<std::size_t>(*max_turns_);
  }
  return ctx;
}

void ContextOverrides::apply_to(ContextBuilder& b) const {
  if (model_id) b.with_model(*model_id);
  if (strategy_id) b.with_strategy(*strategy_id);
  if (equivalence_threshold) b.with_threshold(*equivalence_threshold);
  if (relevance_threshold) b.with_relevance_threshold(*relevance_threshold);
  if (words_per_second) b.with_words_per_second(*words_per_second);
  if (allow_confirmations) b.with_confirmations(*allow_confirmations);
  if (wake_phrase) b.with_wake_phrase(*wake_phrase);
  for (const auto& [id, path] : dataset_paths) b.with_dataset(id, path);
  if (max_turns) b.with_max_turns(*max_turns);
}

bool ContextOverrides::empty() const { return *this == ContextOverrides{}; }

}  // namespace dialogtest
