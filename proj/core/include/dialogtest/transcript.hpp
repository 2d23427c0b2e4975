#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "dialogtest/utterance.hpp"

namespace dialogtest {

struct Exchange {
  Utterance user;
  Utterance agent;
  std::chrono::nanoseconds latency{0};
  std::size_t index = 0;
};

// Append-only record of one session: strict user -> agent alternation.
class Transcript {
 public:
  Transcript() = default;
  explicit Transcript(std::string session_id) : session_id_(std::move(session_id)) {}

  const std::string& session_id() const noexcept { return session_id_; }
  const std::vector<Exchange>& exchanges() const noexcept { return exchanges_; }
  std::size_t size() const noexcept { return exchanges_.size(); }
  bool empty() const noexcept { return exchanges_.empty(); }

  // Assigns the next index and returns the stored exchange.
  const Exchange& append(Utterance user, Utterance agent, std::chrono::nanoseconds latency) {
    exchanges_.push_back(Exchange{std::move(user), std::move(agent), latency, exchanges_.size()});
    return exchanges_.back();
  }

 private:
  std::string session_id_;
  std::vector<Exchange> exchanges_;
};

}  // namespace dialogtest
