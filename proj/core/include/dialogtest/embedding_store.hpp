#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dialogtest {

// Dense real vector with at least one component, all finite.
class Vector {
 public:
  explicit Vector(std::vector<double> components);
  Vector(std::initializer_list<double> components);

  std::size_t dim() const noexcept { return components_.size(); }
  std::span<const double> components() const noexcept { return components_; }
  double operator[](std::size_t i) const { return components_[i]; }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> components_;
};

enum class ModelFormat { W2vText, GloveText };

std::string_view to_string(ModelFormat format) noexcept;
// Accepts "w2v-text" / "glove-text"; throws std::invalid_argument otherwise.
ModelFormat parse_model_format(std::string_view text);

// Immutable token -> vector table. Tokens are stored byte-for-byte as read.
class WordVectorModel {
 public:
  WordVectorModel(std::string name, std::size_t dim,
                  std::vector<std::pair<std::string, Vector>> rows);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  // Rows dropped because their token had already been seen.
  std::size_t duplicate_count() const noexcept { return duplicates_; }

  // nullptr when the token is out of vocabulary.
  const Vector* lookup(std::string_view token) const;

  // Tokens in first-seen file order.
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::string name_;
  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Vector, Hash, std::equal_to<>> entries_;
  std::size_t duplicates_ = 0;
};

// Loads a text-format model. The model name defaults to the file stem.
WordVectorModel load_model(const std::filesystem::path& path, ModelFormat format,
                           std::string name = {});
WordVectorModel parse_model(std::istream& in, ModelFormat format, std::string name);

// Guesses the format from the first line: two integers means w2v-text.
ModelFormat detect_format(const std::filesystem::path& path);

// Writes entries sorted by token using shortest round-trip number formatting.
void write_model(std::ostream& out, const WordVectorModel& model, ModelFormat format);

Vector average(std::span<const Vector> vectors);

inline constexpr double kZeroMagnitude = 1e-12;

// Cosine similarity clamped to [-1, 1].
double cosine(const Vector& a, const Vector& b);

}  // namespace dialogtest
