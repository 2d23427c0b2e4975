#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dialogtest {

using Scalar = std::variant<bool, double, std::string>;

// "true"/"false" -> bool, a full decimal number -> double, else text.
Scalar parse_scalar(std::string_view text);
std::string to_string(const Scalar& value);

// Splits a dot path into segments; throws MalformedPath on an empty segment.
std::vector<std::string> split_path(std::string_view path);

// Tree of string-keyed nodes with scalar leaves, stored by full dot path.
// A path is either a leaf or an interior node, never both.
class StateDocument {
 public:
  // Throws MalformedPath for bad paths and MalformedState when the path
  // collides with an existing leaf or subtree.
  void set(std::string_view path, Scalar value);

  const Scalar* find_leaf(std::string_view path) const;
  // True for leaves and interior nodes alike.
  bool contains(std::string_view path) const;

  bool empty() const noexcept { return leaves_.empty(); }
  const std::map<std::string, Scalar>& leaves() const noexcept { return leaves_; }

  friend bool operator==(const StateDocument&, const StateDocument&) = default;

 private:
  std::map<std::string, Scalar> leaves_;
};

// Single-line wire form: `a.b=v;a.c=w`, with `\;`, `\=` and `\\` escapes.
std::string serialize_state(const StateDocument& doc);
// Throws MalformedState.
StateDocument parse_state(std::string_view line);

}  // namespace dialogtest
