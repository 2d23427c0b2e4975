#include "dialogtest/state_document.hpp"

#include <charconv>
#include <cmath>

#include "dialogtest/error.hpp"

namespace dialogtest {

Scalar parse_scalar(std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  std::string_view digits = text;
  if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
  if (!digits.empty()) {
    double value = 0.0;
    const char* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, value);
    if (ec == std::errc() && ptr == end && std::isfinite(value)) return value;
  }
  return std::string(text);
}

std::string to_string(const Scalar& value) {
  if (const bool* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  if (const double* d = std::get_if<double>(&value)) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, end);
  }
  return std::get<std::string>(value);
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> segments;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    std::string_view seg = path.substr(start, dot == std::string_view::npos ? dot : dot - start);
    if (seg.empty()) {
      throw Error(ErrorCode::MalformedPath, "empty segment in '" + std::string(path) + "'");
    }
    segments.emplace_back(seg);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return segments;
}

namespace {

bool is_prefix_path(std::string_view prefix, std::string_view path) {
  return path.size() > prefix.size() && path.substr(0, prefix.size()) == prefix &&
         path[prefix.size()] == '.';
}

}  // namespace

void StateDocument::set(std::string_view path, Scalar value) {
  split_path(path);
  std::string key(path);
  // Any ancestor that is already a leaf, or any existing descendant, clashes.
  for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', dot + 1)) {
    if (leaves_.count(key.substr(0, dot))) {
      throw Error(ErrorCode::MalformedState, "'" + key + "' is below leaf '" + key.substr(0, dot) + "'");
    }
  }
  auto next = leaves_.lower_bound(key + '.');
  if (next != leaves_.end() && is_prefix_path(key, next->first)) {
    throw Error(ErrorCode::MalformedState, "'" + key + "' already has children");
  }
  leaves_[std::move(key)] = std::move(value);
}

const Scalar* StateDocument::find_leaf(std::string_view path) const {
  auto it = leaves_.find(std::string(path));
  return it == leaves_.end() ? nullptr : &it->second;
}

bool StateDocument::contains(std::string_view path) const {
  if (find_leaf(path)) return true;
  auto it = leaves_.lower_bound(std::string(path) + '.');
  return it != leaves_.end() && is_prefix_path(path, it->first);
}

namespace {

void append_escaped(std::string& out, std::string_view text) {
  for (char c : text) {
    if (c == ';' || c == '=' || c == '\\') out += '\\';
    out += c;
  }
}

}  // namespace

std::string serialize_state(const StateDocument& doc) {
  std::string out;
  for (const auto& [path, value] : doc.leaves()) {
    if (!out.empty()) out += ';';
    append_escaped(out, path);
    out += '=';
    append_escaped(out, to_string(value));
  }
  return out;
}

StateDocument parse_state(std::string_view line) {
  StateDocument doc;
  std::string key, value;
  bool in_value = false;

  auto finish = [&] {
    if (!in_value) {
      if (key.empty()) return;  // tolerate a trailing ';'
      throw Error(ErrorCode::MalformedState, "entry '" + key + "' has no '='");
    }
    if (key.empty()) throw Error(ErrorCode::MalformedState, "entry with empty key");
    if (doc.find_leaf(key) != nullptr) throw Error(ErrorCode::MalformedState, "duplicate key '" + key + "'");
    try {
      doc.set(key, parse_scalar(value));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedState, e.what());
    }
    key.clear();
    value.clear();
    in_value = false;
  };

  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '\\') {
      if (i + 1 >= line.size()) throw Error(ErrorCode::MalformedState, "dangling escape");
      char next = line[++i];
      if (next != ';' && next != '=' && next != '\\') {
        throw Error(ErrorCode::MalformedState, std::string("unknown escape \\") + next);
      }
      (in_value ? value : key) += next;
    } else if (c == ';') {
      finish();
    } else if (c == '=') {
      if (in_value) throw Error(ErrorCode::MalformedState, "unescaped '=' in value of '" + key + "'");
      in_value = true;
    } else {
      (in_value ? value : key) += c;
    }
  }
  finish();
  return doc;
}

}  // namespace dialogtest
