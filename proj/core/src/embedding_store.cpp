#include "dialogtest/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "dialogtest/error.hpp"

namespace dialogtest {

namespace {

void check_components(const std::vector<double>& components) {
  if (components.empty()) {
    throw Error(ErrorCode::InvalidVector, "vector must have at least one component");
  }
  for (double c : components) {
    if (!std::isfinite(c)) {
      throw Error(ErrorCode::InvalidVector, "vector component is not finite");
    }
  }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_double(std::string_view text, double& out) {
  // from_chars rejects a leading '+', which some exporters emit.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_size(std::string_view text, std::size_t& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

void append_number(std::string& out, double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

}  // namespace

Vector::Vector(std::vector<double> components) : components_(std::move(components)) {
  check_components(components_);
}

Vector::Vector(std::initializer_list<double> components) : components_(components) {
  check_components(components_);
}

std::string_view to_string(ModelFormat format) noexcept {
  return format == ModelFormat::W2vText ? "w2v-text" : "glove-text";
}

ModelFormat parse_model_format(std::string_view text) {
  if (text == "w2v-text") return ModelFormat::W2vText;
  if (text == "glove-text") return ModelFormat::GloveText;
  throw std::invalid_argument("unknown model format: " + std::string(text));
}

WordVectorModel::WordVectorModel(std::string name, std::size_t dim,
                                 std::vector<std::pair<std::string, Vector>> rows)
    : name_(std::move(name)), dim_(dim) {
  if (rows.empty()) throw Error(ErrorCode::EmptyModel, name_);
  entries_.reserve(rows.size());
  tokens_.reserve(rows.size());
  for (auto& [token, vec] : rows) {
    if (vec.dim() != dim_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "row '" + token + "' has " + std::to_string(vec.dim()) +
                      " components, expected " + std::to_string(dim_));
    }
    auto [it, inserted] = entries_.try_emplace(token, std::move(vec));
    if (inserted) {
      tokens_.push_back(token);
    } else {
      ++duplicates_;
    }
  }
}

const Vector* WordVectorModel::lookup(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

WordVectorModel parse_model(std::istream& in, ModelFormat format, std::string name) {
  std::vector<std::pair<std::string, Vector>> rows;
  std::size_t dim = 0;
  std::size_t expected_rows = 0;
  std::size_t data_rows = 0;
  std::size_t line_no = 0;
  std::string line;

  if (format == ModelFormat::W2vText) {
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyModel, "missing header");
    ++line_no;
    auto header = split_fields(line);
    if (header.size() != 2 || !parse_size(header[0], expected_rows) ||
        !parse_size(header[1], dim) || dim == 0) {
      throw Error(ErrorCode::MalformedLine, "expected header 'count dim'", line_no);
    }
    rows.reserve(std::min<std::size_t>(expected_rows, 1u << 20));
  }

  std::vector<double> components;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw Error(ErrorCode::MalformedLine, "token without components", line_no);
    }
    components.clear();
    components.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double value = 0.0;
      if (!parse_double(fields[i], value)) {
        throw Error(ErrorCode::MalformedLine,
                    "non-numeric component '" + std::string(fields[i]) + "'", line_no);
      }
      components.push_back(value);
    }
    if (dim == 0) dim = components.size();
    if (components.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  std::to_string(components.size()) + " components, expected " +
                      std::to_string(dim),
                  line_no);
    }
    ++data_rows;
    if (format == ModelFormat::W2vText && data_rows > expected_rows) {
      throw Error(ErrorCode::MalformedLine, "more rows than the header count", line_no);
    }
    rows.emplace_back(std::string(fields[0]), Vector(components));
  }

  if (format == ModelFormat::W2vText && data_rows != expected_rows) {
    throw Error(ErrorCode::MalformedLine,
                "header announced " + std::to_string(expected_rows) + " rows, found " +
                    std::to_string(data_rows),
                line_no);
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyModel, name);
  return WordVectorModel(std::move(name), dim, std::move(rows));
}

WordVectorModel load_model(const std::filesystem::path& path, ModelFormat format,
                           std::string name) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileUnreadable, path.string());
  if (name.empty()) name = path.stem().string();
  return parse_model(in, format, std::move(name));
}

ModelFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileUnreadable, path.string());
  std::string line;
  std::getline(in, line);
  auto fields = split_fields(line);
  std::size_t a = 0, b = 0;
  if (fields.size() == 2 && parse_size(fields[0], a) && parse_size(fields[1], b)) {
    return ModelFormat::W2vText;
  }
  return ModelFormat::GloveText;
}

void write_model(std::ostream& out, const WordVectorModel& model, ModelFormat format) {
  std::vector<std::string> sorted = model.tokens();
  std::sort(sorted.begin(), sorted.end());
  if (format == ModelFormat::W2vText) {
    out << sorted.size() << ' ' << model.dim() << '\n';
  }
  std::string line;
  for (const auto& token : sorted) {
    line = token;
    for (double c : model.lookup(token)->components()) {
      line += ' ';
      append_number(line, c);
    }
    line += '\n';
    out << line;
  }
}

Vector average(std::span<const Vector> vectors) {
  if (vectors.empty()) throw Error(ErrorCode::EmptyInput, "average of no vectors");
  const std::size_t dim = vectors.front().dim();
  // Neumaier-compensated sums keep the mean order-independent to ~1 ulp.
  std::vector<double> sum(dim, 0.0);
  std::vector<double> carry(dim, 0.0);
  for (const auto& v : vectors) {
    if (v.dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  std::to_string(v.dim()) + " vs " + std::to_string(dim));
    }
    auto c = v.components();
    for (std::size_t i = 0; i < dim; ++i) {
      const double t = sum[i] + c[i];
      carry[i] += std::abs(sum[i]) >= std::abs(c[i]) ? (sum[i] - t) + c[i]
                                                     : (c[i] - t) + sum[i];
      sum[i] = t;
    }
  }
  const double n = static_cast<double>(vectors.size());
  for (std::size_t i = 0; i < dim; ++i) sum[i] = (sum[i] + carry[i]) / n;
  return Vector(std::move(sum));
}

double cosine(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  auto x = a.components();
  auto y = b.components();
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (std::sqrt(xx) < kZeroMagnitude) throw Error(ErrorCode::ZeroVector, "first argument", 0);
  if (std::sqrt(yy) < kZeroMagnitude) throw Error(ErrorCode::ZeroVector, "second argument", 1);
  // sqrt(xx * yy) rather than sqrt(xx) * sqrt(yy): for a == b this is exactly
  // dot, so self-similarity is exactly 1.
  double result = dot / std::sqrt(xx * yy);
  return std::clamp(result, -1.0, 1.0);
}

}  // namespace dialogtest
