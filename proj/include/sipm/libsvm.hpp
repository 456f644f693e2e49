#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "sipm/error.hpp"

namespace sipm {

/// One nonzero of a sparse row; index is 1-based as in the file format.
struct SparseEntry {
  std::size_t index = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Row-compressed binary classification data with raw label values.
struct SparseDataset {
  std::size_t n_features = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<SparseEntry> entries;
  std::vector<double> labels;

  std::size_t size() const noexcept { return labels.size(); }

  std::span<const SparseEntry> row(std::size_t i) const {
    return {entries.data() + row_offsets[i], row_offsets[i + 1] - row_offsets[i]};
  }

  std::vector<double> dense_row(std::size_t i) const {
    std::vector<double> out(n_features, 0.0);
    for (const SparseEntry& e : row(i)) out[e.index - 1] = e.value;
    return out;
  }

  void push_row(double label, std::span<const SparseEntry> row_entries) {
    labels.push_back(label);
    entries.insert(entries.end(), row_entries.begin(), row_entries.end());
    row_offsets.push_back(entries.size());
  }

  std::vector<double> distinct_labels() const {
    std::set<double> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
  }

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;
};

/// Maps the two raw label values to -1 (smaller) and +1 (larger).
struct LabelMap {
  double negative = -1.0;
  double positive = 1.0;

  static LabelMap from(const SparseDataset& data) {
    const auto values = data.distinct_labels();
    if (values.size() != 2) {
      throw Error(Errc::not_binary, "expected exactly two label values, found " +
                                        std::to_string(values.size()));
    }
    return {values[0], values[1]};
  }

  double apply(double raw) const {
    if (raw == negative) return -1.0;
    if (raw == positive) return 1.0;
    throw Error(Errc::label_mismatch, "label " + std::to_string(raw) +
                                          " is not in the training label set");
  }

  std::vector<double> apply(const SparseDataset& data) const {
    std::vector<double> y;
    y.reserve(data.size());
    for (double raw : data.labels) y.push_back(apply(raw));
    return y;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

inline bool parse_index(std::string_view tok, std::size_t& out) {
  if (tok.empty() || tok.front() == '-' || tok.front() == '+') return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace detail

/// Parses "label index:value ..." lines. Blank lines and lines starting with
/// '#' are skipped. n_features is the largest index seen unless overridden.
inline SparseDataset parse_libsvm(std::istream& in,
                                  std::optional<std::size_t> n_features = std::nullopt,
                                  bool require_binary = true) {
  SparseDataset data;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_index = 0;
  std::vector<SparseEntry> row;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;

    const auto malformed = [line_no](const std::string& why) {
      return Error(Errc::malformed_line, "line " + std::to_string(line_no) + ": " + why,
                   line_no);
    };

    row.clear();
    std::size_t pos = 0;
    bool first = true;
    double label = 0.0;
    while (pos < text.size()) {
      const auto end = text.find_first_of(" \t", pos);
      const std::string_view tok =
          text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
      pos = end == std::string_view::npos ? text.size() : text.find_first_not_of(" \t", end);
      if (pos == std::string_view::npos) pos = text.size();

      if (first) {
        if (!detail::parse_double(tok, label)) {
          throw malformed("label '" + std::string(tok) + "' is not numeric");
        }
        first = false;
        continue;
      }
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw malformed("token '" + std::string(tok) + "' has no colon");
      }
      SparseEntry e;
      if (!detail::parse_index(tok.substr(0, colon), e.index) || e.index == 0) {
        throw malformed("index in '" + std::string(tok) + "' is not a positive integer");
      }
      if (!detail::parse_double(tok.substr(colon + 1), e.value)) {
        throw malformed("value in '" + std::string(tok) + "' is not numeric");
      }
      if (!row.empty() && e.index <= row.back().index) {
        throw Error(Errc::non_increasing_index,
                    "line " + std::to_string(line_no) + ": index " +
                        std::to_string(e.index) + " does not increase",
                    line_no);
      }
      if (n_features && e.index > *n_features) {
        throw malformed("index " + std::to_string(e.index) + " exceeds n_features");
      }
      max_index = std::max(max_index, e.index);
      row.push_back(e);
    }
    data.push_row(label, row);
  }
  data.n_features = n_features.value_or(max_index);
  if (require_binary && data.distinct_labels().size() != 2) {
    throw Error(Errc::not_binary, "expected exactly two label values, found " +
                                      std::to_string(data.distinct_labels().size()));
  }
  return data;
}

/// Writes the dataset back out; values use round-trip precision.
inline void write_libsvm(std::ostream& out, const SparseDataset& data) {
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", data.labels[i]);
    out << buf;
    for (const SparseEntry& e : data.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", e.value);
      out << ' ' << e.index << ':' << buf;
    }
    out << '\n';
  }
}

struct AlignedData {
  SparseDataset train;
  SparseDataset test;
  LabelMap labels;
};

/// Widens both datasets to the larger feature count and fixes the label map
/// on the training set.
inline AlignedData align_feature_space(SparseDataset train, SparseDataset test) {
  AlignedData out;
  out.labels = LabelMap::from(train);
  for (double raw : test.distinct_labels()) {
    if (raw != out.labels.negative && raw != out.labels.positive) {
      throw Error(Errc::label_mismatch, "test label " + std::to_string(raw) +
                                            " does not occur in the training data");
    }
  }
  const std::size_t n = std::max(train.n_features, test.n_features);
  train.n_features = n;
  test.n_features = n;
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

}  // namespace sipm
