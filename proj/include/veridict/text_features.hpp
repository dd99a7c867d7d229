#pragma once

// Tokenization, word counting and TF-IDF featurization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "veridict/error.hpp"

namespace veridict {

namespace detail {

// Bytes >= 0x80 are UTF-8 sequence bytes; they stay inside words so that
// non-ASCII words are not shredded into fragments.
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace detail

/// Lowercased maximal alphanumeric runs of length >= 2, in order.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && !detail::is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < n && detail::is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i - start >= 2) {
      std::string token(text.substr(start, i - start));
      for (char& c : token) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      tokens.push_back(std::move(token));
    }
  }
  return tokens;
}

/// Number of maximal whitespace-delimited runs. Punctuation-only runs count.
inline std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char ch : text) {
    const bool space = detail::is_space_byte(static_cast<unsigned char>(ch));
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

struct VectorizerConfig {
  std::size_t min_df = 2;
  /// 0 means unlimited.
  std::size_t max_features = 50000;
};

/// Fitted term -> column mapping with document frequencies.
/// Columns are assigned in lexicographic term order.
class Vocabulary {
 public:
  Vocabulary() = default;

  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> document_frequency,
             std::size_t n_documents)
      : terms_(std::move(terms)), df_(std::move(document_frequency)), n_documents_(n_documents) {
    if (terms_.size() != df_.size()) {
      throw Error(ErrorKind::InvalidConfig, "vocabulary terms and df arrays differ in length");
    }
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (df_[i] == 0 || df_[i] > n_documents_) {
        throw Error(ErrorKind::InvalidConfig, "document frequency out of range for '" + terms_[i] + "'");
      }
      if (!index_.emplace(terms_[i], i).second) {
        throw Error(ErrorKind::InvalidConfig, "duplicate vocabulary term '" + terms_[i] + "'");
      }
    }
  }

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t n_documents() const noexcept { return n_documents_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& document_frequency() const noexcept { return df_; }

  /// Column index for a term, or -1 when out of vocabulary.
  std::ptrdiff_t index_of(std::string_view term) const {
    auto it = index_.find(std::string(term));
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
  }

  /// Smoothed inverse document frequency: ln((1 + n) / (1 + df)) + 1.
  double idf(std::size_t column) const {
    return std::log((1.0 + static_cast<double>(n_documents_)) / (1.0 + static_cast<double>(df_[column]))) + 1.0;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t n_documents_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sparse row-major (CSR) matrix of non-negative weights.
class FeatureMatrix {
 public:
  struct Entry {
    std::size_t col;
    double weight;
  };

  FeatureMatrix() : row_ptr_{0} {}
  explicit FeatureMatrix(std::size_t n_cols) : n_cols_(n_cols), row_ptr_{0} {}

  /// Appends a row. Entries must have strictly increasing columns and positive weights.
  void push_row(std::span<const Entry> entries) {
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (const auto& e : entries) {
      if (e.col >= n_cols_ || !(e.weight > 0.0) ||
          (prev != std::numeric_limits<std::size_t>::max() && e.col <= prev)) {
        throw Error(ErrorKind::InvalidConfig, "malformed sparse row");
      }
      prev = e.col;
      entries_.push_back(e);
    }
    row_ptr_.push_back(entries_.size());
  }

  std::size_t n_rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return entries_.size(); }

  std::span<const Entry> row(std::size_t r) const {
    return {entries_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  double squared_norm(std::size_t r) const {
    double s = 0.0;
    for (const auto& e : row(r)) s += e.weight * e.weight;
    return s;
  }

  /// Copy of selected rows, in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const {
    FeatureMatrix out(n_cols_);
    for (std::size_t r : rows) out.push_row(row(r));
    return out;
  }

  /// Row-major dense copy. Callers are responsible for budgeting the size.
  std::vector<double> densify() const {
    std::vector<double> dense(n_rows() * n_cols_, 0.0);
    for (std::size_t r = 0; r < n_rows(); ++r) {
      for (const auto& e : row(r)) dense[r * n_cols_ + e.col] = e.weight;
    }
    return dense;
  }

 private:
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<Entry> entries_;
};

inline double sparse_dot(std::span<const FeatureMatrix::Entry> row, std::span<const double> dense) {
  double s = 0.0;
  for (const auto& e : row) s += e.weight * dense[e.col];
  return s;
}

/// Keeps terms with df >= min_df, then the max_features highest-df terms
/// (ties broken lexicographically).
inline Vocabulary fit_vectorizer(std::span<const std::string> texts, const VectorizerConfig& config = {}) {
  if (texts.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot fit a vocabulary on zero documents");

  std::map<std::string, std::size_t> df;
  for (const auto& text : texts) {
    auto tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[std::move(t)];
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, count] : df) {
    if (count >= config.min_df) kept.emplace_back(term, count);
  }
  if (config.max_features != 0 && kept.size() > config.max_features) {
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    kept.resize(config.max_features);
    std::sort(kept.begin(), kept.end());
  }

  std::vector<std::string> terms;
  std::vector<std::size_t> freq;
  terms.reserve(kept.size());
  freq.reserve(kept.size());
  for (auto& [term, count] : kept) {
    terms.push_back(std::move(term));
    freq.push_back(count);
  }
  return Vocabulary(std::move(terms), std::move(freq), texts.size());
}

/// TF-IDF rows, L2-normalized; out-of-vocabulary terms are ignored.
inline FeatureMatrix transform(const Vocabulary& vocab, std::span<const std::string> texts) {
  FeatureMatrix out(vocab.size());
  std::vector<FeatureMatrix::Entry> row;
  std::map<std::size_t, std::size_t> counts;
  for (const auto& text : texts) {
    counts.clear();
    for (const auto& token : tokenize(text)) {
      const auto idx = vocab.index_of(token);
      if (idx >= 0) ++counts[static_cast<std::size_t>(idx)];
    }
    row.clear();
    double norm2 = 0.0;
    for (const auto& [col, tf] : counts) {
      const double w = static_cast<double>(tf) * vocab.idf(col);
      row.push_back({col, w});
      norm2 += w * w;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& e : row) e.weight *= inv;
    }
    out.push_row(row);
  }
  return out;
}

}  // namespace veridict
