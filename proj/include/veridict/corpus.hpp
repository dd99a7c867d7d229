#pragma once

// Labeled news dataset: schema, cleanup, CSV persistence, splitting, appends.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "veridict/csv.hpp"
#include "veridict/error.hpp"
#include "veridict/label.hpp"
#include "veridict/random.hpp"
#include "veridict/text_features.hpp"

namespace veridict {

using RecordId = std::uint64_t;

/// Where a record came from. Not part of the CSV schema; kept for audits.
struct Origin {
  enum class Kind { SeedCorpus, Ingested, Predicted };
  Kind kind = Kind::SeedCorpus;
  std::string url;

  static Origin seed() { return {}; }
  static Origin ingested(std::string u) { return {Kind::Ingested, std::move(u)}; }
  static Origin predicted(std::string u) { return {Kind::Predicted, std::move(u)}; }

  std::string to_string() const {
    switch (kind) {
      case Kind::Ingested: return "ingested:" + url;
      case Kind::Predicted: return "predicted:" + url;
      case Kind::SeedCorpus: break;
    }
    return "seed";
  }

  static Origin parse(std::string_view s) {
    if (s.starts_with("ingested:")) return ingested(std::string(s.substr(9)));
    if (s.starts_with("predicted:")) return predicted(std::string(s.substr(10)));
    return seed();
  }

  friend bool operator==(const Origin&, const Origin&) = default;
};

/// One article. word_count is always derived from text.
class NewsRecord {
 public:
  NewsRecord(RecordId id, std::string title, std::string text, std::optional<Label> label,
             Origin origin = Origin::seed())
      : id_(id),
        word_count_(veridict::word_count(text)),
        title_(std::move(title)),
        text_(std::move(text)),
        label_(label),
        origin_(std::move(origin)) {}

  RecordId id() const noexcept { return id_; }
  std::size_t word_count() const noexcept { return word_count_; }
  const std::string& title() const noexcept { return title_; }
  const std::string& text() const noexcept { return text_; }
  std::optional<Label> label() const noexcept { return label_; }
  const Origin& origin() const noexcept { return origin_; }

  NewsRecord with_id(RecordId id) const {
    NewsRecord copy = *this;
    copy.id_ = id;
    return copy;
  }

  /// Title and body joined by one space: the document fed to the vectorizer.
  std::string document() const { return title_ + " " + text_; }

  friend bool operator==(const NewsRecord&, const NewsRecord&) = default;

 private:
  RecordId id_;
  std::size_t word_count_;
  std::string title_;
  std::string text_;
  std::optional<Label> label_;
  Origin origin_;
};

/// Ordered collection of records with unique ids.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<NewsRecord> records) : records_(std::move(records)) {
    std::unordered_set<RecordId> seen;
    seen.reserve(records_.size());
    for (const auto& r : records_) {
      if (!seen.insert(r.id()).second) {
        throw Error(ErrorKind::DuplicateId, "record id " + std::to_string(r.id()) + " appears twice");
      }
    }
  }

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::vector<NewsRecord>& records() const noexcept { return records_; }
  const NewsRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  std::vector<std::string> documents() const {
    std::vector<std::string> docs;
    docs.reserve(records_.size());
    for (const auto& r : records_) docs.push_back(r.document());
    return docs;
  }

  /// Labels of a fully labeled dataset.
  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(records_.size());
    for (const auto& r : records_) {
      if (!r.label()) throw Error(ErrorKind::UnlabeledRecord, "record " + std::to_string(r.id()) + " has no label");
      out.push_back(*r.label());
    }
    return out;
  }

  std::size_t count(Label label) const {
    return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(),
                                                  [&](const NewsRecord& r) { return r.label() == label; }));
  }

  RecordId next_free_id() const {
    RecordId next = 0;
    for (const auto& r : records_) next = std::max(next, r.id() + 1);
    return next;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<NewsRecord> records_;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  double ratio = 0.8;
};

namespace detail {

inline bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

inline std::string lower_trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  s = s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::optional<RecordId> parse_id(std::string_view s) {
  const std::string t = lower_trim(s);
  if (t.empty() || t.size() > 19) return std::nullopt;
  RecordId v = 0;
  for (char c : t) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<RecordId>(c - '0');
  }
  return v;
}

}  // namespace detail

/// Keeps records with non-blank text and, when require_labels is set, a label.
/// Order is preserved.
inline Dataset clean(const Dataset& dataset, bool require_labels = true) {
  std::vector<NewsRecord> kept;
  kept.reserve(dataset.size());
  for (const auto& r : dataset) {
    if (detail::blank(r.text())) continue;
    if (require_labels && !r.label()) continue;
    kept.push_back(r);
  }
  return Dataset(std::move(kept));
}

inline const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header{"id", "word_count", "title", "text", "label", "origin"};
  return header;
}

/// Loads and cleans a CSV corpus. Requires title, text and label columns;
/// the id comes from an `id` (or pandas `Unnamed: 0`) column when present.
inline Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto rows = csv::parse(buffer.str());
  if (rows.empty()) throw Error(ErrorKind::MalformedHeader, path.string() + " has no header row");

  const auto& header = rows.front();
  std::optional<std::size_t> id_col, title_col, text_col, label_col, origin_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = detail::lower_trim(header[i]);
    if (name == "title") title_col = i;
    else if (name == "text") text_col = i;
    else if (name == "label") label_col = i;
    else if (name == "origin") origin_col = i;
    else if (!id_col && (name == "id" || name == "unnamed: 0" || (name.empty() && i == 0))) id_col = i;
  }
  if (!title_col || !text_col || !label_col) {
    throw Error(ErrorKind::MalformedHeader, path.string() + " must name title, text and label columns");
  }

  struct Raw {
    std::optional<RecordId> id;
    std::string title, text;
    std::optional<Label> label;
    Origin origin;
  };
  std::vector<Raw> raws;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) continue;  // mismatched columns
    Raw raw;
    if (id_col) raw.id = detail::parse_id(row[*id_col]);
    raw.title = row[*title_col];
    raw.text = row[*text_col];
    raw.label = parse_label(row[*label_col]);
    if (origin_col) raw.origin = Origin::parse(row[*origin_col]);
    raws.push_back(std::move(raw));
  }

  std::vector<NewsRecord> records;
  records.reserve(raws.size());
  if (!id_col) {
    for (std::size_t i = 0; i < raws.size(); ++i) {
      records.emplace_back(i, std::move(raws[i].title), std::move(raws[i].text), raws[i].label,
                           std::move(raws[i].origin));
    }
  } else {
    std::unordered_set<RecordId> used;
    RecordId next = 0;
    for (const auto& raw : raws) {
      if (raw.id) next = std::max(next, *raw.id + 1);
    }
    for (auto& raw : raws) {
      RecordId id;
      if (raw.id && !used.contains(*raw.id)) {
        id = *raw.id;
      } else {
        id = next++;
      }
      used.insert(id);
      records.emplace_back(id, std::move(raw.title), std::move(raw.text), raw.label, std::move(raw.origin));
    }
  }

  Dataset cleaned = clean(Dataset(std::move(records)));
  if (cleaned.empty()) throw Error(ErrorKind::EmptyDataset, path.string() + " has no valid rows");
  return cleaned;
}

inline void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::string out;
  csv::append_row(out, csv_header());
  for (const auto& r : dataset) {
    csv::append_row(out, {std::to_string(r.id()), std::to_string(r.word_count()), r.title(), r.text(),
                          r.label() ? std::string(to_string(*r.label())) : std::string(),
                          r.origin().to_string()});
  }
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::IoFailure, "cannot write " + tmp);
    file << out;
    if (!file.flush()) throw Error(ErrorKind::IoFailure, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot replace " + path.string() + ": " + ec.message());
}

/// Seeded Fisher-Yates shuffle, then the first floor(ratio * n) records train.
inline SplitPair split(const Dataset& dataset, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorKind::InvalidRatio, "ratio must lie in (0, 1)");
  const std::size_t n = dataset.size();
  if (n < 2) throw Error(ErrorKind::DatasetTooSmall, "need at least 2 records to split");

  auto order = iota_indices(n);
  Rng rng(seed);
  rng.shuffle(order);
  // The relative nudge keeps products such as 0.8 * 6335 from landing one ulp under an integer.
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) * (1.0 + 1e-12)));

  std::vector<NewsRecord> train, test;
  train.reserve(n_train);
  test.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).push_back(dataset[order[i]]);
  }
  return {Dataset(std::move(train)), Dataset(std::move(test)), seed, ratio};
}

/// Appends labeled records; ids colliding with existing ones are reassigned.
inline Dataset append_records(const Dataset& dataset, std::span<const NewsRecord> incoming) {
  std::vector<NewsRecord> records = dataset.records();
  std::unordered_set<RecordId> used;
  for (const auto& r : records) used.insert(r.id());
  RecordId next = dataset.next_free_id();
  for (const auto& r : incoming) next = std::max(next, r.id() + 1);

  for (const auto& r : incoming) {
    if (!r.label()) throw Error(ErrorKind::UnlabeledRecord, "cannot append unlabeled record " + std::to_string(r.id()));
  }
  for (const auto& r : incoming) {
    if (used.contains(r.id())) {
      records.push_back(r.with_id(next));
      used.insert(next++);
    } else {
      records.push_back(r);
      used.insert(r.id());
    }
  }
  return Dataset(std::move(records));
}

}  // namespace veridict
