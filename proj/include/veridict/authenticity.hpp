#pragma once

// Outlet authenticity: the score over predicted labels, fake/real fractions
// and the four-outcome verdict.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "veridict/error.hpp"
#include "veridict/label.hpp"

namespace veridict {

/// Predicted labels for the articles of one scanned site.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<Label> labels) : labels_(std::move(labels)) {
    for (Label l : labels_) ++(l == Label::Fake ? n_fake_ : n_real_);
  }

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t n_fake() const noexcept { return n_fake_; }
  std::size_t n_real() const noexcept { return n_real_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }

 private:
  std::vector<Label> labels_;
  std::size_t n_fake_ = 0;
  std::size_t n_real_ = 0;
};

/// Sum of encoded labels (FAKE = 0, REAL = 1) over the label count.
inline double authenticity_score(const LabelVector& labels) {
  if (labels.empty()) throw Error(ErrorKind::EmptyLabelColumn, "no labels to score");
  long sum = 0;
  for (Label l : labels.labels()) sum += encode(l);
  return static_cast<double>(sum) / static_cast<double>(labels.size());
}

inline double fake_fraction(const LabelVector& labels) {
  if (labels.empty()) throw Error(ErrorKind::EmptyLabelColumn, "no labels");
  return static_cast<double>(labels.n_fake()) / static_cast<double>(labels.size());
}

inline double real_fraction(const LabelVector& labels) {
  if (labels.empty()) throw Error(ErrorKind::EmptyLabelColumn, "no labels");
  return static_cast<double>(labels.n_real()) / static_cast<double>(labels.size());
}

enum class Verdict { AuthenticAll, UnreliableAll, Mixed, Empty };

inline constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::AuthenticAll: return "AuthenticAll";
    case Verdict::UnreliableAll: return "UnreliableAll";
    case Verdict::Mixed: return "Mixed";
    case Verdict::Empty: return "Empty";
  }
  return "";
}

struct VerdictBounds {
  double low = 0.25;
  double high = 0.75;
};

struct ArticleRef {
  std::string url;
  std::string title;
};

struct ArticleVerdict {
  std::string url;
  std::string title;
  Label predicted = Label::Fake;
  Label final_label = Label::Fake;
};

struct AuthenticityReport {
  std::optional<double> score;
  std::size_t n_articles = 0;
  double fake_fraction = 0.0;
  double real_fraction = 0.0;
  Verdict verdict = Verdict::Empty;
  std::vector<ArticleVerdict> per_article;
};

/// Verdict decision alone. The extreme branches are checked first, so a
/// score equal to a bound resolves to AuthenticAll / UnreliableAll.
inline Verdict verdict_for(std::optional<double> score, const VerdictBounds& bounds = {}) {
  if (!score) return Verdict::Empty;
  if (*score >= bounds.high) return Verdict::AuthenticAll;
  if (*score <= bounds.low) return Verdict::UnreliableAll;
  return Verdict::Mixed;
}

/// Scores a site. AuthenticAll forces every final label to REAL,
/// UnreliableAll forces FAKE, Mixed keeps each model prediction.
/// `articles` is optional metadata aligned with `labels`.
inline AuthenticityReport classify_outlet(const LabelVector& labels, const VerdictBounds& bounds = {},
                                          std::span<const ArticleRef> articles = {}) {
  if (!articles.empty() && articles.size() != labels.size()) {
    throw Error(ErrorKind::LengthMismatch, "article metadata and labels differ in length");
  }
  AuthenticityReport report;
  report.n_articles = labels.size();
  if (labels.empty()) return report;

  report.score = authenticity_score(labels);
  report.fake_fraction = fake_fraction(labels);
  report.real_fraction = real_fraction(labels);
  report.verdict = verdict_for(report.score, bounds);

  report.per_article.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ArticleVerdict a;
    if (!articles.empty()) {
      a.url = articles[i].url;
      a.title = articles[i].title;
    }
    a.predicted = labels.labels()[i];
    switch (report.verdict) {
      case Verdict::AuthenticAll: a.final_label = Label::Real; break;
      case Verdict::UnreliableAll: a.final_label = Label::Fake; break;
      default: a.final_label = a.predicted; break;
    }
    report.per_article.push_back(std::move(a));
  }
  return report;
}

}  // namespace veridict
