#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <span>
#include <vector>

#include "veridict/classifiers.hpp"
#include "veridict/error.hpp"
#include "veridict/label.hpp"

namespace veridict {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvaluationReport {
  AlgorithmId algorithm = AlgorithmId::LR;
  double accuracy = 0.0;
  /// Indexed by encoded label: [0] FAKE, [1] REAL.
  std::array<ClassMetrics, 2> per_class{};
  /// confusion[true][predicted], FAKE before REAL.
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  /// Set when a precision or recall denominator was zero and the value defaulted to 0.
  bool zero_division = false;

  std::size_t total() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
  }
  const ClassMetrics& metrics(Label l) const { return per_class[static_cast<std::size_t>(encode(l))]; }
};

inline EvaluationReport evaluate(std::span<const Label> y_true, std::span<const Label> y_pred, AlgorithmId algorithm) {
  if (y_true.size() != y_pred.size()) throw Error(ErrorKind::LengthMismatch, "y_true and y_pred differ in length");
  if (y_true.empty()) throw Error(ErrorKind::EmptyInput, "nothing to evaluate");

  EvaluationReport r;
  r.algorithm = algorithm;
  for (std::size_t i = 0; i < y_true.size(); ++i) ++r.confusion[encode(y_true[i])][encode(y_pred[i])];

  const double n = static_cast<double>(y_true.size());
  r.accuracy = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / n;
  for (int c = 0; c < 2; ++c) {
    const std::size_t tp = r.confusion[c][c];
    const std::size_t predicted = r.confusion[0][c] + r.confusion[1][c];
    const std::size_t actual = r.confusion[c][0] + r.confusion[c][1];
    auto& m = r.per_class[c];
    m.support = actual;
    if (predicted > 0) m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    else r.zero_division = true;
    if (actual > 0) m.recall = static_cast<double>(tp) / static_cast<double>(actual);
    else r.zero_division = true;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  }
  return r;
}

struct AccuracyStats {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::map<AlgorithmId, double> per_model;
};

inline AccuracyStats accuracy_stats(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::EmptyInput, "no evaluation reports");
  AccuracyStats s;
  std::vector<double> acc;
  acc.reserve(reports.size());
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    s.per_model[r.algorithm] = r.accuracy;
  }
  double sum = 0.0;
  for (double a : acc) sum += a;
  s.mean = sum / static_cast<double>(acc.size());
  std::sort(acc.begin(), acc.end());
  const std::size_t n = acc.size();
  s.median = n % 2 == 1 ? acc[n / 2] : 0.5 * (acc[n / 2 - 1] + acc[n / 2]);
  s.min = acc.front();
  s.max = acc.back();
  // Rounding in the mean can step outside [min, max] by an ulp.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

/// Highest accuracy; ties go to the earlier AlgorithmId.
inline AlgorithmId select_best_fit(const AccuracyStats& stats) {
  if (stats.per_model.empty()) throw Error(ErrorKind::EmptyInput, "no per-model accuracies");
  // std::map iterates in declaration order, so the first strict maximum wins.
  auto best = stats.per_model.begin();
  for (auto it = stats.per_model.begin(); it != stats.per_model.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

}  // namespace veridict
