#pragma once

// The seven text classifiers behind one fit/predict contract, and the
// capability gate that decides which of them can handle a representation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "veridict/error.hpp"
#include "veridict/label.hpp"
#include "veridict/random.hpp"
#include "veridict/text_features.hpp"

namespace veridict {

/// Declaration order is fixed and used for every tie-break.
enum class AlgorithmId : int { LR = 0, LDA, KN, CART, NB, SVM, PAC };

inline constexpr std::array<AlgorithmId, 7> kAllAlgorithms{
    AlgorithmId::LR, AlgorithmId::LDA, AlgorithmId::KN, AlgorithmId::CART,
    AlgorithmId::NB, AlgorithmId::SVM, AlgorithmId::PAC};

inline constexpr std::string_view to_string(AlgorithmId id) noexcept {
  constexpr std::array<std::string_view, 7> names{"LR", "LDA", "KN", "CART", "NB", "SVM", "PAC"};
  return names[static_cast<std::size_t>(id)];
}

/// Case-insensitive.
inline std::optional<AlgorithmId> parse_algorithm(std::string_view s) {
  for (auto id : kAllAlgorithms) {
    const auto name = to_string(id);
    if (name.size() == s.size() && std::equal(name.begin(), name.end(), s.begin(), [](char a, char b) {
          return a == (b >= 'a' && b <= 'z' ? static_cast<char>(b - 'a' + 'A') : b);
        })) {
      return id;
    }
  }
  return std::nullopt;
}

inline constexpr std::string_view long_name(AlgorithmId id) noexcept {
  switch (id) {
    case AlgorithmId::LR: return "Logistic Regression";
    case AlgorithmId::LDA: return "Linear Discriminant Analysis";
    case AlgorithmId::KN: return "KNeighbors Classifier";
    case AlgorithmId::CART: return "Decision Tree Classifier";
    case AlgorithmId::NB: return "Gaussian Naive Bayes";
    case AlgorithmId::SVM: return "Support Vector Machine";
    case AlgorithmId::PAC: return "Passive Aggressive Classifier";
  }
  return "";
}

/// Memory budget for algorithms that need a dense copy of the features.
struct ResourceBudget {
  /// Largest number of dense double cells an algorithm may materialize.
  std::size_t max_dense_cells = 1'000'000;
  /// Row count the real training run will use; the capability probe is
  /// smaller than the training set, so the estimate uses max(probe, planned).
  std::size_t planned_rows = 0;
};

struct Hyperparams {
  struct {
    double learning_rate = 0.1;
    int epochs = 100;
    double l2 = 1e-4;
  } lr;
  struct {
    /// Ridge added to the pooled covariance, relative to its mean diagonal.
    double shrinkage = 1e-3;
  } lda;
  struct {
    std::size_t k = 5;
  } kn;
  struct {
    /// 0 means unlimited.
    std::size_t max_depth = 64;
    std::size_t min_samples_split = 2;
  } cart;
  struct {
    double var_smoothing = 1e-9;
  } nb;
  struct {
    double c = 1.0;
    int epochs = 50;
  } svm;
  struct {
    double c = 1.0;
    int epochs = 5;
  } pac;
  ResourceBudget budget;
  /// Algorithms the operator switched off; fit rejects them as incompatible.
  std::set<AlgorithmId> disabled;
};

/// Dense cells an algorithm must allocate for rows x cols features, or
/// nullopt when it works on the sparse rows directly.
inline std::optional<std::size_t> dense_cells_required(AlgorithmId id, std::size_t rows, std::size_t cols) {
  switch (id) {
    case AlgorithmId::LDA: return rows * cols + cols * cols;
    case AlgorithmId::NB:
    case AlgorithmId::SVM: return rows * cols;
    default: return std::nullopt;
  }
}

// Fitted parameter sets.

/// w.x + b > 0 predicts REAL. Used by LR, LDA, SVM and PAC.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
};

struct KnnModel {
  std::size_t k = 5;
  FeatureMatrix train;
  std::vector<Label> labels;
};

struct TreeModel {
  struct Node {
    /// -1 for leaves.
    std::int64_t feature = -1;
    double threshold = 0.0;
    std::int64_t left = -1;
    std::int64_t right = -1;
    Label label = Label::Fake;
  };
  std::vector<Node> nodes;  // nodes[0] is the root
};

struct GaussianNbModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> var;
};

using ModelParams = std::variant<LinearModel, KnnModel, TreeModel, GaussianNbModel>;

class TrainedModel {
 public:
  TrainedModel(AlgorithmId algorithm, std::size_t n_features, ModelParams params)
      : algorithm_(algorithm), n_features_(n_features), params_(std::move(params)) {}

  AlgorithmId algorithm() const noexcept { return algorithm_; }
  std::size_t n_features() const noexcept { return n_features_; }
  const ModelParams& params() const noexcept { return params_; }

 private:
  AlgorithmId algorithm_;
  std::size_t n_features_;
  ModelParams params_;
};

namespace detail {

inline double sign_of(Label l) { return l == Label::Real ? 1.0 : -1.0; }

inline Label from_score(double score) { return score > 0.0 ? Label::Real : Label::Fake; }

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline LinearModel fit_logistic(const FeatureMatrix& x, std::span<const Label> y, const Hyperparams& hp,
                                std::uint64_t seed) {
  const std::size_t d = x.n_cols();
  std::vector<double> v(d, 0.0);
  double scale = 1.0;  // weights = scale * v, so L2 decay stays O(1) per step
  double bias = 0.0;
  const double eta = hp.lr.learning_rate;
  const double decay = 1.0 - eta * hp.lr.l2;
  Rng rng(seed);
  auto order = iota_indices(x.n_rows());
  for (int epoch = 0; epoch < hp.lr.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      const auto row = x.row(i);
      const double z = scale * sparse_dot(row, v) + bias;
      const double target = y[i] == Label::Real ? 1.0 : 0.0;
      const double g = sigmoid(z) - target;
      scale *= decay;
      const double step = eta * g / scale;
      for (const auto& e : row) v[e.col] -= step * e.weight;
      bias -= eta * g;
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
    }
  }
  for (double& w : v) w *= scale;
  return {std::move(v), bias};
}

/// Solves A x = b in place for symmetric positive definite A (row-major n x n).
inline std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0)) throw Error(ErrorKind::IncompatibleInput, "covariance is not positive definite");
    const double ljj = std::sqrt(diag);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
    b[ii] = s / a[ii * n + ii];
  }
  return b;
}

inline LinearModel fit_lda(const FeatureMatrix& x, std::span<const Label> y, const Hyperparams& hp) {
  const std::size_t n = x.n_rows(), d = x.n_cols();
  const auto dense = x.densify();
  std::array<std::vector<double>, 2> mean{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  std::array<double, 2> count{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = encode(y[i]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) mean[c][j] += dense[i * d + j];
  }
  for (int c = 0; c < 2; ++c) {
    for (double& m : mean[c]) m /= count[c];
  }

  std::vector<double> cov(d * d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = mean[encode(y[i])];
    for (std::size_t j = 0; j < d; ++j) centered[j] = dense[i * d + j] - m[j];
    for (std::size_t a = 0; a < d; ++a) {
      const double ca = centered[a];
      if (ca == 0.0) continue;
      for (std::size_t b = 0; b <= a; ++b) cov[a * d + b] += ca * centered[b];
    }
  }
  const double denom = std::max<double>(1.0, static_cast<double>(n) - 2.0);
  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      cov[a * d + b] /= denom;
      cov[b * d + a] = cov[a * d + b];
    }
    trace += cov[a * d + a];
  }
  const double ridge = hp.lda.shrinkage * (trace / static_cast<double>(std::max<std::size_t>(d, 1))) + 1e-10;
  for (std::size_t a = 0; a < d; ++a) cov[a * d + a] += ridge;

  std::vector<double> diff(d);
  for (std::size_t j = 0; j < d; ++j) diff[j] = mean[1][j] - mean[0][j];
  auto w = cholesky_solve(std::move(cov), std::move(diff), d);
  double mid = 0.0;
  for (std::size_t j = 0; j < d; ++j) mid += w[j] * 0.5 * (mean[0][j] + mean[1][j]);
  const double bias = -mid + std::log(count[1] / count[0]);
  return {std::move(w), bias};
}

inline GaussianNbModel fit_gaussian_nb(const FeatureMatrix& x, std::span<const Label> y, const Hyperparams& hp) {
  const std::size_t n = x.n_rows(), d = x.n_cols();
  const auto dense = x.densify();
  GaussianNbModel m;
  std::array<double, 2> count{0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    m.mean[c].assign(d, 0.0);
    m.var[c].assign(d, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int c = encode(y[i]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) m.mean[c][j] += dense[i * d + j];
  }
  for (int c = 0; c < 2; ++c) {
    for (double& v : m.mean[c]) v /= count[c];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int c = encode(y[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const double t = dense[i * d + j] - m.mean[c][j];
      m.var[c][j] += t * t;
    }
  }
  // Smoothing is relative to the largest per-feature variance of the whole set.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += dense[i * d + j];
    mu /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (dense[i * d + j] - mu) * (dense[i * d + j] - mu);
    max_var = std::max(max_var, v / static_cast<double>(n));
  }
  const double epsilon = std::max(hp.nb.var_smoothing * max_var, 1e-300);
  for (int c = 0; c < 2; ++c) {
    for (double& v : m.var[c]) v = v / count[c] + epsilon;
    m.log_prior[c] = std::log(count[c] / static_cast<double>(n));
  }
  return m;
}

/// Pegasos-style subgradient descent on the regularized hinge loss over a
/// dense copy of the rows. The bias is an extra constant feature.
inline LinearModel fit_linear_svm(const FeatureMatrix& x, std::span<const Label> y, const Hyperparams& hp,
                                  std::uint64_t seed) {
  const std::size_t n = x.n_rows(), d = x.n_cols();
  const auto dense = x.densify();
  const double lambda = 1.0 / (hp.svm.c * static_cast<double>(n));
  std::vector<double> w(d + 1, 0.0);
  Rng rng(seed);
  auto order = iota_indices(n);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < hp.svm.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double* xi = dense.data() + i * d;
      double score = w[d];
      for (std::size_t j = 0; j < d; ++j) score += w[j] * xi[j];
      const double yi = sign_of(y[i]);
      const double shrink = 1.0 - eta * lambda;
      for (double& wj : w) wj *= shrink;
      if (yi * score < 1.0) {
        for (std::size_t j = 0; j < d; ++j) w[j] += eta * yi * xi[j];
        w[d] += eta * yi;
      }
      double norm2 = 0.0;
      for (double wj : w) norm2 += wj * wj;
      const double radius2 = 1.0 / lambda;
      if (norm2 > radius2) {
        const double f = std::sqrt(radius2 / norm2);
        for (double& wj : w) wj *= f;
      }
    }
  }
  const double bias = w[d];
  w.pop_back();
  return {std::move(w), bias};
}

struct SplitCandidate {
  double impurity = 0.0;
  std::size_t feature = 0;
  double threshold = 0.0;
};

inline double gini(double c0, double c1) {
  const double n = c0 + c1;
  if (n == 0.0) return 0.0;
  const double p0 = c0 / n, p1 = c1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

/// Best Gini split of the given rows; ties resolved by lowest feature, then
/// lowest threshold. Rows missing a feature hold an implicit zero.
inline std::optional<SplitCandidate> best_split(const FeatureMatrix& x, std::span<const Label> y,
                                                std::span<const std::size_t> rows) {
  struct Triple {
    std::size_t feature;
    double value;
    int label;
  };
  std::vector<Triple> triples;
  std::array<double, 2> total{0.0, 0.0};
  for (std::size_t r : rows) {
    total[encode(y[r])] += 1.0;
    for (const auto& e : x.row(r)) triples.push_back({e.col, e.weight, encode(y[r])});
  }
  std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.feature, a.value) < std::tie(b.feature, b.value);
  });

  const double n = total[0] + total[1];
  std::optional<SplitCandidate> best;
  auto consider = [&](std::size_t feature, double threshold, const std::array<double, 2>& left) {
    const double nl = left[0] + left[1];
    const double nr = n - nl;
    if (nl == 0.0 || nr == 0.0) return;
    const double imp = (nl * gini(left[0], left[1]) + nr * gini(total[0] - left[0], total[1] - left[1])) / n;
    if (!best || imp < best->impurity) best = SplitCandidate{imp, feature, threshold};
  };

  std::size_t g = 0;
  while (g < triples.size()) {
    const std::size_t feature = triples[g].feature;
    std::size_t end = g;
    std::array<double, 2> nz{0.0, 0.0};
    while (end < triples.size() && triples[end].feature == feature) {
      nz[triples[end].label] += 1.0;
      ++end;
    }
    // The zero block sits left of every stored (positive) value.
    std::array<double, 2> left{total[0] - nz[0], total[1] - nz[1]};
    double prev = 0.0;
    bool have_prev = left[0] + left[1] > 0.0;
    for (std::size_t i = g; i < end;) {
      const double value = triples[i].value;
      if (have_prev) consider(feature, 0.5 * (prev + value), left);
      while (i < end && triples[i].value == value) {
        left[triples[i].label] += 1.0;
        ++i;
      }
      prev = value;
      have_prev = true;
    }
    g = end;
  }
  return best;
}

inline TreeModel fit_tree(const FeatureMatrix& x, std::span<const Label> y, const Hyperparams& hp) {
  TreeModel tree;
  struct Work {
    std::size_t node;
    std::size_t depth;
    std::vector<std::size_t> rows;
  };
  std::vector<Work> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, 0, iota_indices(x.n_rows())});
  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();
    std::array<std::size_t, 2> counts{0, 0};
    for (std::size_t r : work.rows) ++counts[encode(y[r])];
    tree.nodes[work.node].label = counts[1] > counts[0] ? Label::Real : Label::Fake;

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool depth_capped = hp.cart.max_depth != 0 && work.depth >= hp.cart.max_depth;
    if (pure || depth_capped || work.rows.size() < std::max<std::size_t>(hp.cart.min_samples_split, 2)) continue;

    const auto split = best_split(x, y, work.rows);
    if (!split) continue;

    std::vector<std::size_t> left, right;
    for (std::size_t r : work.rows) {
      double v = 0.0;
      const auto row = x.row(r);
      auto it = std::lower_bound(row.begin(), row.end(), split->feature,
                                 [](const FeatureMatrix::Entry& e, std::size_t f) { return e.col < f; });
      if (it != row.end() && it->col == split->feature) v = it->weight;
      (v <= split->threshold ? left : right).push_back(r);
    }
    const auto left_id = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[work.node];
    node.feature = static_cast<std::int64_t>(split->feature);
    node.threshold = split->threshold;
    node.left = static_cast<std::int64_t>(left_id);
    node.right = static_cast<std::int64_t>(left_id + 1);
    // Right pushed first so the left subtree is grown first.
    stack.push_back({left_id + 1, work.depth + 1, std::move(right)});
    stack.push_back({left_id, work.depth + 1, std::move(left)});
  }
  return tree;
}

inline double feature_value(std::span<const FeatureMatrix::Entry> row, std::size_t feature) {
  auto it = std::lower_bound(row.begin(), row.end(), feature,
                             [](const FeatureMatrix::Entry& e, std::size_t f) { return e.col < f; });
  return (it != row.end() && it->col == feature) ? it->weight : 0.0;
}

}  // namespace detail

/// One PA-I step on example (x, y) with an implicit constant bias feature.
/// Returns the step size tau = min(C, loss / (|x|^2 + 1)), 0 when the margin is met.
inline double pa1_update(LinearModel& model, std::span<const FeatureMatrix::Entry> x, Label y, double c) {
  const double yi = detail::sign_of(y);
  const double margin = yi * (sparse_dot(x, model.weights) + model.bias);
  const double loss = std::max(0.0, 1.0 - margin);
  if (loss == 0.0) return 0.0;
  double norm2 = 1.0;
  for (const auto& e : x) norm2 += e.weight * e.weight;
  const double tau = std::min(c, loss / norm2);
  for (const auto& e : x) model.weights[e.col] += tau * yi * e.weight;
  model.bias += tau * yi;
  return tau;
}

namespace detail {

inline LinearModel fit_passive_aggressive(const FeatureMatrix& x, std::span<const Label> y, const Hyperparams& hp,
                                          std::uint64_t seed) {
  LinearModel model{std::vector<double>(x.n_cols(), 0.0), 0.0};
  Rng rng(seed);
  auto order = iota_indices(x.n_rows());
  for (int epoch = 0; epoch < hp.pac.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) pa1_update(model, x.row(i), y[i], hp.pac.c);
  }
  return model;
}

}  // namespace detail

/// Trains one classifier. Throws IncompatibleInput when the algorithm is
/// disabled or its dense footprint exceeds the budget, DegenerateLabels when
/// only one class is present.
inline TrainedModel fit(AlgorithmId algorithm, const FeatureMatrix& features, std::span<const Label> labels,
                        const Hyperparams& hp = {}, std::uint64_t seed = 0) {
  if (features.n_rows() != labels.size()) {
    throw Error(ErrorKind::LengthMismatch, "feature rows and labels differ in length");
  }
  if (hp.disabled.contains(algorithm)) {
    throw Error(ErrorKind::IncompatibleInput, std::string(to_string(algorithm)) + " is disabled by configuration");
  }
  if (const auto cells = dense_cells_required(
          algorithm, std::max(features.n_rows(), hp.budget.planned_rows), features.n_cols())) {
    if (*cells > hp.budget.max_dense_cells) {
      throw Error(ErrorKind::IncompatibleInput,
                  std::string(to_string(algorithm)) + " needs " + std::to_string(*cells) +
                      " dense cells, budget is " + std::to_string(hp.budget.max_dense_cells));
    }
  }
  if (labels.size() < 2) throw Error(ErrorKind::DegenerateLabels, "need at least two labeled rows");
  const bool has_fake = std::find(labels.begin(), labels.end(), Label::Fake) != labels.end();
  const bool has_real = std::find(labels.begin(), labels.end(), Label::Real) != labels.end();
  if (!has_fake || !has_real) throw Error(ErrorKind::DegenerateLabels, "training labels contain a single class");

  const std::size_t d = features.n_cols();
  switch (algorithm) {
    case AlgorithmId::LR:
      return {algorithm, d, detail::fit_logistic(features, labels, hp, seed)};
    case AlgorithmId::LDA:
      return {algorithm, d, detail::fit_lda(features, labels, hp)};
    case AlgorithmId::KN: {
      const std::size_t k = hp.kn.k == 0 ? 1 : hp.kn.k;
      return {algorithm, d, KnnModel{k, features, std::vector<Label>(labels.begin(), labels.end())}};
    }
    case AlgorithmId::CART:
      return {algorithm, d, detail::fit_tree(features, labels, hp)};
    case AlgorithmId::NB:
      return {algorithm, d, detail::fit_gaussian_nb(features, labels, hp)};
    case AlgorithmId::SVM:
      return {algorithm, d, detail::fit_linear_svm(features, labels, hp, seed)};
    case AlgorithmId::PAC:
      return {algorithm, d, detail::fit_passive_aggressive(features, labels, hp, seed)};
  }
  throw Error(ErrorKind::InvalidConfig, "unknown algorithm");
}

namespace detail {

inline std::vector<Label> predict_knn(const KnnModel& m, const FeatureMatrix& x) {
  const std::size_t n_train = m.train.n_rows();
  // Inverted index over training columns for sparse dot products.
  std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, double>>> postings;
  std::vector<double> train_norm2(n_train);
  for (std::size_t r = 0; r < n_train; ++r) {
    train_norm2[r] = m.train.squared_norm(r);
    for (const auto& e : m.train.row(r)) postings[e.col].emplace_back(r, e.weight);
  }
  const std::size_t k = std::min(m.k, n_train);
  std::vector<double> dots(n_train);
  std::vector<std::pair<double, std::size_t>> dist(n_train);
  std::vector<Label> out;
  out.reserve(x.n_rows());
  for (std::size_t q = 0; q < x.n_rows(); ++q) {
    std::fill(dots.begin(), dots.end(), 0.0);
    for (const auto& e : x.row(q)) {
      auto it = postings.find(e.col);
      if (it == postings.end()) continue;
      for (const auto& [r, w] : it->second) dots[r] += w * e.weight;
    }
    const double qn = x.squared_norm(q);
    for (std::size_t r = 0; r < n_train; ++r) {
      dist[r] = {std::max(0.0, qn + train_norm2[r] - 2.0 * dots[r]), r};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::size_t real_votes = 0;
    for (std::size_t i = 0; i < k; ++i) real_votes += m.labels[dist[i].second] == Label::Real;
    const std::size_t fake_votes = k - real_votes;
    if (real_votes == fake_votes) {
      out.push_back(m.labels[dist[0].second]);
    } else {
      out.push_back(real_votes > fake_votes ? Label::Real : Label::Fake);
    }
  }
  return out;
}

inline Label predict_tree_row(const TreeModel& m, std::span<const FeatureMatrix::Entry> row) {
  std::size_t node = 0;
  while (m.nodes[node].feature >= 0) {
    const auto& n = m.nodes[node];
    node = static_cast<std::size_t>(
        feature_value(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right);
  }
  return m.nodes[node].label;
}

inline Label predict_nb_row(const GaussianNbModel& m, std::span<const FeatureMatrix::Entry> row,
                            const std::array<double, 2>& base) {
  std::array<double, 2> score{};
  for (int c = 0; c < 2; ++c) {
    double s = base[c];
    for (const auto& e : row) {
      const double mu = m.mean[c][e.col], v = m.var[c][e.col];
      s -= 0.5 * (e.weight * e.weight - 2.0 * e.weight * mu) / v;
    }
    score[c] = s;
  }
  return score[1] > score[0] ? Label::Real : Label::Fake;
}

}  // namespace detail

/// One label per row. Throws DimensionMismatch on a width mismatch.
inline std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& features) {
  if (features.n_cols() != model.n_features()) {
    throw Error(ErrorKind::DimensionMismatch, "model expects " + std::to_string(model.n_features()) +
                                                  " features, got " + std::to_string(features.n_cols()));
  }
  std::vector<Label> out;
  out.reserve(features.n_rows());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          for (std::size_t r = 0; r < features.n_rows(); ++r) {
            out.push_back(detail::from_score(sparse_dot(features.row(r), p.weights) + p.bias));
          }
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          out = detail::predict_knn(p, features);
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          for (std::size_t r = 0; r < features.n_rows(); ++r) out.push_back(detail::predict_tree_row(p, features.row(r)));
        } else {
          std::array<double, 2> base{};
          for (int c = 0; c < 2; ++c) {
            double s = p.log_prior[c];
            for (std::size_t j = 0; j < p.mean[c].size(); ++j) {
              const double mu = p.mean[c][j], v = p.var[c][j];
              s -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + mu * mu / v);
            }
            base[c] = s;
          }
          for (std::size_t r = 0; r < features.n_rows(); ++r) out.push_back(detail::predict_nb_row(p, features.row(r), base));
        }
      },
      model.params());
  return out;
}

struct CapabilityReport {
  std::vector<AlgorithmId> selected;
  std::vector<std::pair<AlgorithmId, std::string>> rejected;

  bool is_selected(AlgorithmId id) const {
    return std::find(selected.begin(), selected.end(), id) != selected.end();
  }
};

/// Default probe size for the capability gate.
inline constexpr std::size_t kProbeRows = 200;

/// Trial-fits all seven algorithms on a labeled probe. IncompatibleInput
/// rejects an algorithm; every other algorithm is selected.
inline CapabilityReport capability_gate(const FeatureMatrix& probe, std::span<const Label> labels,
                                        const Hyperparams& hp = {}, std::uint64_t seed = 0) {
  CapabilityReport report;
  for (auto id : kAllAlgorithms) {
    try {
      (void)fit(id, probe, labels, hp, seed);
      report.selected.push_back(id);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IncompatibleInput) throw;
      report.rejected.emplace_back(id, e.what());
    }
  }
  if (report.selected.empty()) {
    throw Error(ErrorKind::NoCapableAlgorithm, "no algorithm can fit the offered representation");
  }
  return report;
}

}  // namespace veridict
