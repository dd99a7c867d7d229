#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "support/synthetic.hpp"
#include "veridict/classifiers.hpp"
#include "veridict/evaluation.hpp"

using namespace veridict;

namespace {

struct Split {
  FeatureMatrix x_train, x_test;
  std::vector<Label> y_train, y_test;
};

Split synthetic_split(std::size_t n, fixtures::SyntheticSpec spec) {
  fixtures::SyntheticWriter w(spec);
  const auto p = split(w.corpus(n), 0.8, 5);
  const auto vocab = fit_vectorizer(p.train.documents());
  return {transform(vocab, p.train.documents()), transform(vocab, p.test.documents()), p.train.labels(),
          p.test.labels()};
}

double accuracy(std::span<const Label> a, std::span<const Label> b) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
  return static_cast<double>(hit) / static_cast<double>(a.size());
}

FeatureMatrix from_dense(const std::vector<std::vector<double>>& rows, std::size_t cols) {
  FeatureMatrix m(cols);
  for (const auto& r : rows) {
    std::vector<FeatureMatrix::Entry> e;
    for (std::size_t c = 0; c < cols; ++c) {
      if (r[c] != 0.0) e.push_back({c, r[c]});
    }
    m.push_row(e);
  }
  return m;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no veridict::Error thrown";
  return ErrorKind::IoFailure;
}

}  // namespace

TEST(Algorithms, NamesRoundTrip) {
  for (auto id : kAllAlgorithms) EXPECT_EQ(parse_algorithm(to_string(id)), id);
  EXPECT_EQ(parse_algorithm("pac"), AlgorithmId::PAC);
  EXPECT_FALSE(parse_algorithm("RF"));
}

TEST(Classifiers, AllSevenSeparateTwoVocabularies) {
  const auto s = synthetic_split(300, {.class_vocab = 80, .shared_vocab = 40, .seed = 21});
  for (auto id : kAllAlgorithms) {
    const auto model = fit(id, s.x_train, s.y_train, {}, 1);
    EXPECT_GE(accuracy(predict(model, s.x_test), s.y_test), 0.95) << to_string(id);
  }
}

TEST(Classifiers, FixedSeedIsBitDeterministic) {
  const auto s = synthetic_split(200, {.seed = 4});
  for (auto id : kAllAlgorithms) {
    const auto a = fit(id, s.x_train, s.y_train, {}, 99);
    const auto b = fit(id, s.x_train, s.y_train, {}, 99);
    EXPECT_EQ(predict(a, s.x_test), predict(b, s.x_test)) << to_string(id);
    if (const auto* la = std::get_if<LinearModel>(&a.params())) {
      const auto& lb = std::get<LinearModel>(b.params());
      EXPECT_EQ(la->weights, lb.weights) << to_string(id);
      EXPECT_EQ(la->bias, lb.bias) << to_string(id);
    }
  }
}

TEST(Cart, DistinctRowsAreFitExactly) {
  fixtures::SyntheticWriter w({.class_vocab = 40, .shared_vocab = 40, .class_fraction = 0.3, .seed = 8});
  const auto d = w.corpus(150);
  const auto vocab = fit_vectorizer(d.documents());
  const auto x = transform(vocab, d.documents());
  const auto y = d.labels();
  Hyperparams hp;
  hp.cart.max_depth = 0;
  const auto model = fit(AlgorithmId::CART, x, y, hp);
  EXPECT_EQ(predict(model, x), y);
}

// Brute force: every feature, every midpoint between consecutive distinct values
// (implicit zeros included), weighted Gini, lowest (impurity, feature, threshold).
TEST(Cart, BestSplitMatchesExhaustiveSearch) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(12), d = 1 + rng.uniform_index(5);
    std::vector<std::vector<double>> dense(n, std::vector<double>(d, 0.0));
    std::vector<Label> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform_index(2) ? Label::Real : Label::Fake;
      for (std::size_t j = 0; j < d; ++j) {
        if (rng.uniform_index(2)) dense[i][j] = static_cast<double>(1 + rng.uniform_index(3));
      }
    }
    const auto x = from_dense(dense, d);
    const auto rows = iota_indices(n);

    std::optional<detail::SplitCandidate> want;
    for (std::size_t j = 0; j < d; ++j) {
      std::set<double> values;
      for (const auto& r : dense) values.insert(r[j]);
      std::vector<double> v(values.begin(), values.end());
      for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double t = 0.5 * (v[k] + v[k + 1]);
        std::array<double, 2> l{0, 0}, r{0, 0};
        for (std::size_t i = 0; i < n; ++i) (dense[i][j] <= t ? l : r)[encode(y[i])] += 1.0;
        const double nl = l[0] + l[1], nr = r[0] + r[1];
        const double imp = (nl * detail::gini(l[0], l[1]) + nr * detail::gini(r[0], r[1])) / static_cast<double>(n);
        if (!want || imp < want->impurity) want = detail::SplitCandidate{imp, j, t};
      }
    }
    const auto got = detail::best_split(x, y, rows);
    ASSERT_EQ(got.has_value(), want.has_value()) << trial;
    if (!got) continue;
    EXPECT_NEAR(got->impurity, want->impurity, 1e-12) << trial;
    EXPECT_EQ(got->feature, want->feature) << trial;
    EXPECT_EQ(got->threshold, want->threshold) << trial;
  }
}

// A PA-I step that is not clipped by C lands exactly on margin 1.
TEST(PassiveAggressive, UnclippedStepReachesUnitMargin) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 1 + rng.uniform_index(6);
    LinearModel m{std::vector<double>(d), rng.uniform01() - 0.5};
    for (auto& w : m.weights) w = rng.uniform01() * 2 - 1;
    std::vector<FeatureMatrix::Entry> x;
    for (std::size_t j = 0; j < d; ++j) {
      if (rng.uniform_index(3)) x.push_back({j, 0.1 + rng.uniform01()});
    }
    const Label y = rng.uniform_index(2) ? Label::Real : Label::Fake;
    const double sy = y == Label::Real ? 1.0 : -1.0;
    const double c = rng.uniform_index(2) ? 1e9 : 0.05;
    const double before = sy * (sparse_dot(x, m.weights) + m.bias);
    const double tau = pa1_update(m, x, y, c);
    const double after = sy * (sparse_dot(x, m.weights) + m.bias);
    if (before >= 1.0) {
      EXPECT_EQ(tau, 0.0);
      EXPECT_EQ(after, before);
    } else if (tau < c) {
      EXPECT_NEAR(after, 1.0, 1e-9);
    } else {
      EXPECT_GT(after, before);
      EXPECT_LE(after, 1.0 + 1e-9);
    }
    EXPECT_GE(tau, 0.0);
    EXPECT_LE(tau, c);
  }
}

TEST(Knn, MajorityOfNearestAndTieToNearest) {
  // One feature; training points at 0.1 .. 0.4 (REAL) and 0.9 (FAKE).
  const auto train = from_dense({{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}}, 2);
  const std::vector<Label> y{Label::Real, Label::Fake, Label::Fake, Label::Real};
  Hyperparams hp;
  hp.kn.k = 3;
  const auto m = fit(AlgorithmId::KN, train, y, hp);
  const auto q = from_dense({{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}}, 2);
  const auto p = predict(m, q);
  EXPECT_EQ(p[0], Label::Real);
  EXPECT_EQ(p[1], Label::Fake);
  // All four training points are equidistant from the origin; the three
  // nearest by index are rows 0,1,2 -> FAKE majority.
  EXPECT_EQ(p[2], Label::Fake);

  hp.kn.k = 2;  // rows 0,1 tie 1-1 -> nearest (row 0) wins
  EXPECT_EQ(predict(fit(AlgorithmId::KN, train, y, hp), q)[2], Label::Real);
}

TEST(Classifiers, ErrorKinds) {
  const auto x = from_dense({{1, 0}, {0, 1}, {1, 1}}, 2);
  const std::vector<Label> two{Label::Real, Label::Fake};
  const std::vector<Label> same{Label::Real, Label::Real, Label::Real};
  const std::vector<Label> ok{Label::Real, Label::Fake, Label::Real};
  EXPECT_EQ(kind_of([&] { fit(AlgorithmId::LR, x, two); }), ErrorKind::LengthMismatch);
  for (auto id : kAllAlgorithms) EXPECT_EQ(kind_of([&] { fit(id, x, same); }), ErrorKind::DegenerateLabels);
  Hyperparams off;
  off.disabled = {AlgorithmId::KN};
  EXPECT_EQ(kind_of([&] { fit(AlgorithmId::KN, x, ok, off); }), ErrorKind::IncompatibleInput);
  const auto m = fit(AlgorithmId::PAC, x, ok);
  const auto wide = from_dense({{1, 0, 0}}, 3);
  for (auto id : kAllAlgorithms) {
    EXPECT_EQ(kind_of([&] { predict(fit(id, x, ok), wide); }), ErrorKind::DimensionMismatch) << to_string(id);
  }
  (void)m;
}

TEST(Capability, DenseCellsRequired) {
  EXPECT_EQ(dense_cells_required(AlgorithmId::LDA, 10, 20), 10u * 20 + 20 * 20);
  EXPECT_EQ(dense_cells_required(AlgorithmId::NB, 10, 20), 200u);
  EXPECT_EQ(dense_cells_required(AlgorithmId::SVM, 10, 20), 200u);
  for (auto id : {AlgorithmId::LR, AlgorithmId::KN, AlgorithmId::CART, AlgorithmId::PAC}) {
    EXPECT_FALSE(dense_cells_required(id, 1000000, 1000000));
  }
}

TEST(Capability, SmallFeatureSpaceSelectsAll) {
  const auto s = synthetic_split(100, {.class_vocab = 30, .shared_vocab = 10});
  const auto report = capability_gate(s.x_train, s.y_train);
  EXPECT_EQ(report.selected.size(), 7u);
  EXPECT_TRUE(report.rejected.empty());
}

TEST(Capability, BudgetRejectsDensifyingAlgorithms) {
  const auto s = synthetic_split(100, {.class_vocab = 30, .shared_vocab = 10});
  Hyperparams hp;
  hp.budget.max_dense_cells = s.x_train.n_cols();  // not even one row's worth of LDA
  hp.budget.planned_rows = 10'000;
  const auto report = capability_gate(s.x_train, s.y_train, hp);
  EXPECT_EQ(report.selected, (std::vector<AlgorithmId>{AlgorithmId::LR, AlgorithmId::KN, AlgorithmId::CART,
                                                       AlgorithmId::PAC}));
  std::vector<AlgorithmId> rejected;
  for (const auto& [id, why] : report.rejected) {
    rejected.push_back(id);
    EXPECT_FALSE(why.empty());
  }
  EXPECT_EQ(rejected, (std::vector<AlgorithmId>{AlgorithmId::LDA, AlgorithmId::NB, AlgorithmId::SVM}));
}

TEST(Capability, PlannedRowsDriveTheEstimate) {
  const auto s = synthetic_split(100, {.class_vocab = 30, .shared_vocab = 10});
  Hyperparams hp;
  const std::size_t cols = s.x_train.n_cols();
  hp.budget.max_dense_cells = 50 * cols;  // NB/SVM fit 50 rows
  hp.budget.planned_rows = 0;
  EXPECT_TRUE(capability_gate(s.x_train.select_rows(iota_indices(20)),
                              std::vector<Label>(s.y_train.begin(), s.y_train.begin() + 20), hp)
                  .is_selected(AlgorithmId::NB));
  hp.budget.planned_rows = 51;
  EXPECT_FALSE(capability_gate(s.x_train.select_rows(iota_indices(20)),
                               std::vector<Label>(s.y_train.begin(), s.y_train.begin() + 20), hp)
                   .is_selected(AlgorithmId::NB));
}

TEST(Capability, NothingCapable) {
  const auto s = synthetic_split(40, {.class_vocab = 30, .shared_vocab = 10});
  Hyperparams hp;
  hp.disabled = {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  EXPECT_EQ(kind_of([&] { capability_gate(s.x_train, s.y_train, hp); }), ErrorKind::NoCapableAlgorithm);
}
