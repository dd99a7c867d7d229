#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "support/synthetic.hpp"
#include "veridict/text_features.hpp"

using namespace veridict;

TEST(Tokenize, LowercaseAlnumRunsOfTwoOrMore) {
  EXPECT_EQ(tokenize("Hello, World! a I 42 x9 don't U.S."),
            (std::vector<std::string>{"hello", "world", "42", "x9", "don"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("a b c ! ?").empty());
  EXPECT_EQ(tokenize("café Zürich"), (std::vector<std::string>{"café", "zürich"}));
}

TEST(WordCount, WhitespaceRuns) {
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("   "), 0u);
  EXPECT_EQ(word_count("one"), 1u);
  EXPECT_EQ(word_count(" one  two\tthree\n\nfour "), 4u);
  EXPECT_EQ(word_count("- -- ---"), 3u);
}

TEST(Vectorizer, HandComputedThreeDocuments) {
  const std::vector<std::string> docs{"apple banana apple", "banana cherry", "apple cherry date"};
  const auto vocab = fit_vectorizer(docs, {.min_df = 1, .max_features = 0});
  ASSERT_EQ(vocab.terms(), (std::vector<std::string>{"apple", "banana", "cherry", "date"}));
  EXPECT_EQ(vocab.document_frequency(), (std::vector<std::size_t>{2, 2, 2, 1}));
  // ln((1+3)/(1+2)) + 1 and ln((1+3)/(1+1)) + 1
  EXPECT_NEAR(vocab.idf(0), 1.2876820724517808, 1e-15);
  EXPECT_NEAR(vocab.idf(3), 1.6931471805599454, 1e-15);

  const auto x = transform(vocab, docs);
  ASSERT_EQ(x.n_rows(), 3u);
  ASSERT_EQ(x.n_cols(), 4u);
  const auto dense = x.densify();
  const std::vector<double> expected{0.8944271909999159, 0.4472135954999579, 0, 0,
                                     0, 0.7071067811865476, 0.7071067811865476, 0,
                                     0.5178561161676974, 0, 0.5178561161676974, 0.680918560398684};
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(dense[i], expected[i], 1e-12) << i;
}

TEST(Vectorizer, MinDfAndMaxFeatures) {
  const std::vector<std::string> docs{"aa bb cc", "aa bb dd", "aa ee ff", "bb cc gg"};
  const auto v2 = fit_vectorizer(docs);  // min_df 2
  EXPECT_EQ(v2.terms(), (std::vector<std::string>{"aa", "bb", "cc"}));
  const auto top2 = fit_vectorizer(docs, {.min_df = 1, .max_features = 2});
  EXPECT_EQ(top2.terms(), (std::vector<std::string>{"aa", "bb"}));
  // Ties at df 1 broken lexicographically: cc (df 2) then dd.
  const auto top4 = fit_vectorizer(docs, {.min_df = 1, .max_features = 4});
  EXPECT_EQ(top4.terms(), (std::vector<std::string>{"aa", "bb", "cc", "dd"}));
}

TEST(Vectorizer, EmptyCorpusRejected) {
  try {
    fit_vectorizer(std::vector<std::string>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyCorpus);
  }
}

TEST(Vectorizer, OutOfVocabularyRowsAreZero) {
  const std::vector<std::string> docs{"alpha beta", "alpha beta"};
  const auto vocab = fit_vectorizer(docs);
  const std::vector<std::string> unseen{"gamma delta", "", "alpha"};
  const auto x = transform(vocab, unseen);
  EXPECT_EQ(x.row(0).size(), 0u);
  EXPECT_EQ(x.row(1).size(), 0u);
  EXPECT_NEAR(x.squared_norm(2), 1.0, 1e-15);
}

// Every row has L2 norm 0 or 1 and non-negative weights; columns are sorted.
TEST(Vectorizer, RowNormsAreZeroOrOne) {
  fixtures::SyntheticWriter w({.class_vocab = 300, .shared_vocab = 50, .seed = 3});
  const auto d = w.corpus(300);
  const auto docs = d.documents();
  const auto vocab = fit_vectorizer(docs);
  std::vector<std::string> probe = docs;
  probe.push_back("zz yy");
  probe.push_back("");
  const auto x = transform(vocab, probe);
  for (std::size_t r = 0; r < x.n_rows(); ++r) {
    const double n2 = x.squared_norm(r);
    EXPECT_TRUE(n2 == 0.0 || std::abs(n2 - 1.0) < 1e-12) << r << ' ' << n2;
    std::size_t prev = 0;
    bool first = true;
    for (const auto& e : x.row(r)) {
      EXPECT_GT(e.weight, 0.0);
      if (!first) {
        EXPECT_GT(e.col, prev);
      }
      prev = e.col;
      first = false;
    }
  }
  // Vocabulary is sorted, so column i is the i-th term lexicographically.
  EXPECT_TRUE(std::is_sorted(vocab.terms().begin(), vocab.terms().end()));
}

TEST(Vectorizer, TransformIsDeterministicAndRowIndependent) {
  fixtures::SyntheticWriter w({.seed = 11});
  const auto docs = w.corpus(50).documents();
  const auto vocab = fit_vectorizer(docs);
  const auto all = transform(vocab, docs);
  for (std::size_t r = 0; r < docs.size(); r += 7) {
    const auto single = transform(vocab, std::span<const std::string>(&docs[r], 1));
    ASSERT_EQ(single.row(0).size(), all.row(r).size());
    for (std::size_t k = 0; k < single.row(0).size(); ++k) {
      EXPECT_EQ(single.row(0)[k].col, all.row(r)[k].col);
      EXPECT_EQ(single.row(0)[k].weight, all.row(r)[k].weight);
    }
  }
}

TEST(FeatureMatrix, RejectsMalformedRows) {
  FeatureMatrix m(3);
  const std::vector<FeatureMatrix::Entry> unsorted{{2, 1.0}, {1, 1.0}};
  const std::vector<FeatureMatrix::Entry> out_of_range{{3, 1.0}};
  const std::vector<FeatureMatrix::Entry> zero{{0, 0.0}};
  EXPECT_THROW(m.push_row(unsorted), Error);
  EXPECT_THROW(m.push_row(out_of_range), Error);
  EXPECT_THROW(m.push_row(zero), Error);
}
