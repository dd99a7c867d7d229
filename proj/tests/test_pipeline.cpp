#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/news_site.hpp"
#include "support/workspace.hpp"
#include "veridict/pipeline.hpp"

using namespace veridict;

namespace {

const Label F = Label::Fake, R = Label::Real;

template <class F_>
ErrorKind kind_of(F_&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no veridict::Error thrown";
  return ErrorKind::IoFailure;
}

// Seed corpus and trained bundle in a fresh workspace.
class Trained : public ::testing::Test {
 protected:
  void SetUp() override {
    fixtures::SyntheticWriter w({.seed = 1});
    save_csv(w.corpus(200), ws.data());
    config = ws.config();
    trained = cmd_train(ws.data(), config).bundle;
  }

  void serve(const std::vector<Label>& labels) {
    fixtures::SyntheticWriter w({.seed = 500});
    fixtures::build_news_site(site, w, labels);
    site.start();
  }

  fixtures::Workspace ws{"pipeline"};
  PipelineConfig config;
  ModelBundle trained;
  fixtures::FixtureSite site;
};

}  // namespace

TEST_F(Trained, TrainProducesBundleAndReport) {
  EXPECT_TRUE(std::filesystem::exists(ws.bundle()));
  EXPECT_EQ(trained.capability.selected.size(), 7u);
  EXPECT_EQ(trained.models.size(), trained.capability.selected.size());
  EXPECT_EQ(trained.evaluations.size(), trained.models.size());
  EXPECT_EQ(trained.stats.per_model.at(trained.best_fit), trained.stats.max);
  for (const auto& e : trained.evaluations) EXPECT_EQ(e.total(), 40u);  // 200 - floor(0.8 * 200)
  EXPECT_EQ(trained.vocabulary.n_documents(), 160u);

  std::size_t reports = 0;
  for (const auto& f : std::filesystem::directory_iterator(ws.reports())) {
    const auto j = nlohmann::json::parse(fixtures::Workspace::slurp(f.path()));
    EXPECT_EQ(j.at("command"), "train");
    EXPECT_EQ(j.at("best_fit"), to_string(trained.best_fit));
    ++reports;
  }
  EXPECT_EQ(reports, 1u);
}

TEST_F(Trained, RetrainingIsBitIdentical) {
  const auto again = cmd_train(ws.data(), config).bundle;
  EXPECT_EQ(serialize_bundle(again), serialize_bundle(trained));
}

TEST(Train, Errors) {
  fixtures::Workspace ws("train-errors");
  auto c = ws.config();
  EXPECT_EQ(kind_of([&] { cmd_train(ws.data(), c); }), ErrorKind::MissingFile);
  std::vector<NewsRecord> one_class;
  for (RecordId i = 0; i < 10; ++i) one_class.emplace_back(i, "t", "some words here", Label::Real);
  save_csv(Dataset(one_class), ws.data());
  EXPECT_EQ(kind_of([&] { cmd_train(ws.data(), c); }), ErrorKind::DegenerateLabels);
  EXPECT_FALSE(std::filesystem::exists(ws.bundle()));
}

TEST_F(Trained, ScanSiteAuthenticAll) {
  serve({R, R, F, R, R, R});
  const auto before = load_csv(ws.data());
  const auto out = cmd_scan_site(site.url("/"), ws.bundle(), ws.data(), config);
  const auto& r = out.report;
  ASSERT_TRUE(r.authenticity);
  EXPECT_EQ(r.authenticity->n_articles, 6u);
  EXPECT_DOUBLE_EQ(*r.authenticity->score, 5.0 / 6.0);
  EXPECT_EQ(r.authenticity->verdict, Verdict::AuthenticAll);
  EXPECT_DOUBLE_EQ(r.authenticity->fake_fraction, 1.0 / 6.0);
  ASSERT_TRUE(r.gate);
  EXPECT_TRUE(r.gate->augment);
  EXPECT_EQ(r.gate->fired_branch, GateBranch::MaxAccepted);
  ASSERT_TRUE(out.retrained);

  const auto after = load_csv(ws.data());
  ASSERT_EQ(after.size(), before.size() + 6);
  for (std::size_t i = before.size(); i < after.size(); ++i) {
    EXPECT_EQ(after[i].label(), R);  // forced by the verdict
    EXPECT_EQ(after[i].origin().kind, Origin::Kind::Predicted);
  }
  EXPECT_EQ(load_bundle(ws.bundle()).vocabulary.n_documents(), static_cast<std::size_t>(0.8 * (200 + 6)));
}

TEST_F(Trained, ScanSiteUnreliableAllForcesFake) {
  serve({F, F, R, F, F, F});
  const auto out = cmd_scan_site(site.url("/"), ws.bundle(), ws.data(), config);
  EXPECT_EQ(out.report.authenticity->verdict, Verdict::UnreliableAll);
  const auto after = load_csv(ws.data());
  for (std::size_t i = 200; i < after.size(); ++i) EXPECT_EQ(after[i].label(), F);
}

TEST_F(Trained, ScanSiteMixedKeepsPredictions) {
  serve({R, F, R, F, R, F});
  const auto out = cmd_scan_site(site.url("/"), ws.bundle(), ws.data(), config);
  const auto& a = *out.report.authenticity;
  EXPECT_EQ(a.verdict, Verdict::Mixed);
  EXPECT_DOUBLE_EQ(*a.score, 0.5);
  const auto after = load_csv(ws.data());
  ASSERT_EQ(after.size(), 206u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.per_article[i].final_label, a.per_article[i].predicted);
    EXPECT_EQ(after[200 + i].label(), a.per_article[i].predicted);
    EXPECT_EQ(a.per_article[i].predicted, i % 2 == 0 ? R : F);
  }
}

TEST_F(Trained, ScanSiteWithNoArticlesIsEmptyAndChangesNothing) {
  site.add_html("/", fixtures::link_page("Nothing here", {"/about"}));
  site.add_html("/about", "<h1>About</h1><p>We are a site.</p>");
  site.start();
  const auto csv_before = fixtures::Workspace::slurp(ws.data());
  const auto bundle_before = fixtures::Workspace::slurp(ws.bundle());
  const auto out = cmd_scan_site(site.url("/"), ws.bundle(), ws.data(), config);
  EXPECT_EQ(out.report.authenticity->verdict, Verdict::Empty);
  EXPECT_FALSE(out.report.authenticity->score);
  EXPECT_FALSE(out.report.gate);
  EXPECT_FALSE(out.retrained);
  EXPECT_EQ(fixtures::Workspace::slurp(ws.data()), csv_before);
  EXPECT_EQ(fixtures::Workspace::slurp(ws.bundle()), bundle_before);
}

TEST_F(Trained, ScanSiteGateRejectionLeavesCorpus) {
  auto weak = trained;
  weak.stats.mean = 0.5;  // below alpha
  save_bundle(weak, ws.bundle());
  serve({R, R, R, R, R, R});
  const auto csv_before = fixtures::Workspace::slurp(ws.data());
  const auto out = cmd_scan_site(site.url("/"), ws.bundle(), ws.data(), config);
  ASSERT_TRUE(out.report.gate);
  EXPECT_FALSE(out.report.gate->augment);
  EXPECT_EQ(out.report.gate->fired_branch, GateBranch::RejectedMean);
  EXPECT_EQ(out.report.appended, 0u);
  EXPECT_EQ(fixtures::Workspace::slurp(ws.data()), csv_before);
}

TEST_F(Trained, ScanSiteUnreachableRoot) {
  site.start();
  const auto url = site.url("/");
  site.stop();
  EXPECT_EQ(kind_of([&] { cmd_scan_site(url, ws.bundle(), ws.data(), config); }), ErrorKind::RootUnreachable);
  EXPECT_EQ(kind_of([&] { cmd_scan_site(url, ws.dir() / "none.json", ws.data(), config); }), ErrorKind::BundleMissing);
}

TEST_F(Trained, ScanLinkPredictsAndAppends) {
  serve({F, R, R, R, R, R});
  const auto r = cmd_scan_link(site.url("/s0/a"), ws.bundle(), ws.data(), config);
  ASSERT_TRUE(r.link_prediction);
  EXPECT_EQ(r.link_prediction->label, F);
  EXPECT_TRUE(r.gate->augment);
  EXPECT_EQ(r.appended, 1u);
  const auto after = load_csv(ws.data());
  ASSERT_EQ(after.size(), 201u);
  EXPECT_EQ(after[200].label(), F);
  EXPECT_EQ(after[200].title(), r.link_prediction->title);
  bool said = false;
  for (const auto& line : r.transcript) said = said || line == "Model predicts the news is FAKE";
  EXPECT_TRUE(said);
  // No retrain on a single link.
  EXPECT_EQ(load_bundle(ws.bundle()).vocabulary.n_documents(), 160u);
}

TEST_F(Trained, ScanLinkNoContentAndErrors) {
  serve({R, R, R, R, R, R});
  const auto csv_before = fixtures::Workspace::slurp(ws.data());
  const auto r = cmd_scan_link(site.url("/s3/a"), ws.bundle(), ws.data(), config);
  EXPECT_FALSE(r.link_prediction);
  EXPECT_FALSE(r.gate);
  EXPECT_EQ(fixtures::Workspace::slurp(ws.data()), csv_before);
  try {
    cmd_scan_link(site.url("/missing"), ws.bundle(), ws.data(), config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HttpError);
    EXPECT_EQ(e.status(), 404);
  }
}

TEST_F(Trained, StatsReadsTheBundle) {
  const auto r = cmd_stats(ws.bundle());
  ASSERT_TRUE(r.stats);
  EXPECT_EQ(r.stats->max, trained.stats.max);
  EXPECT_EQ(r.evaluations.size(), trained.evaluations.size());
  EXPECT_NE(render_report(r).find("median"), std::string::npos);
}

TEST(Ingest, AppendsWithOperatorLabel) {
  fixtures::Workspace ws("ingest");
  fixtures::FixtureSite site;
  fixtures::SyntheticWriter w({.seed = 3});
  fixtures::build_news_site(site, w, {R, F, R, F, R, F});
  site.start();
  auto c = ws.config();
  // No corpus yet: ingest starts an empty one.
  auto r = cmd_ingest(site.url("/"), Label::Fake, ws.data(), c);
  EXPECT_EQ(r.dataset_size_before, 0u);
  EXPECT_EQ(r.appended, 6u);
  auto d = load_csv(ws.data());
  ASSERT_EQ(d.size(), 6u);
  for (const auto& rec : d) {
    EXPECT_EQ(rec.label(), F);
    EXPECT_EQ(rec.origin().kind, Origin::Kind::Ingested);
  }
  r = cmd_ingest(site.url("/"), Label::Real, ws.data(), c);
  EXPECT_EQ(r.dataset_size_before, 6u);
  EXPECT_EQ(load_csv(ws.data()).size(), 12u);

  const auto before = fixtures::Workspace::slurp(ws.data());
  site.stop();
  EXPECT_EQ(kind_of([&] { cmd_ingest(site.url("/"), Label::Real, ws.data(), c); }), ErrorKind::RootUnreachable);
  EXPECT_EQ(fixtures::Workspace::slurp(ws.data()), before);
}
