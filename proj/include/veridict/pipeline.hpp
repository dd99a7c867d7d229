#pragma once

// End-to-end flows: train, ingest a source, scan an outlet, scan one link,
// show stats. Each returns a RunReport and persists corpus/bundle changes.

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "veridict/augment_gate.hpp"
#include "veridict/authenticity.hpp"
#include "veridict/bundle.hpp"
#include "veridict/classifiers.hpp"
#include "veridict/config.hpp"
#include "veridict/corpus.hpp"
#include "veridict/evaluation.hpp"
#include "veridict/harvester.hpp"
#include "veridict/text_features.hpp"

namespace veridict {

struct CrawlSummary {
  std::string root;
  std::size_t links_visited = 0;
  std::size_t articles = 0;
};

struct LinkPrediction {
  std::string url;
  std::string title;
  Label label = Label::Fake;
};

struct RunReport {
  std::string command;
  std::string started_at;
  std::string finished_at;
  std::size_t dataset_size_before = 0;
  std::size_t dataset_size_after = 0;
  std::size_t appended = 0;
  std::optional<CapabilityReport> capability;
  std::vector<EvaluationReport> evaluations;
  std::optional<AccuracyStats> stats;
  std::optional<AlgorithmId> best_fit;
  std::optional<CrawlSummary> crawl;
  std::optional<AuthenticityReport> authenticity;
  std::optional<GateDecision> gate;
  std::optional<LinkPrediction> link_prediction;
  /// Human-readable lines in the order they happened.
  std::vector<std::string> transcript;
  /// Where the report was written, if anywhere.
  std::filesystem::path report_path;
};

namespace detail {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
  return o.str();
}

inline std::string percent(double v) {
  std::ostringstream o;
  o << std::setprecision(16) << v * 100.0 << '%';
  return o.str();
}

/// Loads a corpus, treating a missing or header-only file as empty.
inline Dataset load_or_empty(const std::filesystem::path& path) {
  try {
    return load_csv(path);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MissingFile || e.kind() == ErrorKind::EmptyDataset) return Dataset{};
    throw;
  }
}

}  // namespace detail

inline nlohmann::json to_json(const GateDecision& d) {
  nlohmann::json j{{"augment", d.augment}, {"fired_branch", to_string(d.fired_branch)}, {"mean", d.mean}, {"max", d.max},
                   {"parse", kGateParse}};
  if (d.score >= 0.0) j["score"] = d.score;
  return j;
}

inline nlohmann::json to_json(const AuthenticityReport& a) {
  nlohmann::json per_article = nlohmann::json::array();
  for (const auto& p : a.per_article) {
    per_article.push_back({{"url", p.url}, {"title", p.title}, {"predicted", to_string(p.predicted)},
                           {"final_label", to_string(p.final_label)}});
  }
  nlohmann::json j{{"n_articles", a.n_articles}, {"verdict", to_string(a.verdict)}, {"per_article", per_article}};
  if (a.score) {
    j["score"] = *a.score;
    j["fake_fraction"] = a.fake_fraction;
    j["real_fraction"] = a.real_fraction;
  } else {
    j["score"] = nullptr;
  }
  return j;
}

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j{{"format", "veridict-run-report"},
                   {"version", 1},
                   {"command", r.command},
                   {"started_at", r.started_at},
                   {"finished_at", r.finished_at},
                   {"dataset_size_before", r.dataset_size_before},
                   {"dataset_size_after", r.dataset_size_after},
                   {"appended", r.appended},
                   {"transcript", r.transcript}};
  if (r.capability) j["capability"] = to_json(*r.capability);
  if (!r.evaluations.empty()) {
    nlohmann::json e = nlohmann::json::array();
    for (const auto& ev : r.evaluations) e.push_back(to_json(ev));
    j["evaluations"] = e;
  }
  if (r.stats) j["stats"] = to_json(*r.stats);
  if (r.best_fit) j["best_fit"] = to_string(*r.best_fit);
  if (r.crawl) j["crawl"] = {{"root", r.crawl->root}, {"links_visited", r.crawl->links_visited}, {"articles", r.crawl->articles}};
  if (r.authenticity) j["authenticity"] = to_json(*r.authenticity);
  if (r.gate) j["gate"] = to_json(*r.gate);
  if (r.link_prediction) {
    j["prediction"] = {{"url", r.link_prediction->url}, {"title", r.link_prediction->title},
                       {"label", to_string(r.link_prediction->label)}};
  }
  return j;
}

inline std::filesystem::path write_report(RunReport& report, const std::filesystem::path& dir) {
  if (dir.empty()) return {};
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::string stamp = report.finished_at;
  for (char& c : stamp) {
    if (c == ':' || c == '.') c = '-';
  }
  const auto path = dir / (report.command + "-" + stamp + "-" + std::to_string(counter++) + ".json");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write run report " + path.string());
  out << to_json(report).dump(2) << '\n';
  report.report_path = path;
  return path;
}

/// Text table of per-model accuracies and aggregates.
inline std::string render_accuracy_table(const std::vector<EvaluationReport>& evaluations, const AccuracyStats& stats,
                                         AlgorithmId best) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(4);
  o << std::left << std::setw(8) << "model" << std::right << std::setw(10) << "accuracy" << std::setw(11)
    << "prec(F)" << std::setw(10) << "rec(F)" << std::setw(9) << "f1(F)" << std::setw(11) << "prec(R)"
    << std::setw(10) << "rec(R)" << std::setw(9) << "f1(R)" << std::setw(9) << "support" << "  confusion\n";
  for (const auto& e : evaluations) {
    const auto& f = e.metrics(Label::Fake);
    const auto& r = e.metrics(Label::Real);
    o << std::left << std::setw(8) << (std::string(to_string(e.algorithm)) + (e.algorithm == best ? "*" : ""))
      << std::right << std::setw(10) << e.accuracy << std::setw(11) << f.precision << std::setw(10) << f.recall
      << std::setw(9) << f.f1 << std::setw(11) << r.precision << std::setw(10) << r.recall << std::setw(9) << r.f1
      << std::setw(9) << e.total() << "  [[" << e.confusion[0][0] << ',' << e.confusion[0][1] << "],["
      << e.confusion[1][0] << ',' << e.confusion[1][1] << "]]\n";
  }
  o << std::left << std::setw(8) << "mean" << std::right << std::setw(10) << stats.mean << '\n'
    << std::left << std::setw(8) << "median" << std::right << std::setw(10) << stats.median << '\n'
    << std::left << std::setw(8) << "min" << std::right << std::setw(10) << stats.min << '\n'
    << std::left << std::setw(8) << "max" << std::right << std::setw(10) << stats.max << '\n';
  return o.str();
}

/// Everything a report holds, for the console.
inline std::string render_report(const RunReport& r) {
  std::ostringstream o;
  for (const auto& line : r.transcript) o << line << '\n';
  if (r.capability) {
    o << "selected:";
    for (auto id : r.capability->selected) o << ' ' << to_string(id);
    o << '\n';
    for (const auto& [id, reason] : r.capability->rejected) o << "rejected: " << to_string(id) << " (" << reason << ")\n";
  }
  if (r.stats && r.best_fit && !r.evaluations.empty()) o << render_accuracy_table(r.evaluations, *r.stats, *r.best_fit);
  if (r.authenticity) {
    const auto& a = *r.authenticity;
    o << "articles: " << a.n_articles << "  verdict: " << to_string(a.verdict);
    if (a.score) o << "  S=" << *a.score << "  P(f)=" << a.fake_fraction << "  P(r)=" << a.real_fraction;
    o << '\n';
  }
  if (r.gate) o << "gate: " << (r.gate->augment ? "augment" : "no augment") << " via " << to_string(r.gate->fired_branch) << '\n';
  o << "dataset: " << r.dataset_size_before << " -> " << r.dataset_size_after << " (+" << r.appended << ")\n";
  if (!r.report_path.empty()) o << "report: " << r.report_path.string() << '\n';
  return o.str();
}

/// Split, vectorize, gate, fit, evaluate and select on an in-memory corpus.
inline ModelBundle train_from_dataset(const Dataset& data, const PipelineConfig& config,
                                      std::vector<std::string>* transcript = nullptr) {
  config.validate();
  if (data.count(Label::Fake) < 2 || data.count(Label::Real) < 2) {
    throw Error(ErrorKind::DegenerateLabels, "training needs at least 2 records of each class (have " +
                                                 std::to_string(data.count(Label::Fake)) + " FAKE, " +
                                                 std::to_string(data.count(Label::Real)) + " REAL)");
  }
  const auto pair = split(data, config.split_ratio, config.seed);
  const auto train_docs = pair.train.documents();
  const auto test_docs = pair.test.documents();
  const auto y_train = pair.train.labels();
  const auto y_test = pair.test.labels();

  ModelBundle bundle;
  bundle.vectorizer = config.vectorizer;
  bundle.seed = config.seed;
  bundle.split_ratio = config.split_ratio;
  bundle.gate = config.gate;
  bundle.verdict = config.verdict;
  bundle.vocabulary = fit_vectorizer(train_docs, config.vectorizer);
  const auto x_train = transform(bundle.vocabulary, train_docs);
  const auto x_test = transform(bundle.vocabulary, test_docs);

  bundle.hyperparams = config.hyperparams;
  bundle.hyperparams.budget.planned_rows = x_train.n_rows();

  const std::size_t probe_n = std::min(config.probe_rows, x_train.n_rows());
  const auto probe_rows = iota_indices(probe_n);
  const auto probe = x_train.select_rows(probe_rows);
  const std::vector<Label> probe_labels(y_train.begin(), y_train.begin() + static_cast<std::ptrdiff_t>(probe_n));
  bundle.capability = capability_gate(probe, probe_labels, bundle.hyperparams, config.seed);

  std::vector<std::future<TrainedModel>> jobs;
  for (auto id : bundle.capability.selected) {
    jobs.push_back(std::async(std::launch::async,
                              [&, id] { return fit(id, x_train, y_train, bundle.hyperparams, config.seed); }));
  }
  for (auto& job : jobs) bundle.models.push_back(job.get());
  for (const auto& m : bundle.models) bundle.evaluations.push_back(evaluate(y_test, predict(m, x_test), m.algorithm()));
  bundle.stats = accuracy_stats(bundle.evaluations);
  bundle.best_fit = select_best_fit(bundle.stats);

  if (transcript) {
    transcript->push_back("train " + std::to_string(pair.train.size()) + " / test " + std::to_string(pair.test.size()) +
                          ", vocabulary " + std::to_string(bundle.vocabulary.size()) + " terms");
    std::ostringstream best;
    best << std::setprecision(16) << to_string(bundle.best_fit) << ", with accuracy rate of " << bundle.stats.max
         << " is best fit model for the analysis";
    transcript->push_back(best.str());
    transcript->push_back("Best fit model: " + std::string(to_string(bundle.best_fit)));
    transcript->push_back("Accuracy: " + detail::percent(bundle.stats.max));
  }
  return bundle;
}

namespace detail {

inline void attach_training(RunReport& report, const ModelBundle& bundle) {
  report.capability = bundle.capability;
  report.evaluations = bundle.evaluations;
  report.stats = bundle.stats;
  report.best_fit = bundle.best_fit;
}

inline void finish(RunReport& report, const PipelineConfig& config) {
  report.finished_at = utc_timestamp();
  write_report(report, config.report_dir);
}

}  // namespace detail

struct TrainOutcome {
  ModelBundle bundle;
  RunReport report;
};

/// load -> clean -> split -> vectorize -> capability gate -> fit -> evaluate -> select -> persist.
inline TrainOutcome cmd_train(const std::filesystem::path& dataset_path, const PipelineConfig& config) {
  RunReport report;
  report.command = "train";
  report.started_at = detail::utc_timestamp();
  const Dataset data = load_csv(dataset_path);
  report.dataset_size_before = report.dataset_size_after = data.size();
  report.transcript.push_back("loaded " + std::to_string(data.size()) + " records (" +
                              std::to_string(data.count(Label::Fake)) + " FAKE, " +
                              std::to_string(data.count(Label::Real)) + " REAL)");
  auto bundle = train_from_dataset(data, config, &report.transcript);
  detail::attach_training(report, bundle);
  if (!config.bundle_path.empty()) save_bundle(bundle, config.bundle_path);
  detail::finish(report, config);
  return {std::move(bundle), std::move(report)};
}

/// Crawls a source and appends every extracted article with the operator's label.
inline RunReport cmd_ingest(std::string_view url, Label label, const std::filesystem::path& dataset_path,
                            const PipelineConfig& config) {
  RunReport report;
  report.command = "ingest";
  report.started_at = detail::utc_timestamp();
  const Dataset before = detail::load_or_empty(dataset_path);
  report.dataset_size_before = report.dataset_size_after = before.size();

  const auto crawl = crawl_site(url, config.crawl);
  report.crawl = CrawlSummary{std::string(url), crawl.links_visited.size(), crawl.articles.size()};
  report.transcript.push_back("scraped " + std::to_string(crawl.links_visited.size()) + " links and sub-links, extracted " +
                              std::to_string(crawl.articles.size()) + " news contents");

  if (!crawl.articles.empty()) {
    std::vector<NewsRecord> incoming;
    RecordId next = before.next_free_id();
    for (const auto& a : crawl.articles) incoming.emplace_back(next++, a.title, a.text, label, Origin::ingested(a.url));
    const Dataset after = append_records(before, incoming);
    save_csv(after, dataset_path);
    report.appended = incoming.size();
    report.dataset_size_after = after.size();
    report.transcript.push_back("added " + std::to_string(incoming.size()) + " records labeled " +
                                std::string(to_string(label)));
  } else {
    report.transcript.push_back("no news content extracted; dataset unchanged");
  }
  detail::finish(report, config);
  return report;
}

struct ScanOutcome {
  RunReport report;
  /// Present when the gate authorized augmentation and the corpus was retrained.
  std::optional<ModelBundle> retrained;
};

/// Crawls an outlet, scores it, and on a positive gate decision appends the
/// articles with their final labels and retrains on the grown corpus.
inline ScanOutcome cmd_scan_site(std::string_view url, const std::filesystem::path& bundle_path,
                                 const std::filesystem::path& dataset_path, const PipelineConfig& config) {
  ScanOutcome out;
  RunReport& report = out.report;
  report.command = "scan-site";
  report.started_at = detail::utc_timestamp();
  const ModelBundle bundle = load_bundle(bundle_path);
  report.best_fit = bundle.best_fit;
  report.stats = bundle.stats;
  report.transcript.push_back("Best fit model: " + std::string(to_string(bundle.best_fit)) + " (accuracy " +
                              detail::percent(bundle.stats.max) + ")");

  const auto crawl = crawl_site(url, config.crawl);
  report.crawl = CrawlSummary{std::string(url), crawl.links_visited.size(), crawl.articles.size()};
  report.transcript.push_back("scraped " + std::to_string(crawl.links_visited.size()) + " links and sub-links, extracted " +
                              std::to_string(crawl.articles.size()) + " news contents");

  std::vector<std::string> docs;
  std::vector<ArticleRef> refs;
  for (const auto& a : crawl.articles) {
    docs.push_back(a.title + " " + a.text);
    refs.push_back({a.url, a.title});
  }
  const auto predicted = docs.empty() ? std::vector<Label>{} : bundle.predict_documents(docs);
  const auto authenticity = classify_outlet(LabelVector(predicted), config.verdict, refs);
  report.authenticity = authenticity;

  const Dataset before = detail::load_or_empty(dataset_path);
  report.dataset_size_before = report.dataset_size_after = before.size();

  if (authenticity.verdict == Verdict::Empty) {
    report.transcript.push_back("no news content: verdict Empty, nothing added");
    detail::finish(report, config);
    return out;
  }
  std::ostringstream line;
  line << std::setprecision(6) << "authenticity score S=" << *authenticity.score << ", P(f)=" << authenticity.fake_fraction
       << ", P(r)=" << authenticity.real_fraction << ", verdict " << to_string(authenticity.verdict);
  report.transcript.push_back(line.str());

  report.gate = outlet_gate(bundle.stats.mean, bundle.stats.max, *authenticity.score, config.gate);
  report.transcript.push_back(std::string("gate ") + std::string(to_string(report.gate->fired_branch)) +
                              (report.gate->augment ? ": content added to training data" : ": content not added"));
  if (report.gate->augment) {
    std::vector<NewsRecord> incoming;
    RecordId next = before.next_free_id();
    for (std::size_t i = 0; i < crawl.articles.size(); ++i) {
      const auto& a = crawl.articles[i];
      incoming.emplace_back(next++, a.title, a.text, authenticity.per_article[i].final_label, Origin::predicted(a.url));
    }
    const Dataset after = append_records(before, incoming);
    save_csv(after, dataset_path);
    report.appended = incoming.size();
    report.dataset_size_after = after.size();

    auto retrained = train_from_dataset(after, config, &report.transcript);
    report.evaluations = retrained.evaluations;
    report.capability = retrained.capability;
    report.stats = retrained.stats;
    report.best_fit = retrained.best_fit;
    save_bundle(retrained, bundle_path);
    out.retrained = std::move(retrained);
  }
  detail::finish(report, config);
  return out;
}

/// Fetches one article, predicts it, and appends it when the single-link gate allows.
inline RunReport cmd_scan_link(std::string_view url, const std::filesystem::path& bundle_path,
                               const std::filesystem::path& dataset_path, const PipelineConfig& config) {
  RunReport report;
  report.command = "scan-link";
  report.started_at = detail::utc_timestamp();
  const ModelBundle bundle = load_bundle(bundle_path);
  report.best_fit = bundle.best_fit;
  report.stats = bundle.stats;
  {
    std::ostringstream o;
    o << std::setprecision(16) << to_string(bundle.best_fit) << ", with accuracy rate of " << bundle.stats.max
      << " is best fit model for the analysis";
    report.transcript.push_back(o.str());
  }
  report.transcript.push_back("Best fit model: " + std::string(to_string(bundle.best_fit)));
  report.transcript.push_back("Accuracy: " + detail::percent(bundle.stats.max));

  const Dataset before = detail::load_or_empty(dataset_path);
  report.dataset_size_before = report.dataset_size_after = before.size();

  const auto page = fetch_page(url, config.crawl);
  auto extracted = extract_article(page, url, config.crawl);
  if (auto* none = std::get_if<NoContent>(&extracted)) {
    report.transcript.push_back("no news content extracted (" + none->reason + "); nothing predicted or added");
    detail::finish(report, config);
    return report;
  }
  const auto& article = std::get<ExtractedArticle>(extracted);
  const std::vector<std::string> docs{article.title + " " + article.text};
  const Label label = bundle.predict_documents(docs).front();
  report.link_prediction = LinkPrediction{article.url, article.title, label};
  report.transcript.push_back("Prediction of " + article.title + ":");
  report.transcript.push_back("Model predicts the news is " + std::string(to_string(label)));
  report.transcript.push_back(article.title + " is possibly " + std::string(to_string(label)) + " news");

  report.gate = single_link_gate(bundle.stats.mean, bundle.stats.max, config.gate);
  if (report.gate->augment) {
    const NewsRecord record(before.next_free_id(), article.title, article.text, label, Origin::predicted(article.url));
    const Dataset after = append_records(before, std::span<const NewsRecord>(&record, 1));
    save_csv(after, dataset_path);
    report.appended = 1;
    report.dataset_size_after = after.size();
    report.transcript.push_back("Saved..");
  } else {
    report.transcript.push_back("not saved: gate " + std::string(to_string(report.gate->fired_branch)));
  }
  detail::finish(report, config);
  return report;
}

/// Capability report, per-model metrics, accuracy stats and best fit of a bundle.
inline RunReport cmd_stats(const std::filesystem::path& bundle_path) {
  RunReport report;
  report.command = "stats";
  report.started_at = detail::utc_timestamp();
  const ModelBundle bundle = load_bundle(bundle_path);
  detail::attach_training(report, bundle);
  report.transcript.push_back("bundle " + bundle_path.string() + ": vocabulary " +
                              std::to_string(bundle.vocabulary.size()) + " terms, trained on " +
                              std::to_string(bundle.vocabulary.n_documents()) + " documents");
  report.finished_at = detail::utc_timestamp();
  return report;
}

}  // namespace veridict
