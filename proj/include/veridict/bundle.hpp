#pragma once

// Persisted model bundle: vocabulary, fitted models, capability report,
// per-model evaluations and the gate snapshot. Stored as versioned JSON.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "veridict/augment_gate.hpp"
#include "veridict/authenticity.hpp"
#include "veridict/classifiers.hpp"
#include "veridict/error.hpp"
#include "veridict/evaluation.hpp"
#include "veridict/text_features.hpp"

namespace veridict {

inline constexpr int kBundleVersion = 1;

struct ModelBundle {
  Vocabulary vocabulary;
  VectorizerConfig vectorizer;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  double split_ratio = 0.8;
  /// In AlgorithmId order, one per selected algorithm.
  std::vector<TrainedModel> models;
  CapabilityReport capability;
  std::vector<EvaluationReport> evaluations;
  AccuracyStats stats;
  AlgorithmId best_fit = AlgorithmId::LR;
  GateConfig gate;
  VerdictBounds verdict;

  const TrainedModel& model(AlgorithmId id) const {
    for (const auto& m : models) {
      if (m.algorithm() == id) return m;
    }
    throw Error(ErrorKind::MalformedBundle, "bundle has no model for " + std::string(to_string(id)));
  }
  const TrainedModel& best_model() const { return model(best_fit); }
  double best_accuracy() const { return stats.max; }

  /// Vectorizes documents with the bundle vocabulary and predicts with the best-fit model.
  std::vector<Label> predict_documents(std::span<const std::string> documents) const {
    return predict(best_model(), transform(vocabulary, documents));
  }
};

// JSON mapping.

inline nlohmann::json to_json(const FeatureMatrix& m) {
  std::vector<std::size_t> lengths, cols;
  std::vector<double> weights;
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    const auto row = m.row(r);
    lengths.push_back(row.size());
    for (const auto& e : row) {
      cols.push_back(e.col);
      weights.push_back(e.weight);
    }
  }
  return {{"n_cols", m.n_cols()}, {"row_lengths", lengths}, {"cols", cols}, {"weights", weights}};
}

inline FeatureMatrix feature_matrix_from_json(const nlohmann::json& j) {
  FeatureMatrix m(j.at("n_cols").get<std::size_t>());
  const auto lengths = j.at("row_lengths").get<std::vector<std::size_t>>();
  const auto cols = j.at("cols").get<std::vector<std::size_t>>();
  const auto weights = j.at("weights").get<std::vector<double>>();
  if (cols.size() != weights.size()) throw Error(ErrorKind::MalformedBundle, "sparse matrix arrays differ in length");
  std::size_t pos = 0;
  std::vector<FeatureMatrix::Entry> row;
  for (std::size_t len : lengths) {
    if (pos + len > cols.size()) throw Error(ErrorKind::MalformedBundle, "sparse matrix row overruns data");
    row.clear();
    for (std::size_t k = 0; k < len; ++k, ++pos) row.push_back({cols[pos], weights[pos]});
    m.push_row(row);
  }
  return m;
}

inline std::vector<int> encode_labels(std::span<const Label> labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (Label l : labels) out.push_back(encode(l));
  return out;
}

inline std::vector<Label> decode_labels(const std::vector<int>& codes) {
  std::vector<Label> out;
  out.reserve(codes.size());
  for (int c : codes) out.push_back(decode(c));
  return out;
}

inline nlohmann::json to_json(const TrainedModel& model) {
  nlohmann::json params = std::visit(
      [](const auto& p) -> nlohmann::json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return {{"kind", "linear"}, {"weights", p.weights}, {"bias", p.bias}};
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          return {{"kind", "knn"}, {"k", p.k}, {"train", to_json(p.train)}, {"labels", encode_labels(p.labels)}};
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          std::vector<std::int64_t> feature, left, right;
          std::vector<double> threshold;
          std::vector<int> label;
          for (const auto& n : p.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            label.push_back(encode(n.label));
          }
          return {{"kind", "tree"}, {"feature", feature}, {"threshold", threshold},
                  {"left", left}, {"right", right}, {"label", label}};
        } else {
          return {{"kind", "gaussian_nb"}, {"log_prior", p.log_prior}, {"mean", p.mean}, {"var", p.var}};
        }
      },
      model.params());
  return {{"algorithm", to_string(model.algorithm())}, {"n_features", model.n_features()}, {"params", params}};
}

inline AlgorithmId algorithm_from_json(const nlohmann::json& j) {
  const auto name = j.get<std::string>();
  auto id = parse_algorithm(name);
  if (!id) throw Error(ErrorKind::MalformedBundle, "unknown algorithm '" + name + "'");
  return *id;
}

inline TrainedModel trained_model_from_json(const nlohmann::json& j) {
  const auto id = algorithm_from_json(j.at("algorithm"));
  const auto n_features = j.at("n_features").get<std::size_t>();
  const auto& p = j.at("params");
  const auto kind = p.at("kind").get<std::string>();
  if (kind == "linear") {
    LinearModel m{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
    if (m.weights.size() != n_features) throw Error(ErrorKind::MalformedBundle, "weight vector width mismatch");
    return {id, n_features, std::move(m)};
  }
  if (kind == "knn") {
    KnnModel m{p.at("k").get<std::size_t>(), feature_matrix_from_json(p.at("train")),
               decode_labels(p.at("labels").get<std::vector<int>>())};
    if (m.train.n_rows() != m.labels.size()) throw Error(ErrorKind::MalformedBundle, "knn labels mismatch");
    return {id, n_features, std::move(m)};
  }
  if (kind == "tree") {
    const auto feature = p.at("feature").get<std::vector<std::int64_t>>();
    const auto threshold = p.at("threshold").get<std::vector<double>>();
    const auto left = p.at("left").get<std::vector<std::int64_t>>();
    const auto right = p.at("right").get<std::vector<std::int64_t>>();
    const auto label = p.at("label").get<std::vector<int>>();
    const auto n = feature.size();
    if (threshold.size() != n || left.size() != n || right.size() != n || label.size() != n || n == 0) {
      throw Error(ErrorKind::MalformedBundle, "tree arrays differ in length");
    }
    TreeModel m;
    for (std::size_t i = 0; i < n; ++i) {
      const auto bad_child = [&](std::int64_t c) { return c <= static_cast<std::int64_t>(i) || c >= static_cast<std::int64_t>(n); };
      if (feature[i] >= 0 && (bad_child(left[i]) || bad_child(right[i]) || feature[i] >= static_cast<std::int64_t>(n_features))) {
        throw Error(ErrorKind::MalformedBundle, "tree node " + std::to_string(i) + " is malformed");
      }
      m.nodes.push_back({feature[i], threshold[i], left[i], right[i], decode(label[i])});
    }
    return {id, n_features, std::move(m)};
  }
  if (kind == "gaussian_nb") {
    GaussianNbModel m;
    m.log_prior = p.at("log_prior").get<std::array<double, 2>>();
    m.mean = p.at("mean").get<std::array<std::vector<double>, 2>>();
    m.var = p.at("var").get<std::array<std::vector<double>, 2>>();
    for (int c = 0; c < 2; ++c) {
      if (m.mean[c].size() != n_features || m.var[c].size() != n_features) {
        throw Error(ErrorKind::MalformedBundle, "naive Bayes width mismatch");
      }
    }
    return {id, n_features, std::move(m)};
  }
  throw Error(ErrorKind::MalformedBundle, "unknown model kind '" + kind + "'");
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json per_class = nlohmann::json::object();
  for (Label l : {Label::Fake, Label::Real}) {
    const auto& m = r.metrics(l);
    per_class[std::string(to_string(l))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  return {{"algorithm", to_string(r.algorithm)},
          {"accuracy", r.accuracy},
          {"per_class", per_class},
          {"confusion_matrix", r.confusion},
          {"zero_division", r.zero_division}};
}

inline EvaluationReport evaluation_from_json(const nlohmann::json& j) {
  EvaluationReport r;
  r.algorithm = algorithm_from_json(j.at("algorithm"));
  r.accuracy = j.at("accuracy").get<double>();
  for (Label l : {Label::Fake, Label::Real}) {
    const auto& m = j.at("per_class").at(std::string(to_string(l)));
    auto& out = r.per_class[static_cast<std::size_t>(encode(l))];
    out.precision = m.at("precision").get<double>();
    out.recall = m.at("recall").get<double>();
    out.f1 = m.at("f1").get<double>();
    out.support = m.at("support").get<std::size_t>();
  }
  r.confusion = j.at("confusion_matrix").get<std::array<std::array<std::size_t, 2>, 2>>();
  r.zero_division = j.value("zero_division", false);
  return r;
}

inline nlohmann::json to_json(const AccuracyStats& s) {
  nlohmann::json per_model = nlohmann::json::object();
  for (const auto& [id, acc] : s.per_model) per_model[std::string(to_string(id))] = acc;
  return {{"mean", s.mean}, {"median", s.median}, {"min", s.min}, {"max", s.max}, {"per_model", per_model}};
}

inline AccuracyStats accuracy_stats_from_json(const nlohmann::json& j) {
  AccuracyStats s;
  s.mean = j.at("mean").get<double>();
  s.median = j.at("median").get<double>();
  s.min = j.at("min").get<double>();
  s.max = j.at("max").get<double>();
  for (const auto& [name, acc] : j.at("per_model").items()) s.per_model[algorithm_from_json(name)] = acc.get<double>();
  return s;
}

inline nlohmann::json to_json(const CapabilityReport& c) {
  nlohmann::json selected = nlohmann::json::array();
  for (auto id : c.selected) selected.push_back(to_string(id));
  nlohmann::json rejected = nlohmann::json::array();
  for (const auto& [id, reason] : c.rejected) rejected.push_back({{"algorithm", to_string(id)}, {"reason", reason}});
  return {{"selected", selected}, {"rejected", rejected}};
}

inline CapabilityReport capability_from_json(const nlohmann::json& j) {
  CapabilityReport c;
  for (const auto& s : j.at("selected")) c.selected.push_back(algorithm_from_json(s));
  for (const auto& r : j.at("rejected")) c.rejected.emplace_back(algorithm_from_json(r.at("algorithm")), r.at("reason").get<std::string>());
  return c;
}

inline nlohmann::json to_json(const GateConfig& g) {
  return {{"alpha", g.alpha}, {"accept", g.accept}, {"unaccept", g.unaccept}, {"parse", kGateParse}};
}

inline nlohmann::json to_json(const Hyperparams& h) {
  std::vector<std::string> disabled;
  for (auto id : h.disabled) disabled.emplace_back(to_string(id));
  return {{"LR", {{"learning_rate", h.lr.learning_rate}, {"epochs", h.lr.epochs}, {"l2", h.lr.l2}}},
          {"LDA", {{"shrinkage", h.lda.shrinkage}}},
          {"KN", {{"k", h.kn.k}}},
          {"CART", {{"max_depth", h.cart.max_depth}, {"min_samples_split", h.cart.min_samples_split}}},
          {"NB", {{"var_smoothing", h.nb.var_smoothing}}},
          {"SVM", {{"c", h.svm.c}, {"epochs", h.svm.epochs}}},
          {"PAC", {{"c", h.pac.c}, {"epochs", h.pac.epochs}}},
          {"budget", {{"max_dense_cells", h.budget.max_dense_cells}, {"planned_rows", h.budget.planned_rows}}},
          {"disabled", disabled}};
}

inline Hyperparams hyperparams_from_json(const nlohmann::json& j) {
  Hyperparams h;
  h.lr.learning_rate = j.at("LR").at("learning_rate").get<double>();
  h.lr.epochs = j.at("LR").at("epochs").get<int>();
  h.lr.l2 = j.at("LR").at("l2").get<double>();
  h.lda.shrinkage = j.at("LDA").at("shrinkage").get<double>();
  h.kn.k = j.at("KN").at("k").get<std::size_t>();
  h.cart.max_depth = j.at("CART").at("max_depth").get<std::size_t>();
  h.cart.min_samples_split = j.at("CART").at("min_samples_split").get<std::size_t>();
  h.nb.var_smoothing = j.at("NB").at("var_smoothing").get<double>();
  h.svm.c = j.at("SVM").at("c").get<double>();
  h.svm.epochs = j.at("SVM").at("epochs").get<int>();
  h.pac.c = j.at("PAC").at("c").get<double>();
  h.pac.epochs = j.at("PAC").at("epochs").get<int>();
  h.budget.max_dense_cells = j.at("budget").at("max_dense_cells").get<std::size_t>();
  h.budget.planned_rows = j.at("budget").at("planned_rows").get<std::size_t>();
  for (const auto& s : j.at("disabled")) h.disabled.insert(algorithm_from_json(s));
  return h;
}

inline nlohmann::json to_json(const ModelBundle& b) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : b.models) models.push_back(to_json(m));
  nlohmann::json evaluations = nlohmann::json::array();
  for (const auto& e : b.evaluations) evaluations.push_back(to_json(e));
  return {{"format", "veridict-bundle"},
          {"version", kBundleVersion},
          {"seed", b.seed},
          {"split_ratio", b.split_ratio},
          {"vectorizer",
           {{"min_df", b.vectorizer.min_df},
            {"max_features", b.vectorizer.max_features},
            {"n_documents", b.vocabulary.n_documents()},
            {"terms", b.vocabulary.terms()},
            {"document_frequency", b.vocabulary.document_frequency()}}},
          {"hyperparams", to_json(b.hyperparams)},
          {"capability", to_json(b.capability)},
          {"evaluations", evaluations},
          {"stats", to_json(b.stats)},
          {"best_fit", to_string(b.best_fit)},
          {"gate", to_json(b.gate)},
          {"verdict_bounds", {{"low", b.verdict.low}, {"high", b.verdict.high}}},
          {"models", models}};
}

inline ModelBundle bundle_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "veridict-bundle") throw Error(ErrorKind::MalformedBundle, "not a model bundle");
    const int version = j.at("version").get<int>();
    if (version != kBundleVersion) {
      throw Error(ErrorKind::MalformedBundle, "unsupported bundle version " + std::to_string(version));
    }
    ModelBundle b;
    b.seed = j.at("seed").get<std::uint64_t>();
    b.split_ratio = j.at("split_ratio").get<double>();
    const auto& v = j.at("vectorizer");
    b.vectorizer.min_df = v.at("min_df").get<std::size_t>();
    b.vectorizer.max_features = v.at("max_features").get<std::size_t>();
    b.vocabulary = Vocabulary(v.at("terms").get<std::vector<std::string>>(),
                              v.at("document_frequency").get<std::vector<std::size_t>>(),
                              v.at("n_documents").get<std::size_t>());
    b.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    b.capability = capability_from_json(j.at("capability"));
    for (const auto& e : j.at("evaluations")) b.evaluations.push_back(evaluation_from_json(e));
    b.stats = accuracy_stats_from_json(j.at("stats"));
    b.best_fit = algorithm_from_json(j.at("best_fit"));
    const auto& g = j.at("gate");
    b.gate = {g.at("alpha").get<double>(), g.at("accept").get<double>(), g.at("unaccept").get<double>()};
    b.verdict = {j.at("verdict_bounds").at("low").get<double>(), j.at("verdict_bounds").at("high").get<double>()};
    for (const auto& m : j.at("models")) b.models.push_back(trained_model_from_json(m));
    for (const auto& m : b.models) {
      if (m.n_features() != b.vocabulary.size()) throw Error(ErrorKind::MalformedBundle, "model width differs from vocabulary");
    }
    if (!b.capability.is_selected(b.best_fit)) throw Error(ErrorKind::MalformedBundle, "best_fit is not a selected algorithm");
    (void)b.best_model();
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedBundle, e.what());
  }
}

inline std::string serialize_bundle(const ModelBundle& b) { return to_json(b).dump(); }

inline void save_bundle(const ModelBundle& b, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + tmp);
    out << serialize_bundle(b);
    if (!out.flush()) throw Error(ErrorKind::IoFailure, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot replace " + path.string() + ": " + ec.message());
}

inline ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::BundleMissing, "no model bundle at " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedBundle, e.what());
  }
  return bundle_from_json(j);
}

}  // namespace veridict
