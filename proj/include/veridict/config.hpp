#pragma once

// Flat key-value configuration file with sections (INI syntax).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "veridict/augment_gate.hpp"
#include "veridict/authenticity.hpp"
#include "veridict/classifiers.hpp"
#include "veridict/error.hpp"
#include "veridict/harvester.hpp"
#include "veridict/text_features.hpp"

namespace veridict {

struct PipelineConfig {
  std::uint64_t seed = 42;
  double split_ratio = 0.8;
  std::size_t probe_rows = kProbeRows;
  VectorizerConfig vectorizer;
  Hyperparams hyperparams;
  GateConfig gate;
  VerdictBounds verdict;
  CrawlConfig crawl;
  std::filesystem::path data_path = "corpus.csv";
  std::filesystem::path bundle_path = "veridict.bundle.json";
  /// Directory for run reports; empty disables them.
  std::filesystem::path report_dir = "reports";

  void validate() const {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw Error(ErrorKind::InvalidConfig, "split_ratio must lie in (0, 1)");
    if (probe_rows < 2) throw Error(ErrorKind::InvalidConfig, "probe_rows must be at least 2");
    gate.validate();
    if (!(0.0 <= verdict.low && verdict.low < verdict.high && verdict.high <= 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "verdict bounds must satisfy 0 <= low < high <= 1");
    }
    crawl.validate();
  }
};

namespace detail {

inline std::string join_algorithms(const std::set<AlgorithmId>& ids) {
  std::string s;
  for (auto id : ids) {
    if (!s.empty()) s += ',';
    s += to_string(id);
  }
  return s;
}

inline std::set<AlgorithmId> parse_algorithm_list(const std::string& text) {
  std::set<AlgorithmId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto name = trim_view(item);
    if (name.empty()) continue;
    auto id = parse_algorithm(name);
    if (!id) throw Error(ErrorKind::InvalidConfig, "unknown algorithm '" + std::string(name) + "'");
    out.insert(*id);
  }
  return out;
}

}  // namespace detail

/// Every key the config file understands, with the current values. Writing
/// this out gives a complete config file.
inline std::string render_config(const PipelineConfig& c) {
  std::ostringstream o;
  o.precision(15);
  const auto& h = c.hyperparams;
  o << "[paths]\n"
    << "data = " << c.data_path.string() << "\n"
    << "bundle = " << c.bundle_path.string() << "\n"
    << "reports = " << c.report_dir.string() << "\n\n"
    << "[run]\n"
    << "seed = " << c.seed << "\n"
    << "split_ratio = " << c.split_ratio << "\n"
    << "probe_rows = " << c.probe_rows << "\n\n"
    << "[vectorizer]\n"
    << "min_df = " << c.vectorizer.min_df << "\n"
    << "max_features = " << c.vectorizer.max_features << "\n\n"
    << "[budget]\n"
    << "max_dense_cells = " << h.budget.max_dense_cells << "\n"
    << "disabled = " << detail::join_algorithms(h.disabled) << "\n\n"
    << "[lr]\n"
    << "learning_rate = " << h.lr.learning_rate << "\n"
    << "epochs = " << h.lr.epochs << "\n"
    << "l2 = " << h.lr.l2 << "\n\n"
    << "[lda]\n"
    << "shrinkage = " << h.lda.shrinkage << "\n\n"
    << "[kn]\n"
    << "k = " << h.kn.k << "\n\n"
    << "[cart]\n"
    << "max_depth = " << h.cart.max_depth << "\n"
    << "min_samples_split = " << h.cart.min_samples_split << "\n\n"
    << "[nb]\n"
    << "var_smoothing = " << h.nb.var_smoothing << "\n\n"
    << "[svm]\n"
    << "c = " << h.svm.c << "\n"
    << "epochs = " << h.svm.epochs << "\n\n"
    << "[pac]\n"
    << "c = " << h.pac.c << "\n"
    << "epochs = " << h.pac.epochs << "\n\n"
    << "[gate]\n"
    << "alpha = " << c.gate.alpha << "\n"
    << "accept = " << c.gate.accept << "\n"
    << "unaccept = " << c.gate.unaccept << "\n\n"
    << "[verdict]\n"
    << "low = " << c.verdict.low << "\n"
    << "high = " << c.verdict.high << "\n\n"
    << "[crawl]\n"
    << "max_depth = " << c.crawl.max_depth << "\n"
    << "max_pages = " << c.crawl.max_pages << "\n"
    << "same_host_only = " << (c.crawl.same_host_only ? "true" : "false") << "\n"
    << "fetch_timeout = " << c.crawl.fetch_timeout_seconds << "\n"
    << "politeness_delay_ms = " << c.crawl.politeness_delay.count() << "\n"
    << "max_concurrent_fetches = " << c.crawl.max_concurrent_fetches << "\n"
    << "min_text_words = " << c.crawl.min_text_words << "\n"
    << "respect_robots = " << (c.crawl.respect_robots ? "true" : "false") << "\n"
    << "log = " << c.crawl.log_path.string() << "\n";
  return o.str();
}

/// Parses a config file over the defaults. Unknown sections or keys are
/// rejected, and the three gate thresholds must be present.
inline PipelineConfig parse_config(const std::string& text, PipelineConfig c = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }

  auto& h = c.hyperparams;
  bool gate_keys[3] = {false, false, false};
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw Error(ErrorKind::InvalidConfig, "key '" + section + "' outside any section");
    }
    for (const auto& [key, node] : body) {
      const std::string value = node.get_value<std::string>();
      const std::string name = section + "." + key;
      auto as = [&]<typename T>(T& target) {
        try {
          target = node.get_value<T>();
        } catch (const pt::ptree_bad_data&) {
          throw Error(ErrorKind::InvalidConfig, "bad value for " + name + ": '" + value + "'");
        }
      };
      auto as_size = [&](std::size_t& target) {
        long long v = 0;
        as(v);
        if (v < 0) throw Error(ErrorKind::InvalidConfig, name + " must be non-negative");
        target = static_cast<std::size_t>(v);
      };
      auto as_bool = [&](bool& target) {
        const auto v = detail::ascii_lower(detail::trim_view(value));
        if (v == "true" || v == "1" || v == "yes") target = true;
        else if (v == "false" || v == "0" || v == "no") target = false;
        else throw Error(ErrorKind::InvalidConfig, "bad boolean for " + name + ": '" + value + "'");
      };

      if (name == "paths.data") c.data_path = value;
      else if (name == "paths.bundle") c.bundle_path = value;
      else if (name == "paths.reports") c.report_dir = value;
      else if (name == "run.seed") as(c.seed);
      else if (name == "run.split_ratio") as(c.split_ratio);
      else if (name == "run.probe_rows") as_size(c.probe_rows);
      else if (name == "vectorizer.min_df") as_size(c.vectorizer.min_df);
      else if (name == "vectorizer.max_features") as_size(c.vectorizer.max_features);
      else if (name == "budget.max_dense_cells") as_size(h.budget.max_dense_cells);
      else if (name == "budget.disabled") h.disabled = detail::parse_algorithm_list(value);
      else if (name == "lr.learning_rate") as(h.lr.learning_rate);
      else if (name == "lr.epochs") as(h.lr.epochs);
      else if (name == "lr.l2") as(h.lr.l2);
      else if (name == "lda.shrinkage") as(h.lda.shrinkage);
      else if (name == "kn.k") as_size(h.kn.k);
      else if (name == "cart.max_depth") as_size(h.cart.max_depth);
      else if (name == "cart.min_samples_split") as_size(h.cart.min_samples_split);
      else if (name == "nb.var_smoothing") as(h.nb.var_smoothing);
      else if (name == "svm.c") as(h.svm.c);
      else if (name == "svm.epochs") as(h.svm.epochs);
      else if (name == "pac.c") as(h.pac.c);
      else if (name == "pac.epochs") as(h.pac.epochs);
      else if (name == "gate.alpha") { as(c.gate.alpha); gate_keys[0] = true; }
      else if (name == "gate.accept") { as(c.gate.accept); gate_keys[1] = true; }
      else if (name == "gate.unaccept") { as(c.gate.unaccept); gate_keys[2] = true; }
      else if (name == "verdict.low") as(c.verdict.low);
      else if (name == "verdict.high") as(c.verdict.high);
      else if (name == "crawl.max_depth") as_size(c.crawl.max_depth);
      else if (name == "crawl.max_pages") as_size(c.crawl.max_pages);
      else if (name == "crawl.same_host_only") as_bool(c.crawl.same_host_only);
      else if (name == "crawl.fetch_timeout") as(c.crawl.fetch_timeout_seconds);
      else if (name == "crawl.politeness_delay_ms") {
        long long ms = 0;
        as(ms);
        c.crawl.politeness_delay = std::chrono::milliseconds(ms);
      }
      else if (name == "crawl.max_concurrent_fetches") as_size(c.crawl.max_concurrent_fetches);
      else if (name == "crawl.min_text_words") as_size(c.crawl.min_text_words);
      else if (name == "crawl.respect_robots") as_bool(c.crawl.respect_robots);
      else if (name == "crawl.log") c.crawl.log_path = value;
      else throw Error(ErrorKind::InvalidConfig, "unknown config key '" + name + "'");
    }
  }
  if (!gate_keys[0] || !gate_keys[1] || !gate_keys[2]) {
    throw Error(ErrorKind::InvalidConfig, "config file must set gate.alpha, gate.accept and gate.unaccept");
  }
  c.validate();
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace veridict
