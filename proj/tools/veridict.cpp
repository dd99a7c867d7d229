// veridict: train, grow and query a fake-news classifier bundle.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "veridict/veridict.hpp"

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string bundle;
  std::string data;
  std::string reports;
  bool json = false;
};

veridict::PipelineConfig resolve(const Globals& g) {
  veridict::PipelineConfig c = g.config_path.empty() ? veridict::PipelineConfig{} : veridict::load_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  if (!g.bundle.empty()) c.bundle_path = g.bundle;
  if (!g.data.empty()) c.data_path = g.data;
  if (!g.reports.empty()) c.report_dir = g.reports == "none" ? std::filesystem::path{} : std::filesystem::path(g.reports);
  c.validate();
  return c;
}

void emit(const veridict::RunReport& r, bool json) {
  if (json) std::cout << veridict::to_json(r).dump(2) << '\n';
  else std::cout << veridict::render_report(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"veridict - fake news detection and corpus growth"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Globals g;
  app.add_option("--config", g.config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (overrides config)");
  app.add_option("--bundle", g.bundle, "model bundle path (overrides config)");
  app.add_option("--data", g.data, "corpus CSV path (overrides config)");
  app.add_option("--reports", g.reports, "run report directory, 'none' to disable (overrides config)");
  app.add_flag("--json", g.json, "print the run report as JSON");

  auto* train = app.add_subcommand("train", "train all capable classifiers on the corpus and save the bundle");

  std::string url;
  std::string label_text;
  auto* ingest = app.add_subcommand("ingest", "crawl a source and add its articles under one label");
  ingest->add_option("--url", url, "root URL")->required();
  ingest->add_option("--label", label_text, "REAL or FAKE")->required();

  auto* scan_site = app.add_subcommand("scan-site", "crawl an outlet, score its authenticity, maybe grow the corpus");
  scan_site->add_option("--url", url, "root URL")->required();

  auto* scan_link = app.add_subcommand("scan-link", "classify one article, maybe add it to the corpus");
  scan_link->add_option("--url", url, "article URL")->required();

  auto* stats = app.add_subcommand("stats", "show the saved bundle's evaluation");

  auto* print_config = app.add_subcommand("print-config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto config = resolve(g);
    if (*train) {
      emit(veridict::cmd_train(config.data_path, config).report, g.json);
    } else if (*ingest) {
      const auto label = veridict::parse_label(label_text);
      if (!label) throw veridict::Error(veridict::ErrorKind::InvalidConfig, "label must be REAL or FAKE");
      emit(veridict::cmd_ingest(url, *label, config.data_path, config), g.json);
    } else if (*scan_site) {
      emit(veridict::cmd_scan_site(url, config.bundle_path, config.data_path, config).report, g.json);
    } else if (*scan_link) {
      emit(veridict::cmd_scan_link(url, config.bundle_path, config.data_path, config), g.json);
    } else if (*stats) {
      emit(veridict::cmd_stats(config.bundle_path), g.json);
    } else if (*print_config) {
      std::cout << veridict::render_config(config);
    }
  } catch (const veridict::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return veridict::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
