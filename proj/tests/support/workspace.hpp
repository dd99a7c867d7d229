#pragma once

// Scratch directory with a corpus, bundle and report paths for pipeline runs.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "veridict/config.hpp"

namespace veridict::fixtures {

class Workspace {
 public:
  explicit Workspace(const std::string& tag) {
    static std::atomic<int> counter{0};
    dir_ = std::filesystem::temp_directory_path() /
           ("veridict-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  ~Workspace() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path data() const { return dir_ / "corpus.csv"; }
  std::filesystem::path bundle() const { return dir_ / "bundle.json"; }
  std::filesystem::path reports() const { return dir_ / "reports"; }

  /// Defaults pointed at this workspace, with a crawl tuned for local fixtures.
  PipelineConfig config() const {
    PipelineConfig c;
    c.data_path = data();
    c.bundle_path = bundle();
    c.report_dir = reports();
    c.crawl.politeness_delay = std::chrono::milliseconds(1);
    c.crawl.respect_robots = false;
    c.crawl.fetch_timeout_seconds = 5;
    return c;
  }

  static std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace veridict::fixtures
