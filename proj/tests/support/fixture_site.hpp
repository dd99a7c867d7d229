#pragma once

// In-process HTTP site on 127.0.0.1 with a request log, for offline crawl tests.

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

namespace veridict::fixtures {

struct FixturePage {
  int status = 200;
  std::string content_type = "text/html; charset=utf-8";
  std::string body;
  std::chrono::milliseconds delay{0};
};

class FixtureSite {
 public:
  FixtureSite() = default;
  FixtureSite(const FixtureSite&) = delete;
  FixtureSite& operator=(const FixtureSite&) = delete;
  ~FixtureSite() { stop(); }

  void add(const std::string& path, FixturePage page) { pages_[path] = std::move(page); }
  void add_html(const std::string& path, std::string body) { pages_[path] = FixturePage{200, "text/html; charset=utf-8", std::move(body), {}}; }

  void start() {
    server_.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mutex_);
        log_.push_back(req.path + (req.params.empty() ? "" : "?query"));
        agents_.push_back(req.get_header_value("User-Agent"));
      }
      auto it = pages_.find(req.path);
      if (it == pages_.end()) {
        res.status = 404;
        res.set_content("not found", "text/plain");
        return;
      }
      if (it->second.delay.count() > 0) std::this_thread::sleep_for(it->second.delay);
      res.status = it->second.status;
      res.set_content(it->second.body, it->second.content_type);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  int port() const { return port_; }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::string url(const std::string& path) const { return base() + path; }

  std::vector<std::string> requests() const {
    std::lock_guard lock(mutex_);
    return log_;
  }
  std::vector<std::string> user_agents() const {
    std::lock_guard lock(mutex_);
    return agents_;
  }
  void clear_log() {
    std::lock_guard lock(mutex_);
    log_.clear();
    agents_.clear();
  }

 private:
  httplib::Server server_;
  std::map<std::string, FixturePage> pages_;
  mutable std::mutex mutex_;
  std::vector<std::string> log_;
  std::vector<std::string> agents_;
  std::thread thread_;
  int port_ = 0;
};

inline std::string link_page(const std::string& title, const std::vector<std::string>& hrefs) {
  std::string body = "<!doctype html><html><head><title>" + title + "</title></head><body><nav>";
  for (const auto& h : hrefs) body += "<a href=\"" + h + "\">link</a> ";
  body += "</nav><p>short index blurb</p></body></html>";
  return body;
}

inline std::string article_page(const std::string& headline, const std::vector<std::string>& paragraphs,
                                 const std::vector<std::string>& hrefs = {}) {
  std::string body = "<html><head><title>Site | " + headline + "</title><script>var x = '<p>not text</p>';</script>"
                     "</head><body><nav><p>menu words should never count</p></nav><h1>" + headline + "</h1>";
  for (const auto& p : paragraphs) body += "<p>" + p + "</p>\n";
  for (const auto& h : hrefs) body += "<a href=\"" + h + "\">more</a>";
  body += "</body></html>";
  return body;
}

}  // namespace veridict::fixtures
