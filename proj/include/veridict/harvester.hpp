#pragma once

// Breadth-first site crawler and news article extractor.

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "veridict/error.hpp"
#include "veridict/html.hpp"
#include "veridict/text_features.hpp"
#include "veridict/url.hpp"

namespace veridict {

inline constexpr std::string_view kUserAgent = "veridict-crawler/1.0";

struct CrawlConfig {
  /// Root is depth 0; 2 covers links and their sub-links.
  std::size_t max_depth = 2;
  std::size_t max_pages = 600;
  bool same_host_only = true;
  double fetch_timeout_seconds = 10.0;
  std::chrono::milliseconds politeness_delay{250};
  std::size_t max_concurrent_fetches = 8;
  std::size_t min_text_words = 30;
  bool respect_robots = true;
  /// JSON-lines crawl log; empty disables it.
  std::filesystem::path log_path;

  void validate() const {
    if (max_depth < 1 || max_pages < 1 || !(fetch_timeout_seconds > 0.0) || politeness_delay.count() < 0 ||
        max_concurrent_fetches < 1) {
      throw Error(ErrorKind::InvalidConfig, "crawl limits must be positive");
    }
  }
};

struct ExtractedArticle {
  std::string url;
  std::string title;
  std::string text;
  std::size_t word_count = 0;

  friend bool operator==(const ExtractedArticle&, const ExtractedArticle&) = default;
};

/// Marker for pages without extractable news content.
struct NoContent {
  std::string reason;
};

namespace detail {

/// Serializes requests per host and spaces them by the politeness delay.
class HostThrottle {
 public:
  static HostThrottle& instance() {
    static HostThrottle throttle;
    return throttle;
  }

  template <typename F>
  auto run(const std::string& host_key, std::chrono::milliseconds delay, F&& fn) {
    std::shared_ptr<Slot> slot;
    {
      std::lock_guard lock(mutex_);
      auto& s = slots_[host_key];
      if (!s) s = std::make_shared<Slot>();
      slot = s;
    }
    std::lock_guard host_lock(slot->mutex);
    if (slot->used) {
      const auto ready = slot->last_finish + delay;
      std::this_thread::sleep_until(ready);
    }
    struct Mark {
      Slot& s;
      ~Mark() {
        s.last_finish = std::chrono::steady_clock::now();
        s.used = true;
      }
    } mark{*slot};
    return fn();
  }

 private:
  struct Slot {
    std::mutex mutex;
    std::chrono::steady_clock::time_point last_finish{};
    bool used = false;
  };
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

inline bool is_html_content_type(std::string_view content_type) {
  const std::string lower = detail::ascii_lower(content_type);
  return lower.find("text/html") != std::string::npos || lower.find("application/xhtml+xml") != std::string::npos;
}

struct RawResponse {
  int status = 0;
  std::string content_type;
  std::string body;
};

inline RawResponse http_get(const Url& url, const CrawlConfig& config) {
  {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    std::string host = url.host;
    if (host.size() > 2 && host.front() == '[') host = host.substr(1, host.size() - 2);
    const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &result);
    if (result) ::freeaddrinfo(result);
    if (rc != 0) throw Error(ErrorKind::DnsFailure, "cannot resolve " + url.host);
  }

  httplib::Client client(url.origin());
  if (!client.is_valid()) throw Error(ErrorKind::IoFailure, "unsupported URL " + url.str());
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config.fetch_timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_follow_location(true);
  httplib::Headers headers{{"User-Agent", std::string(kUserAgent)}, {"Accept", "text/html,application/xhtml+xml"}};

  auto res = client.Get(url.target(), headers);
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw Error(ErrorKind::Timeout, "fetching " + url.str() + ": " + httplib::to_string(err));
    }
    throw Error(ErrorKind::IoFailure, "fetching " + url.str() + ": " + httplib::to_string(err));
  }
  return {res->status, res->get_header_value("Content-Type"), res->body};
}

}  // namespace detail

/// GETs an http(s) page and returns its body. Requires a 2xx status and an
/// HTML content type.
inline std::string fetch_page(const Url& url, const CrawlConfig& config = {}) {
  if (!url.is_http()) throw Error(ErrorKind::InvalidConfig, "not an http(s) URL: " + url.str());
  auto response = detail::HostThrottle::instance().run(
      url.origin(), config.politeness_delay, [&] { return detail::http_get(url, config); });
  if (response.status < 200 || response.status >= 300) throw Error::http(response.status, url.str());
  if (!detail::is_html_content_type(response.content_type)) {
    throw Error(ErrorKind::NotHtml, url.str() + " has content type '" + response.content_type + "'");
  }
  return std::move(response.body);
}

inline std::string fetch_page(std::string_view url, const CrawlConfig& config = {}) {
  auto parsed = parse_url(url);
  if (!parsed) throw Error(ErrorKind::InvalidConfig, "malformed URL: " + std::string(url));
  return fetch_page(*parsed, config);
}

namespace detail {

inline bool same_site(const Url& a, const Url& b) {
  return a.host == b.host && a.effective_port() == b.effective_port();
}

struct LinkTarget {
  Url fetch;       // resolved, fragment removed, otherwise as written
  Url normalized;  // dedup key
};

inline std::vector<LinkTarget> link_targets(std::string_view page, const Url& base, const CrawlConfig& config) {
  const Url page_url = normalize(base);
  Url resolve_base = base;
  std::vector<LinkTarget> links;
  std::unordered_set<std::string> seen;
  for (const auto& token : html::tokenize(page)) {
    if (token.type != html::Token::Type::StartTag) continue;
    if (token.name == "base") {
      if (auto href = token.attribute("href")) {
        if (auto b = resolve(base, *href); b && b->is_http()) resolve_base = *b;
      }
      continue;
    }
    if (token.name != "a" && token.name != "area") continue;
    const auto href = token.attribute("href");
    if (!href) continue;
    auto target = resolve(resolve_base, *href);
    if (!target || !target->is_http()) continue;
    target->fragment.reset();
    Url normalized = normalize(*target);
    if (config.same_host_only && !same_site(normalized, page_url)) continue;
    if (seen.insert(normalized.str()).second) links.push_back({std::move(*target), std::move(normalized)});
  }
  return links;
}

}  // namespace detail

/// Anchor targets resolved against `base` (or a <base href>), normalized and
/// deduplicated in first-seen order. Non-http(s) targets are dropped.
inline std::vector<Url> collect_links(std::string_view page, const Url& base, const CrawlConfig& config = {}) {
  std::vector<Url> out;
  for (auto& t : detail::link_targets(page, base, config)) out.push_back(std::move(t.normalized));
  return out;
}

namespace detail {

inline bool skipped_element(std::string_view name) {
  return name == "script" || name == "style" || name == "nav" || name == "noscript" || name == "template";
}

inline bool closes_paragraph(std::string_view name) {
  static constexpr std::string_view blocks[] = {
      "address", "article", "aside", "blockquote", "div", "dl", "fieldset", "figure", "footer", "form",
      "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "ol", "pre", "section", "table", "ul"};
  return std::find(std::begin(blocks), std::end(blocks), name) != std::end(blocks);
}

}  // namespace detail

/// Title is the first non-empty <h1>, else <title>. Text is the <p>
/// contents in document order, outside script/style/nav. Pages without a
/// title or with fewer than min_text_words words yield NoContent.
inline std::variant<ExtractedArticle, NoContent> extract_article(std::string_view page, std::string_view url,
                                                                 const CrawlConfig& config = {}) {
  std::string h1_title, doc_title, current_h1, current_p;
  std::vector<std::string> paragraphs;
  int skip_depth = 0;
  bool in_h1 = false, in_p = false, in_title = false;

  auto close_paragraph = [&] {
    if (in_p) {
      auto p = html::collapse_whitespace(current_p);
      if (!p.empty()) paragraphs.push_back(std::move(p));
    }
    current_p.clear();
    in_p = false;
  };
  auto close_h1 = [&] {
    if (in_h1 && h1_title.empty()) h1_title = html::collapse_whitespace(current_h1);
    current_h1.clear();
    in_h1 = false;
  };

  for (const auto& token : html::tokenize(page)) {
    using Type = html::Token::Type;
    if (token.type == Type::StartTag) {
      if (detail::skipped_element(token.name) && !token.self_closing) {
        ++skip_depth;
        continue;
      }
      if (token.name == "title") in_title = true;
      if (detail::closes_paragraph(token.name) || token.name == "p") close_paragraph();
      if (token.name == "h1") {
        close_h1();
        in_h1 = skip_depth == 0;
      } else if (token.name == "p") {
        in_p = skip_depth == 0;
      } else if (token.name == "br") {
        if (in_p) current_p.push_back(' ');
        if (in_h1) current_h1.push_back(' ');
      }
    } else if (token.type == Type::EndTag) {
      if (detail::skipped_element(token.name)) {
        if (skip_depth > 0) --skip_depth;
        continue;
      }
      if (token.name == "title") in_title = false;
      if (token.name == "h1") close_h1();
      if (token.name == "p" || (detail::closes_paragraph(token.name) && token.name != "h1")) close_paragraph();
    } else {
      if (in_title && doc_title.empty()) {
        doc_title = html::collapse_whitespace(token.text);
        continue;
      }
      if (skip_depth > 0) continue;
      if (in_h1) current_h1 += token.text;
      if (in_p) current_p += token.text;
    }
  }
  close_paragraph();
  close_h1();

  const std::string& title = !h1_title.empty() ? h1_title : doc_title;
  if (title.empty()) return NoContent{"no title"};

  std::string text;
  for (const auto& p : paragraphs) {
    if (!text.empty()) text += '\n';
    text += p;
  }
  const std::size_t words = word_count(text);
  if (words < config.min_text_words || words == 0) {
    return NoContent{"only " + std::to_string(words) + " words of paragraph text"};
  }
  return ExtractedArticle{std::string(url), title, std::move(text), words};
}

/// Prefix-based robots.txt rules for one host.
class RobotsRules {
 public:
  /// Parses the group for our user-agent, falling back to '*'.
  static RobotsRules parse(std::string_view body) {
    struct Group {
      std::vector<std::string> agents;
      std::vector<std::pair<bool, std::string>> rules;  // (allow, prefix)
    };
    std::vector<Group> groups;
    bool last_was_agent = false;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      auto eol = body.find('\n', pos);
      if (eol == std::string_view::npos) eol = body.size();
      std::string_view line = body.substr(pos, eol - pos);
      pos = eol + 1;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) continue;
      const std::string key = detail::ascii_lower(detail::trim_view(line.substr(0, colon)));
      const std::string value(detail::trim_view(line.substr(colon + 1)));
      if (key == "user-agent") {
        if (!last_was_agent || groups.empty()) groups.emplace_back();
        groups.back().agents.push_back(detail::ascii_lower(value));
        last_was_agent = true;
        continue;
      }
      last_was_agent = false;
      if (groups.empty()) continue;
      if (key == "disallow" && !value.empty()) groups.back().rules.emplace_back(false, value);
      else if (key == "allow" && !value.empty()) groups.back().rules.emplace_back(true, value);
    }
    const std::string ours = detail::ascii_lower(std::string(kUserAgent.substr(0, kUserAgent.find('/'))));
    const Group* chosen = nullptr;
    for (const auto& g : groups) {
      for (const auto& a : g.agents) {
        if (a == ours) chosen = &g;
      }
    }
    if (!chosen) {
      for (const auto& g : groups) {
        for (const auto& a : g.agents) {
          if (a == "*" && !chosen) chosen = &g;
        }
      }
    }
    RobotsRules rules;
    if (chosen) rules.rules_ = chosen->rules;
    return rules;
  }

  /// Longest matching prefix wins; allow wins ties.
  bool allowed(std::string_view target) const {
    std::size_t best_len = 0;
    bool allow = true;
    for (const auto& [is_allow, prefix] : rules_) {
      if (target.starts_with(prefix) && (prefix.size() > best_len || (prefix.size() == best_len && is_allow))) {
        best_len = prefix.size();
        allow = is_allow;
      }
    }
    return allow;
  }

 private:
  std::vector<std::pair<bool, std::string>> rules_;
};

struct CrawlLogEntry {
  std::string url;
  std::size_t depth = 0;
  int status = 0;
  /// "article", "no-content", "robots-disallowed" or "error:<Kind>".
  std::string outcome;
};

struct CrawlResult {
  std::vector<std::string> links_visited;
  std::vector<ExtractedArticle> articles;
  std::vector<CrawlLogEntry> log;
};

namespace detail {

struct FetchOutcome {
  std::optional<std::string> body;
  std::optional<Error> error;
};

inline std::vector<FetchOutcome> fetch_all(const std::vector<Url>& urls, const CrawlConfig& config) {
  std::vector<FetchOutcome> out(urls.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < urls.size(); i = next++) {
      try {
        out[i].body = fetch_page(urls[i], config);
      } catch (const Error& e) {
        out[i].error = e;
      } catch (const std::exception& e) {
        out[i].error = Error(ErrorKind::IoFailure, e.what());
      }
    }
  };
  const std::size_t n_workers = std::min(config.max_concurrent_fetches, urls.size());
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
  for (auto& t : workers) t.join();
  return out;
}

inline void write_log(const std::filesystem::path& path, const std::vector<CrawlLogEntry>& log) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write crawl log " + path.string());
  for (const auto& e : log) {
    out << nlohmann::json{{"url", e.url}, {"depth", e.depth}, {"status", e.status}, {"outcome", e.outcome}}.dump()
        << '\n';
  }
}

}  // namespace detail

/// Breadth-first crawl from root to max_depth, at most max_pages fetches,
/// no URL fetched twice. Pages are fetched concurrently per frontier level
/// and processed in frontier order, so the result is deterministic for a
/// fixed site. Only a failing root aborts the crawl.
inline CrawlResult crawl_site(std::string_view root_url, const CrawlConfig& config = {}) {
  config.validate();
  auto parsed = parse_url(root_url);
  if (!parsed || !parsed->is_http()) throw Error(ErrorKind::InvalidConfig, "malformed root URL: " + std::string(root_url));
  parsed->fragment.reset();
  const Url root = normalize(*parsed);

  CrawlResult result;
  std::map<std::string, RobotsRules> robots;
  auto robots_allow = [&](const Url& u) {
    if (!config.respect_robots) return true;
    const auto key = u.origin();
    auto it = robots.find(key);
    if (it == robots.end()) {
      Url robots_url = u;
      robots_url.path = "/robots.txt";
      robots_url.query.reset();
      RobotsRules rules;
      try {
        auto response = detail::HostThrottle::instance().run(
            key, config.politeness_delay, [&] { return detail::http_get(robots_url, config); });
        if (response.status >= 200 && response.status < 300) rules = RobotsRules::parse(response.body);
      } catch (const Error&) {
        // Unreachable robots.txt: treat as allow-all.
      }
      it = robots.emplace(key, std::move(rules)).first;
    }
    return it->second.allowed(u.target());
  };

  std::unordered_set<std::string> seen{root.str()};
  std::vector<detail::LinkTarget> frontier{{*parsed, root}};
  std::size_t queued = 1;
  for (std::size_t depth = 0; depth <= config.max_depth && !frontier.empty(); ++depth) {
    std::vector<Url> to_fetch, keys;
    for (auto& t : frontier) {
      if (robots_allow(t.fetch)) {
        to_fetch.push_back(std::move(t.fetch));
        keys.push_back(std::move(t.normalized));
      } else {
        result.log.push_back({t.normalized.str(), depth, 0, "robots-disallowed"});
        if (depth == 0) {
          detail::write_log(config.log_path, result.log);
          throw Error(ErrorKind::RootUnreachable, root.str() + " is disallowed by robots.txt");
        }
      }
    }
    const auto outcomes = detail::fetch_all(to_fetch, config);

    std::vector<detail::LinkTarget> next;
    for (std::size_t i = 0; i < to_fetch.size(); ++i) {
      const auto url = keys[i].str();
      result.links_visited.push_back(url);
      const auto& outcome = outcomes[i];
      if (outcome.error) {
        result.log.push_back({url, depth, outcome.error->status(),
                              "error:" + std::string(to_string(outcome.error->kind()))});
        if (depth == 0) {
          detail::write_log(config.log_path, result.log);
          throw Error(ErrorKind::RootUnreachable, std::string(outcome.error->what()));
        }
        continue;
      }
      auto extracted = extract_article(*outcome.body, url, config);
      const bool is_article = std::holds_alternative<ExtractedArticle>(extracted);
      result.log.push_back({url, depth, 200, is_article ? "article" : "no-content"});
      if (is_article) result.articles.push_back(std::get<ExtractedArticle>(std::move(extracted)));

      if (depth == config.max_depth) continue;
      for (auto& link : detail::link_targets(*outcome.body, to_fetch[i], config)) {
        if (queued >= config.max_pages) break;
        if (seen.insert(link.normalized.str()).second) {
          next.push_back(std::move(link));
          ++queued;
        }
      }
    }
    frontier = std::move(next);
  }
  detail::write_log(config.log_path, result.log);
  return result;
}

}  // namespace veridict
