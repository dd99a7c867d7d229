#pragma once

// Absolute URL parsing, reference resolution and normalization.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace veridict {

struct Url {
  std::string scheme;  // lowercase
  std::string host;    // lowercase
  std::optional<int> port;  // absent when default for the scheme
  std::string path;    // starts with '/' for http(s)
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  bool is_http() const { return scheme == "http" || scheme == "https"; }

  int effective_port() const { return port ? *port : (scheme == "https" ? 443 : 80); }

  /// scheme://host[:port]
  std::string origin() const {
    std::string s = scheme + "://" + host;
    if (port) s += ":" + std::to_string(*port);
    return s;
  }

  /// path[?query]
  std::string target() const {
    std::string s = path.empty() ? "/" : path;
    if (query) s += "?" + *query;
    return s;
  }

  std::string str() const {
    std::string s = origin() + target();
    if (fragment) s += "#" + *fragment;
    return s;
  }

  friend bool operator==(const Url&, const Url&) = default;
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string_view trim_view(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

struct UriRef {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

inline UriRef split_reference(std::string_view s) {
  UriRef r;
  if (auto hash = s.find('#'); hash != std::string_view::npos) {
    r.fragment = std::string(s.substr(hash + 1));
    s = s.substr(0, hash);
  }
  if (auto q = s.find('?'); q != std::string_view::npos) {
    r.query = std::string(s.substr(q + 1));
    s = s.substr(0, q);
  }
  // scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ) ":"
  if (auto colon = s.find(':'); colon != std::string_view::npos && colon > 0) {
    bool ok = std::isalpha(static_cast<unsigned char>(s[0])) != 0;
    for (std::size_t i = 1; i < colon && ok; ++i) {
      const char c = s[i];
      ok = std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
    }
    if (ok) {
      r.scheme = ascii_lower(s.substr(0, colon));
      s = s.substr(colon + 1);
    }
  }
  if (s.starts_with("//")) {
    s = s.substr(2);
    const auto slash = s.find('/');
    r.authority = std::string(s.substr(0, slash));
    s = slash == std::string_view::npos ? std::string_view{} : s.substr(slash);
  }
  r.path = std::string(s);
  return r;
}

inline std::string remove_dot_segments(std::string_view in) {
  std::vector<std::string_view> out;
  const bool absolute = in.starts_with('/');
  bool trailing = false;
  std::size_t i = absolute ? 1 : 0;
  while (i <= in.size()) {
    auto next = in.find('/', i);
    if (next == std::string_view::npos) next = in.size();
    const auto seg = in.substr(i, next - i);
    trailing = false;
    if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing = true;
    } else if (seg == ".") {
      trailing = true;
    } else {
      out.push_back(seg);
    }
    i = next + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k) result += '/';
    result += out[k];
  }
  if (trailing && !result.ends_with('/')) result += '/';
  return result;
}

inline std::string merge_paths(const Url& base, std::string_view ref_path) {
  if (base.path.empty()) return "/" + std::string(ref_path);
  const auto slash = base.path.rfind('/');
  return base.path.substr(0, slash + 1) + std::string(ref_path);
}

inline bool parse_authority(std::string_view authority, Url& url) {
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  std::string_view host = authority;
  std::optional<int> port;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return false;
    host = authority.substr(0, close + 1);
    authority = authority.substr(close + 1);
    if (authority.starts_with(':')) authority = authority.substr(1);
    else authority = {};
  } else if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    authority = authority.substr(colon + 1);
  } else {
    authority = {};
  }
  if (!authority.empty()) {
    int p = 0;
    for (char c : authority) {
      if (c < '0' || c > '9' || p > 65535) return false;
      p = p * 10 + (c - '0');
    }
    port = p;
  }
  if (host.empty()) return false;
  url.host = ascii_lower(host);
  url.port = port;
  return true;
}

}  // namespace detail

/// Normalizes in place: default port dropped, fragment stripped, empty path
/// becomes "/", trailing slash removed from non-root paths.
inline Url normalize(Url url) {
  url.scheme = detail::ascii_lower(url.scheme);
  url.host = detail::ascii_lower(url.host);
  if (url.port && *url.port == (url.scheme == "https" ? 443 : url.scheme == "http" ? 80 : -1)) url.port.reset();
  url.fragment.reset();
  if (url.path.empty()) url.path = "/";
  while (url.path.size() > 1 && url.path.back() == '/') url.path.pop_back();
  return url;
}

/// Parses an absolute URL. Returns nullopt for relative references or
/// references without an authority.
inline std::optional<Url> parse_url(std::string_view text) {
  auto ref = detail::split_reference(detail::trim_view(text));
  if (!ref.scheme || !ref.authority) return std::nullopt;
  Url url;
  url.scheme = *ref.scheme;
  if (!detail::parse_authority(*ref.authority, url)) return std::nullopt;
  url.path = detail::remove_dot_segments(ref.path.empty() ? "/" : ref.path);
  url.query = ref.query;
  url.fragment = ref.fragment;
  return url;
}

/// Resolves a reference (href) against an absolute base URL. Returns nullopt
/// for non-hierarchical references such as mailto: or javascript:.
inline std::optional<Url> resolve(const Url& base, std::string_view reference) {
  const auto trimmed = detail::trim_view(reference);
  auto ref = detail::split_reference(trimmed);
  Url out;
  if (ref.scheme) {
    if (!ref.authority) return std::nullopt;
    return parse_url(trimmed);
  }
  out.scheme = base.scheme;
  if (ref.authority) {
    if (!detail::parse_authority(*ref.authority, out)) return std::nullopt;
    out.path = detail::remove_dot_segments(ref.path.empty() ? "/" : ref.path);
    out.query = ref.query;
  } else {
    out.host = base.host;
    out.port = base.port;
    if (ref.path.empty()) {
      out.path = base.path;
      out.query = ref.query ? ref.query : base.query;
    } else {
      out.path = detail::remove_dot_segments(ref.path.starts_with('/') ? ref.path : detail::merge_paths(base, ref.path));
      out.query = ref.query;
    }
  }
  out.fragment = ref.fragment;
  return out;
}

}  // namespace veridict
