#pragma once

// Tolerant HTML tokenizer. Enough of the syntax for link collection and
// paragraph extraction on real-world pages: tags with attributes, comments,
// raw-text elements (script/style), character references.

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace veridict::html {

struct Token {
  enum class Type { StartTag, EndTag, Text };
  Type type = Type::Text;
  std::string name;  // lowercase tag name
  std::vector<std::pair<std::string, std::string>> attributes;
  bool self_closing = false;
  std::string text;  // decoded, for Text tokens

  std::optional<std::string_view> attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::optional<std::uint32_t> named_entity(std::string_view name) {
  static constexpr std::pair<std::string_view, std::uint32_t> table[] = {
      {"amp", '&'},       {"lt", '<'},        {"gt", '>'},        {"quot", '"'},     {"apos", '\''},
      {"nbsp", 0xA0},     {"ndash", 0x2013},  {"mdash", 0x2014},  {"hellip", 0x2026}, {"lsquo", 0x2018},
      {"rsquo", 0x2019},  {"ldquo", 0x201C},  {"rdquo", 0x201D},  {"copy", 0xA9},     {"reg", 0xAE},
      {"trade", 0x2122},  {"bull", 0x2022},   {"middot", 0xB7},   {"laquo", 0xAB},    {"raquo", 0xBB},
      {"eacute", 0xE9},   {"egrave", 0xE8},   {"aacute", 0xE1},   {"oacute", 0xF3},   {"uuml", 0xFC},
      {"ouml", 0xF6},     {"auml", 0xE4},     {"ccedil", 0xE7},   {"ntilde", 0xF1},   {"euro", 0x20AC},
      {"pound", 0xA3},
  };
  for (const auto& [k, v] : table) {
    if (k == name) return v;
  }
  return std::nullopt;
}

}  // namespace detail

/// Decodes character references. Unknown references are kept verbatim.
inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    const auto body = s.substr(i + 1, semi - i - 1);
    std::optional<std::uint32_t> cp;
    if (body.size() > 1 && body[0] == '#') {
      std::uint32_t v = 0;
      bool ok = true;
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const auto digits = body.substr(hex ? 2 : 1);
      if (digits.empty()) ok = false;
      for (char c : digits) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else { ok = false; break; }
        v = v * (hex ? 16u : 10u) + static_cast<std::uint32_t>(d);
        if (v > 0x10FFFF) { ok = false; break; }
      }
      if (ok) cp = v;
    } else {
      cp = detail::named_entity(body);
    }
    if (!cp) {
      out.push_back(s[i++]);
      continue;
    }
    detail::append_utf8(out, *cp);
    i = semi + 1;
  }
  return out;
}

namespace detail {

inline bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline bool is_raw_text_element(std::string_view name) {
  return name == "script" || name == "style" || name == "textarea" || name == "title";
}

/// Case-insensitive search for "</name" from pos.
inline std::size_t find_end_tag(std::string_view s, std::size_t pos, std::string_view name) {
  while (true) {
    const auto lt = s.find("</", pos);
    if (lt == std::string_view::npos) return std::string_view::npos;
    if (lower(s.substr(lt + 2, name.size())) == name) {
      const std::size_t after = lt + 2 + name.size();
      if (after >= s.size() || is_ws(s[after]) || s[after] == '>' || s[after] == '/') return lt;
    }
    pos = lt + 2;
  }
}

}  // namespace detail

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::string text;
  auto flush_text = [&] {
    if (!text.empty()) {
      Token t;
      t.type = Token::Type::Text;
      t.text = decode_entities(text);
      tokens.push_back(std::move(t));
      text.clear();
    }
  };

  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    if (s[i] != '<') {
      text.push_back(s[i++]);
      continue;
    }
    // Comments, doctype, processing instructions.
    if (s.substr(i, 4) == "<!--") {
      const auto end = s.find("-->", i + 4);
      i = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    if (i + 1 < n && (s[i + 1] == '!' || s[i + 1] == '?')) {
      const auto end = s.find('>', i);
      i = end == std::string_view::npos ? n : end + 1;
      continue;
    }
    const bool closing = i + 1 < n && s[i + 1] == '/';
    std::size_t j = i + (closing ? 2 : 1);
    if (j >= n || !std::isalpha(static_cast<unsigned char>(s[j]))) {
      text.push_back(s[i++]);  // stray '<'
      continue;
    }
    flush_text();
    const std::size_t name_start = j;
    while (j < n && !detail::is_ws(s[j]) && s[j] != '>' && s[j] != '/') ++j;
    Token tag;
    tag.type = closing ? Token::Type::EndTag : Token::Type::StartTag;
    tag.name = detail::lower(s.substr(name_start, j - name_start));

    // Attributes.
    while (j < n && s[j] != '>') {
      if (detail::is_ws(s[j])) { ++j; continue; }
      if (s[j] == '/') {
        if (j + 1 < n && s[j + 1] == '>') tag.self_closing = true;
        ++j;
        continue;
      }
      const std::size_t key_start = j;
      while (j < n && !detail::is_ws(s[j]) && s[j] != '=' && s[j] != '>' && !(s[j] == '/' && j + 1 < n && s[j + 1] == '>')) ++j;
      std::string key = detail::lower(s.substr(key_start, j - key_start));
      while (j < n && detail::is_ws(s[j])) ++j;
      std::string value;
      if (j < n && s[j] == '=') {
        ++j;
        while (j < n && detail::is_ws(s[j])) ++j;
        if (j < n && (s[j] == '"' || s[j] == '\'')) {
          const char q = s[j];
          const auto close = s.find(q, j + 1);
          const auto stop = close == std::string_view::npos ? n : close;
          value = decode_entities(s.substr(j + 1, stop - j - 1));
          j = close == std::string_view::npos ? n : close + 1;
        } else {
          const std::size_t v_start = j;
          while (j < n && !detail::is_ws(s[j]) && s[j] != '>') ++j;
          value = decode_entities(s.substr(v_start, j - v_start));
        }
      }
      if (!key.empty() && !closing) tag.attributes.emplace_back(std::move(key), std::move(value));
    }
    i = j < n ? j + 1 : n;

    const bool raw = !closing && !tag.self_closing && detail::is_raw_text_element(tag.name);
    const std::string raw_name = tag.name;
    tokens.push_back(std::move(tag));
    if (raw) {
      const auto end = detail::find_end_tag(s, i, raw_name);
      const auto stop = end == std::string_view::npos ? n : end;
      if (stop > i) {
        Token t;
        t.type = Token::Type::Text;
        // script/style bodies are not markup and not entity-encoded.
        t.text = (raw_name == "script" || raw_name == "style") ? std::string(s.substr(i, stop - i))
                                                                 : decode_entities(s.substr(i, stop - i));
        tokens.push_back(std::move(t));
      }
      if (end == std::string_view::npos) {
        i = n;
      } else {
        Token close;
        close.type = Token::Type::EndTag;
        close.name = raw_name;
        tokens.push_back(std::move(close));
        const auto gt = s.find('>', end);
        i = gt == std::string_view::npos ? n : gt + 1;
      }
    }
  }
  flush_text();
  return tokens;
}

/// Collapses whitespace runs to one space and trims.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    // U+00A0 arrives as C2 A0; treat it as a space too.
    if (detail::is_ws(c) || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  std::string result;
  result.reserve(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (static_cast<unsigned char>(out[k]) == 0xC2 && k + 1 < out.size() &&
        static_cast<unsigned char>(out[k + 1]) == 0xA0) {
      if (!result.empty() && result.back() != ' ') result.push_back(' ');
      ++k;
      continue;
    }
    result.push_back(out[k]);
  }
  while (!result.empty() && result.back() == ' ') result.pop_back();
  if (!result.empty() && result.front() == ' ') result.erase(0, 1);
  return result;
}

}  // namespace veridict::html
