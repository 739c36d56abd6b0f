// Copyright 2026 The sensitrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sensitrack/unicode.hpp"
#include "sensitrack/url.hpp"

// A forgiving streaming HTML tokenizer and the two text extractors built on
// it. There is no tree construction: element nesting is tracked only where
// the extractors need it (suppressed subtrees and the document title).
namespace sensitrack::html {

enum class TokenKind { text, start_tag, end_tag, raw_text, comment };

struct Attribute {
  std::string name;   // lowercased
  std::string value;  // entity-decoded
};

struct Token {
  TokenKind kind = TokenKind::text;
  std::string name;  // lowercased tag name for tags; enclosing element for raw text
  std::string text;  // entity-decoded for text tokens
  std::vector<Attribute> attributes;
  bool self_closing = false;

  const std::string* attribute(std::string_view key) const {
    for (const auto& a : attributes) {
      if (a.name == key) return &a.value;
    }
    return nullptr;
  }
};

namespace detail {

struct NamedEntity {
  std::string_view name;
  char32_t code_point;
};

// Common named references; anything else is left as written.
inline constexpr std::array<NamedEntity, 64> kEntities = {{
    {"amp", '&'},      {"lt", '<'},        {"gt", '>'},        {"quot", '"'},
    {"apos", '\''},    {"nbsp", ' '},      {"copy", 0xA9},     {"reg", 0xAE},
    {"trade", 0x2122}, {"hellip", 0x2026}, {"mdash", 0x2014},  {"ndash", 0x2013},
    {"lsquo", 0x2018}, {"rsquo", 0x2019},  {"ldquo", 0x201C},  {"rdquo", 0x201D},
    {"laquo", 0xAB},   {"raquo", 0xBB},    {"bull", 0x2022},   {"middot", 0xB7},
    {"euro", 0x20AC},  {"pound", 0xA3},    {"yen", 0xA5},      {"cent", 0xA2},
    {"sect", 0xA7},    {"para", 0xB6},     {"deg", 0xB0},      {"times", 0xD7},
    {"divide", 0xF7},  {"shy", 0xAD},      {"iexcl", 0xA1},    {"iquest", 0xBF},
    {"aacute", 0xE1},  {"Aacute", 0xC1},   {"agrave", 0xE0},   {"Agrave", 0xC0},
    {"acirc", 0xE2},   {"auml", 0xE4},     {"Auml", 0xC4},     {"aring", 0xE5},
    {"ccedil", 0xE7},  {"Ccedil", 0xC7},   {"eacute", 0xE9},   {"Eacute", 0xC9},
    {"egrave", 0xE8},  {"ecirc", 0xEA},    {"euml", 0xEB},     {"iacute", 0xED},
    {"igrave", 0xEC},  {"icirc", 0xEE},    {"iuml", 0xEF},     {"ntilde", 0xF1},
    {"Ntilde", 0xD1},  {"oacute", 0xF3},   {"ograve", 0xF2},   {"ocirc", 0xF4},
    {"ouml", 0xF6},    {"Ouml", 0xD6},     {"oslash", 0xF8},   {"uacute", 0xFA},
    {"ugrave", 0xF9},  {"ucirc", 0xFB},    {"uuml", 0xFC},     {"szlig", 0xDF},
}};

inline bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

inline bool is_html_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

// Case-insensitive search for an ASCII needle (the needle is lowercase).
inline std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (sensitrack::detail::ascii_lower(hay[i + k]) != needle[k]) {
        match = false;
        break;
      }
    }
    if (match) return i;
  }
  return std::string_view::npos;
}

}  // namespace detail

inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back('&');
      continue;
    }
    const auto body = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    bool ok = false;
    if (body.size() >= 2 && body[0] == '#') {
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const auto digits = body.substr(hex ? 2 : 1);
      ok = !digits.empty();
      std::uint32_t v = 0;
      for (char c : digits) {
        const int d = hex ? sensitrack::detail::hex_value(c) : (c >= '0' && c <= '9' ? c - '0' : -1);
        if (d < 0 || v > 0x10FFFF) {
          ok = false;
          break;
        }
        v = v * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      if (ok) {
        cp = (v == 0 || v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) ? unicode::kReplacement : v;
        if (cp == 0xA0) cp = ' ';
      }
    } else {
      for (const auto& e : detail::kEntities) {
        if (e.name == body) {
          cp = e.code_point;
          ok = true;
          break;
        }
      }
    }
    if (!ok) {
      out.push_back('&');
      continue;
    }
    unicode::append_utf8(out, cp);
    i = semi;
  }
  return out;
}

// Collapses whitespace runs (including U+00A0) to one space and trims.
inline std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t start = i;
    const char32_t cp = unicode::next_code_point(s, i);
    if (unicode::is_space(cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.append(s.substr(start, i - start));
  }
  return out;
}

// Splits markup into tokens. Never fails: unterminated constructs run to the
// end of input, and a '<' that does not open a tag is ordinary text.
inline std::vector<Token> tokenize_html(std::string_view html) {
  std::vector<Token> tokens;
  std::string pending_text;
  auto flush_text = [&] {
    if (!pending_text.empty()) {
      Token t;
      t.kind = TokenKind::text;
      t.text = decode_entities(pending_text);
      tokens.push_back(std::move(t));
      pending_text.clear();
    }
  };

  const std::size_t n = html.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = html[i];
    if (c != '<' || i + 1 >= n) {
      pending_text.push_back(c);
      ++i;
      continue;
    }
    const char next = html[i + 1];

    if (html.substr(i, 4) == "<!--") {
      flush_text();
      const auto end = html.find("-->", i + 4);
      Token t;
      t.kind = TokenKind::comment;
      t.text = std::string(html.substr(i + 4, end == std::string_view::npos ? n - i - 4 : end - i - 4));
      tokens.push_back(std::move(t));
      i = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    if (next == '!' || next == '?') {
      flush_text();
      std::size_t end = std::string_view::npos;
      if (html.substr(i, 9) == "<![CDATA[") {
        end = html.find("]]>", i + 9);
        i = end == std::string_view::npos ? n : end + 3;
      } else {
        end = html.find('>', i + 2);
        i = end == std::string_view::npos ? n : end + 1;
      }
      continue;
    }

    const bool closing = next == '/';
    const std::size_t name_start = i + (closing ? 2 : 1);
    if (name_start >= n || !detail::is_ascii_alpha(html[name_start])) {
      pending_text.push_back(c);
      ++i;
      continue;
    }
    flush_text();

    std::size_t j = name_start;
    while (j < n && !detail::is_html_space(html[j]) && html[j] != '/' && html[j] != '>') ++j;
    Token tag;
    tag.kind = closing ? TokenKind::end_tag : TokenKind::start_tag;
    tag.name = to_lower_ascii(html.substr(name_start, j - name_start));

    // Attributes: name[=value], value quoted with ' or " or bare.
    while (j < n && html[j] != '>') {
      if (detail::is_html_space(html[j])) {
        ++j;
        continue;
      }
      if (html[j] == '/') {
        tag.self_closing = j + 1 < n && html[j + 1] == '>';
        ++j;
        continue;
      }
      const std::size_t an = j;
      while (j < n && !detail::is_html_space(html[j]) && html[j] != '=' && html[j] != '>' &&
             !(html[j] == '/' && j + 1 < n && html[j + 1] == '>')) {
        ++j;
      }
      Attribute attr;
      attr.name = to_lower_ascii(html.substr(an, j - an));
      while (j < n && detail::is_html_space(html[j])) ++j;
      if (j < n && html[j] == '=') {
        ++j;
        while (j < n && detail::is_html_space(html[j])) ++j;
        if (j < n && (html[j] == '"' || html[j] == '\'')) {
          const char quote = html[j];
          const auto close = html.find(quote, j + 1);
          const auto stop = close == std::string_view::npos ? n : close;
          attr.value = decode_entities(html.substr(j + 1, stop - j - 1));
          j = close == std::string_view::npos ? n : close + 1;
        } else {
          const std::size_t vs = j;
          while (j < n && !detail::is_html_space(html[j]) && html[j] != '>') ++j;
          attr.value = decode_entities(html.substr(vs, j - vs));
        }
      }
      if (!attr.name.empty() && !closing) tag.attributes.push_back(std::move(attr));
    }
    i = j < n ? j + 1 : n;

    const std::string element = tag.name;
    const bool opens = !closing && !tag.self_closing;
    tokens.push_back(std::move(tag));

    // Raw text (script, style) and escapable raw text (title, textarea) run
    // until the matching end tag.
    if (opens && (element == "script" || element == "style" || element == "title" ||
                  element == "textarea")) {
      const std::string end_marker = "</" + element;
      std::size_t end = detail::find_ci(html, end_marker, i);
      while (end != std::string_view::npos) {
        const std::size_t after = end + end_marker.size();
        if (after >= n || detail::is_html_space(html[after]) || html[after] == '>' ||
            html[after] == '/') {
          break;
        }
        end = detail::find_ci(html, end_marker, end + 1);
      }
      const std::size_t stop = end == std::string_view::npos ? n : end;
      const auto body = html.substr(i, stop - i);
      if (!body.empty()) {
        Token t;
        t.name = element;
        if (element == "script" || element == "style") {
          t.kind = TokenKind::raw_text;
          t.text = std::string(body);
        } else {
          t.kind = TokenKind::text;
          t.text = decode_entities(body);
        }
        tokens.push_back(std::move(t));
      }
      i = stop;
    }
  }
  flush_text();
  return tokens;
}

namespace detail {

// Elements whose boundaries do not separate words.
inline bool is_inline_element(std::string_view name) {
  static constexpr std::array<std::string_view, 29> kInline = {
      "a",    "abbr", "b",   "bdi",   "bdo",  "big",   "cite",  "code", "data", "dfn",
      "em",   "font", "i",   "kbd",   "mark", "q",     "s",     "samp", "small",
      "span", "strike", "strong", "sub", "sup", "time", "tt", "u", "var", "label"};
  return std::find(kInline.begin(), kInline.end(), name) != kInline.end();
}

}  // namespace detail

// Human-readable text of the page: every text node outside script, style,
// noscript and template subtrees, with comments dropped and whitespace
// collapsed. Block-level tag boundaries act as word separators.
inline std::string extract_visible_text(std::string_view html) {
  std::string raw;
  int suppressed = 0;
  for (const auto& t : tokenize_html(html)) {
    switch (t.kind) {
      case TokenKind::text:
        if (suppressed == 0) raw += t.text;
        break;
      case TokenKind::start_tag:
        if ((t.name == "noscript" || t.name == "template") && !t.self_closing) ++suppressed;
        if (!detail::is_inline_element(t.name)) raw.push_back(' ');
        break;
      case TokenKind::end_tag:
        if ((t.name == "noscript" || t.name == "template") && suppressed > 0) --suppressed;
        if (!detail::is_inline_element(t.name)) raw.push_back(' ');
        break;
      case TokenKind::raw_text:
      case TokenKind::comment:
        break;
    }
  }
  return normalize_whitespace(raw);
}

// <meta> name/property values whose content counts as page meta-data.
inline constexpr std::array<std::string_view, 6> kMetaNames = {
    "description", "keywords",      "og:title",
    "og:description", "twitter:title", "twitter:description"};

// Title text plus the content of whitelisted <meta> tags, in document order.
inline std::string extract_meta(std::string_view html) {
  std::vector<std::string> parts;
  bool in_title = false;
  for (const auto& t : tokenize_html(html)) {
    if (t.kind == TokenKind::start_tag && t.name == "title") {
      in_title = !t.self_closing;
    } else if (t.kind == TokenKind::end_tag && t.name == "title") {
      in_title = false;
    } else if (t.kind == TokenKind::text && in_title) {
      parts.push_back(normalize_whitespace(t.text));
    } else if (t.kind == TokenKind::start_tag && t.name == "meta") {
      const std::string* key = t.attribute("name");
      if (!key) key = t.attribute("property");
      const std::string* content = t.attribute("content");
      if (!key || !content) continue;
      const auto lowered = to_lower_ascii(*key);
      if (std::find(kMetaNames.begin(), kMetaNames.end(), lowered) != kMetaNames.end()) {
        parts.push_back(normalize_whitespace(*content));
      }
    }
  }
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

}  // namespace sensitrack::html
