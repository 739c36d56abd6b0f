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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sensitrack {

// Components of an absolute URL. `host` is lowercased (ASCII) with any
// trailing dot removed; IPv6 literals keep their brackets.
struct Url {
  std::string scheme;
  std::string host;
  std::string port;
  std::string path;
  std::string query;
  std::string fragment;
  bool has_query = false;  // a '?' was present, even if the query is empty
};

namespace detail {

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool is_scheme_char(char c, bool first) {
  const bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  if (first) return alpha;
  return alpha || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
}

inline bool is_host_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '.' || c == '_' || c >= 0x80;
}

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace detail

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = detail::ascii_lower(c);
  return out;
}

// Parses `scheme://[userinfo@]host[:port][/path][?query][#fragment]`.
// Returns nullopt for relative references or a malformed authority.
inline std::optional<Url> parse_url(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  for (std::size_t i = 0; i < colon; ++i) {
    if (!detail::is_scheme_char(text[i], i == 0)) return std::nullopt;
  }
  if (text.substr(colon, 3) != "://") return std::nullopt;

  Url url;
  url.scheme = to_lower_ascii(text.substr(0, colon));
  std::string_view rest = text.substr(colon + 3);

  const auto authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  rest = authority_end == std::string_view::npos ? std::string_view{}
                                                 : rest.substr(authority_end);

  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  std::string_view host = authority;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host = authority.substr(0, close + 1);
    const auto tail = authority.substr(close + 1);
    if (!tail.empty()) {
      if (tail.front() != ':') return std::nullopt;
      url.port = std::string(tail.substr(1));
    }
  } else if (const auto pc = authority.rfind(':'); pc != std::string_view::npos) {
    host = authority.substr(0, pc);
    url.port = std::string(authority.substr(pc + 1));
  }
  for (char c : url.port) {
    if (c < '0' || c > '9') return std::nullopt;
  }

  url.host = to_lower_ascii(host);
  if (!url.host.empty() && url.host.back() == '.') url.host.pop_back();
  if (url.host.empty()) return std::nullopt;
  if (url.host.front() != '[') {
    for (unsigned char c : url.host) {
      if (!detail::is_host_byte(c)) return std::nullopt;
    }
  }

  if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
    url.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  if (const auto q = rest.find('?'); q != std::string_view::npos) {
    url.has_query = true;
    url.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  url.path = std::string(rest);
  return url;
}

inline bool is_http_url(std::string_view text) {
  const auto url = parse_url(text);
  return url && (url->scheme == "http" || url->scheme == "https");
}

inline std::optional<std::string> url_host(std::string_view text) {
  auto url = parse_url(text);
  if (!url) return std::nullopt;
  return std::move(url->host);
}

// Decodes %XX escapes; '+' becomes a space when `plus_as_space` is set.
// Malformed escapes are kept verbatim.
inline std::string percent_decode(std::string_view s, bool plus_as_space = true) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '%' && i + 2 < s.size()) {
      const int hi = detail::hex_value(s[i + 1]);
      const int lo = detail::hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(plus_as_space && c == '+' ? ' ' : c);
  }
  return out;
}

struct QueryParam {
  std::string key;    // percent-decoded
  std::string value;  // percent-decoded; empty when the key had no '='
  bool has_value = false;
};

// Splits a query string on '&' (and ';'). Segments with an empty key are
// skipped, so "a=1&&b" yields two parameters and "" or "=x" yield none.
inline std::vector<QueryParam> parse_query(std::string_view query) {
  std::vector<QueryParam> params;
  std::size_t start = 0;
  while (start <= query.size()) {
    auto end = query.find_first_of("&;", start);
    if (end == std::string_view::npos) end = query.size();
    const auto segment = query.substr(start, end - start);
    if (!segment.empty()) {
      QueryParam p;
      if (const auto eq = segment.find('='); eq != std::string_view::npos) {
        p.key = percent_decode(segment.substr(0, eq));
        p.value = percent_decode(segment.substr(eq + 1));
        p.has_value = true;
      } else {
        p.key = percent_decode(segment);
      }
      if (!p.key.empty()) params.push_back(std::move(p));
    }
    start = end + 1;
  }
  return params;
}

}  // namespace sensitrack
