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

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sensitrack/error.hpp"
#include "sensitrack/unicode.hpp"
#include "sensitrack/url.hpp"

namespace sensitrack {

namespace punycode {

// RFC 3492 encoder for a single label. Returns the label unchanged when it
// is pure ASCII, otherwise "xn--" followed by the encoding.
inline std::string to_ascii_label(std::string_view label) {
  const std::u32string input = unicode::decode(label);
  bool ascii = true;
  for (char32_t c : input) ascii = ascii && c < 0x80;
  if (ascii) return std::string(label);

  constexpr std::uint32_t kBase = 36, kTmin = 1, kTmax = 26, kSkew = 38, kDamp = 700;
  constexpr std::uint32_t kInitialBias = 72, kInitialN = 128;
  auto digit = [](std::uint32_t d) -> char {
    return static_cast<char>(d < 26 ? 'a' + d : '0' + (d - 26));
  };
  auto adapt = [&](std::uint32_t delta, std::uint32_t points, bool first) {
    delta = first ? delta / kDamp : delta / 2;
    delta += delta / points;
    std::uint32_t k = 0;
    while (delta > ((kBase - kTmin) * kTmax) / 2) {
      delta /= kBase - kTmin;
      k += kBase;
    }
    return k + (kBase - kTmin + 1) * delta / (delta + kSkew);
  };

  std::string out;
  for (char32_t c : input) {
    if (c < 0x80) out.push_back(static_cast<char>(c));
  }
  const auto basic = static_cast<std::uint32_t>(out.size());
  std::uint32_t handled = basic;
  if (basic > 0) out.push_back('-');

  std::uint32_t n = kInitialN, delta = 0, bias = kInitialBias;
  while (handled < input.size()) {
    std::uint32_t m = 0x10FFFF + 1;
    for (char32_t c : input) {
      if (c >= n && c < m) m = c;
    }
    delta += (m - n) * (handled + 1);
    n = m;
    for (char32_t c : input) {
      if (c < n) ++delta;
      if (c == n) {
        std::uint32_t q = delta;
        for (std::uint32_t k = kBase;; k += kBase) {
          const std::uint32_t t = k <= bias ? kTmin : (k >= bias + kTmax ? kTmax : k - bias);
          if (q < t) break;
          out.push_back(digit(t + (q - t) % (kBase - t)));
          q = (q - t) / (kBase - t);
        }
        out.push_back(digit(q));
        bias = adapt(delta, handled + 1, handled == basic);
        delta = 0;
        ++handled;
      }
    }
    ++delta;
    ++n;
  }
  return "xn--" + out;
}

}  // namespace punycode

// Public Suffix List lookup. Rules are stored in ASCII (punycode) form so that
// Unicode and already-encoded hostnames resolve identically.
class PublicSuffixList {
 public:
  PublicSuffixList() = default;

  static PublicSuffixList parse(std::istream& in) {
    PublicSuffixList psl;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line.compare(b, 2, "//") == 0) continue;
      auto rule = line.substr(b, line.find_first_of(" \t", b) - b);
      psl.add_rule(rule);
    }
    return psl;
  }

  static PublicSuffixList load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open public suffix list '" + path + "'");
    auto psl = parse(in);
    if (psl.size() == 0) throw ConfigError("public suffix list '" + path + "' has no rules");
    return psl;
  }

  void add_rule(std::string_view rule) {
    if (rule.empty()) return;
    if (rule.front() == '!') {
      exceptions_.insert(to_ascii(rule.substr(1)));
    } else if (rule.substr(0, 2) == "*.") {
      wildcards_.insert(to_ascii(rule.substr(2)));
    } else {
      normal_.insert(to_ascii(rule));
    }
  }

  std::size_t size() const { return normal_.size() + wildcards_.size() + exceptions_.size(); }

  // Registrable domain (public suffix plus one label), or nullopt when the
  // host is itself a public suffix or is not a valid hostname.
  std::optional<std::string> registrable_domain(std::string_view host) const {
    std::string h = to_lower_ascii(host);
    if (!h.empty() && h.back() == '.') h.pop_back();
    if (h.empty() || h.front() == '.') return std::nullopt;
    std::vector<std::string_view> labels = split_labels(h);
    for (auto l : labels) {
      if (l.empty()) return std::nullopt;
    }
    std::vector<std::string> ascii;
    ascii.reserve(labels.size());
    for (auto l : labels) ascii.push_back(punycode::to_ascii_label(l));

    const std::size_t n = ascii.size();
    std::size_t suffix_len = 1;  // implicit "*" rule
    std::optional<std::size_t> exception_len;
    std::string suffix;
    for (std::size_t i = 0; i < n; ++i) {
      suffix = join(ascii, i);
      const std::size_t len = n - i;
      if (exceptions_.count(suffix)) {
        exception_len = len - 1;
        break;
      }
      if (len > suffix_len && normal_.count(suffix)) suffix_len = len;
      if (len >= 2 && len > suffix_len && wildcards_.count(join(ascii, i + 1))) {
        suffix_len = len;
      }
    }
    if (exception_len) suffix_len = *exception_len;
    if (suffix_len >= n) return std::nullopt;

    // Return the original spelling (Unicode stays Unicode).
    std::string out;
    for (std::size_t i = n - suffix_len - 1; i < n; ++i) {
      if (!out.empty()) out.push_back('.');
      out.append(labels[i]);
    }
    return out;
  }

  // eTLD+1 of a hostname. IP literals come back unchanged; a host that is a
  // public suffix maps to itself so the function is total.
  std::string etld1(std::string_view host) const {
    std::string h = to_lower_ascii(host);
    if (!h.empty() && h.back() == '.') h.pop_back();
    if (h.empty()) throw std::invalid_argument("etld1: empty host");
    if (is_ip_literal(h)) return h;
    if (auto r = registrable_domain(h)) return *r;
    return h;
  }

  static bool is_ip_literal(std::string_view h) {
    if (!h.empty() && (h.front() == '[' || h.find(':') != std::string_view::npos)) return true;
    int dots = 0;
    for (char c : h) {
      if (c == '.') {
        ++dots;
      } else if (c < '0' || c > '9') {
        return false;
      }
    }
    return dots == 3;
  }

 private:
  static std::vector<std::string_view> split_labels(std::string_view h) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
      const auto dot = h.find('.', start);
      out.push_back(h.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
    return out;
  }

  static std::string join(const std::vector<std::string>& labels, std::size_t from) {
    std::string out;
    for (std::size_t i = from; i < labels.size(); ++i) {
      if (!out.empty()) out.push_back('.');
      out += labels[i];
    }
    return out;
  }

  static std::string to_ascii(std::string_view rule) {
    const std::string lowered = to_lower_ascii(rule);
    std::string out;
    for (auto label : split_labels(lowered)) {
      if (!out.empty()) out.push_back('.');
      out += punycode::to_ascii_label(label);
    }
    return out;
  }

  std::unordered_set<std::string> normal_;
  std::unordered_set<std::string> wildcards_;   // stored without the "*."
  std::unordered_set<std::string> exceptions_;  // stored without the "!"
};

}  // namespace sensitrack
