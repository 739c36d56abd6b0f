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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensitrack/chains.hpp"
#include "sensitrack/crawl_record.hpp"
#include "sensitrack/error.hpp"
#include "sensitrack/url.hpp"

namespace sensitrack {

struct CSyncKeywordList {
  std::vector<std::string> keywords;  // lowercase, file order, no duplicates
};

inline CSyncKeywordList make_keyword_list(const std::vector<std::string>& words) {
  CSyncKeywordList list;
  std::set<std::string> seen;
  for (const auto& w : words) {
    auto k = to_lower_ascii(w);
    if (k.empty() || !seen.insert(k).second) continue;
    list.keywords.push_back(std::move(k));
  }
  if (list.keywords.empty()) throw ConfigError("keyword list is empty");
  return list;
}

// One keyword per line; '#' starts a comment; blank lines ignored.
inline CSyncKeywordList load_keywords(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(b, e - b + 1));
  }
  return make_keyword_list(words);
}

inline CSyncKeywordList load_keywords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open keyword list " + path.string());
  return load_keywords(in);
}

inline bool has_url_arguments(std::string_view url, std::size_t* unparseable = nullptr) {
  const auto u = parse_url(url);
  if (!u) {
    if (unparseable) ++*unparseable;
    return false;
  }
  return !parse_query(u->query).empty();
}

inline double shannon_entropy(std::string_view s) {
  if (s.empty()) return 0.0;
  std::size_t counts[256] = {};
  for (unsigned char c : s) ++counts[c];
  double h = 0;
  const double n = static_cast<double>(s.size());
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

struct ObfuscationRule {
  std::size_t min_length = 16;
  double min_entropy = 3.5;  // bits per character
};

namespace detail {

inline bool is_blob_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '/' ||
         c == '=' || c == '_' || c == '-';
}

inline const std::string* first_keyword_in(std::string_view haystack, const CSyncKeywordList& kw) {
  for (const auto& k : kw.keywords) {
    if (haystack.find(k) != std::string_view::npos) return &k;
  }
  return nullptr;
}

}  // namespace detail

// A value looks like an encoded identifier blob: long, base64/url-safe
// alphabet only, high character entropy and free of any keyword.
inline bool is_obfuscated(std::string_view value, const CSyncKeywordList& keywords,
                          const ObfuscationRule& rule = {}) {
  if (value.size() < rule.min_length) return false;
  for (char c : value) {
    if (!detail::is_blob_char(c)) return false;
  }
  if (detail::first_keyword_in(to_lower_ascii(value), keywords)) return false;
  return shannon_entropy(value) >= rule.min_entropy;
}

struct CSyncEvent {
  std::string site;
  std::string source_etld1;
  std::string dest_etld1;
  std::string matched_keyword;
  std::int64_t request_seq = 0;
  std::string url;

  bool operator==(const CSyncEvent&) const = default;
};

// Requests from one third party to another whose URL carries arguments and
// names a sync keyword in its path, argument names or readable values.
// Requests whose keyword-bearing arguments only hold obfuscated blobs are
// dropped, as are requests within one eTLD+1.
inline std::vector<CSyncEvent> detect_csync(const CrawlRecord& record, const InclusionTree& tree,
                                            const CSyncKeywordList& keywords, const ObfuscationRule& rule = {}) {
  if (tree.attributions.size() != record.requests.size()) {
    throw std::invalid_argument("detect_csync: tree was not built for this record");
  }
  std::vector<CSyncEvent> events;
  for (std::size_t i = 0; i < record.requests.size(); ++i) {
    const auto& a = tree.attributions[i];
    if (a.source < 0 || a.dest < 0) continue;
    const auto& src = tree.party_etld1(a.source);
    const auto& dst = tree.party_etld1(a.dest);
    if (src == dst) continue;

    const auto& req = record.requests[i];
    const auto url = parse_url(req.url);
    if (!url) continue;
    const auto args = parse_query(url->query);
    if (args.empty()) continue;

    std::string text = to_lower_ascii(percent_decode(url->path, false));
    bool matched_any = false;
    bool all_obfuscated = true;
    bool readable_match = false;
    for (const auto& p : args) {
      const bool obf = is_obfuscated(p.value, keywords, rule);
      all_obfuscated = all_obfuscated && obf;
      const auto key = to_lower_ascii(p.key);
      const auto value = obf ? std::string() : to_lower_ascii(p.value);
      text += '\x1f';
      text += key;
      text += '\x1f';
      text += value;
      if (detail::first_keyword_in(key, keywords) || detail::first_keyword_in(value, keywords)) {
        matched_any = true;
        readable_match = readable_match || !obf;
      }
    }
    const auto* kw = detail::first_keyword_in(text, keywords);
    if (!kw) continue;
    if (matched_any ? !readable_match : all_obfuscated) continue;

    events.push_back({tree.root, src, dst, *kw, req.seq, req.url});
  }
  return events;
}

inline nlohmann::ordered_json to_json(const CSyncEvent& e) {
  nlohmann::ordered_json j;
  j["site"] = e.site;
  j["source_etld1"] = e.source_etld1;
  j["dest_etld1"] = e.dest_etld1;
  j["matched_keyword"] = e.matched_keyword;
  j["request_seq"] = e.request_seq;
  j["url"] = e.url;
  return j;
}

inline void write_events(std::ostream& out, const std::vector<CSyncEvent>& events) {
  for (const auto& e : events) {
    out << to_json(e).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

struct CSyncCategoryStats {
  std::string category;
  std::size_t n_websites = 0;
  std::size_t n_domains = 0;
  std::size_t n_websites_with_csync = 0;
  double pct_websites_with_csync = 0;
  std::size_t n_requests = 0;
  std::size_t n_csync_requests = 0;
  double pct_csync_requests = 0;
  std::size_t n_unique_pairs = 0;
  std::size_t n_niche_pairs = 0;
  double pct_niche_pairs = 0;
};

// One audited site: its category, first-party eTLD+1, total request count
// and detected events.
struct CSyncSite {
  std::string category;
  std::string first_party;
  std::size_t n_requests = 0;
  std::vector<CSyncEvent> events;
};

namespace detail {

inline CSyncCategoryStats csync_row(const std::string& name, const std::vector<const CSyncSite*>& sites,
                                    const std::set<std::string>& niche) {
  CSyncCategoryStats st;
  st.category = name;
  st.n_websites = sites.size();
  std::set<std::string> domains;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto* s : sites) {
    domains.insert(s->first_party);
    st.n_requests += s->n_requests;
    st.n_csync_requests += s->events.size();
    st.n_websites_with_csync += s->events.empty() ? 0 : 1;
    for (const auto& e : s->events) pairs.insert(std::minmax(e.source_etld1, e.dest_etld1));
  }
  st.n_domains = domains.size();
  st.n_unique_pairs = pairs.size();
  for (const auto& [a, b] : pairs) st.n_niche_pairs += (niche.count(a) || niche.count(b)) ? 1 : 0;
  const auto pct = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  st.pct_websites_with_csync = pct(st.n_websites_with_csync, st.n_websites);
  st.pct_csync_requests = pct(st.n_csync_requests, st.n_requests);
  st.pct_niche_pairs = pct(st.n_niche_pairs, st.n_unique_pairs);
  return st;
}

}  // namespace detail

// Rows per category in name order, then "All Sensitive" (every category but
// `topk_label`) and "Overall". The aggregate rows use the union of the
// member categories' niche lists.
inline std::vector<CSyncCategoryStats> csync_stats(const std::vector<CSyncSite>& sites,
                                                   const std::map<std::string, std::set<std::string>>& niche_lists,
                                                   const std::string& topk_label = "TopK") {
  std::map<std::string, std::vector<const CSyncSite*>> groups;
  std::vector<const CSyncSite*> sensitive, all;
  for (const auto& s : sites) {
    groups[s.category].push_back(&s);
    all.push_back(&s);
    if (s.category != topk_label) sensitive.push_back(&s);
  }
  static const std::set<std::string> kNone;
  std::set<std::string> sensitive_niche, all_niche;
  for (const auto& [cat, list] : niche_lists) {
    if (!groups.count(cat)) continue;
    all_niche.insert(list.begin(), list.end());
    if (cat != topk_label) sensitive_niche.insert(list.begin(), list.end());
  }
  std::vector<CSyncCategoryStats> out;
  for (const auto& [cat, members] : groups) {
    const auto it = niche_lists.find(cat);
    out.push_back(detail::csync_row(cat, members, it == niche_lists.end() ? kNone : it->second));
  }
  out.push_back(detail::csync_row(std::string(kAllSensitive), sensitive, sensitive_niche));
  out.push_back(detail::csync_row(std::string(kOverall), all, all_niche));
  return out;
}

}  // namespace sensitrack
