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

#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensitrack/crawl_record.hpp"
#include "sensitrack/error.hpp"
#include "sensitrack/html.hpp"
#include "sensitrack/unicode.hpp"

namespace sensitrack {

using StopwordList = std::unordered_set<std::string>;

// One word per line; '#' starts a comment. Words are lowercased.
inline StopwordList load_stopwords(std::istream& in) {
  StopwordList words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    words.insert(to_lower_ascii(line.substr(b, e - b + 1)));
  }
  return words;
}

inline StopwordList load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stop-word list '" + path + "'");
  return load_stopwords(in);
}

struct PrepConfig {
  StopwordList stopwords;
  std::size_t min_tokens = 5;
  double english_stopword_ratio_threshold = 0.02;
};

enum class RejectReason { non_english, too_short, discarded_fetch };

inline std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::non_english: return "non_english";
    case RejectReason::too_short: return "too_short";
    case RejectReason::discarded_fetch: return "discarded_fetch";
  }
  return "";
}

inline std::optional<RejectReason> parse_reject_reason(std::string_view s) {
  if (s == "non_english") return RejectReason::non_english;
  if (s == "too_short") return RejectReason::too_short;
  if (s == "discarded_fetch") return RejectReason::discarded_fetch;
  return std::nullopt;
}

// A third-party host seen on the page and its inclusion level (1 = direct).
struct ThirdPartyOccurrence {
  std::string domain;
  int level = 1;

  bool operator==(const ThirdPartyOccurrence&) const = default;
};

struct Document {
  std::string source_url;
  std::optional<std::string> category_label;
  std::vector<std::string> content_tokens;
  std::vector<std::string> meta_tokens;
  std::optional<RejectReason> rejected_reason;
  // Inclusion-tree nodes of the source record, carried so that the TPD
  // feature modes work from documents alone.
  std::vector<ThirdPartyOccurrence> third_parties;

  bool operator==(const Document&) const = default;
};

// Splits on anything that is not a letter or an ASCII digit, lowercases, and
// keeps tokens of at least three code points.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t length = 0;
  auto finish = [&] {
    if (length >= 3) tokens.push_back(current);
    current.clear();
    length = 0;
  };
  for (std::size_t i = 0; i < text.size();) {
    const char32_t cp = unicode::next_code_point(text, i);
    if (unicode::is_letter(cp) || unicode::is_ascii_digit(cp)) {
      unicode::append_utf8(current, unicode::to_lower(cp));
      ++length;
    } else {
      finish();
    }
  }
  finish();
  return tokens;
}

// Stop-word density test; `tokens` must not be stop-word filtered yet.
inline bool is_english(const std::vector<std::string>& tokens, const PrepConfig& config) {
  std::size_t hits = 0;
  for (const auto& t : tokens) hits += config.stopwords.count(t);
  const double denom = static_cast<double>(tokens.empty() ? 1 : tokens.size());
  return static_cast<double>(hits) / denom >= config.english_stopword_ratio_threshold;
}

inline std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                                 const StopwordList& stopwords) {
  std::erase_if(tokens, [&](const std::string& t) { return stopwords.count(t) != 0; });
  return tokens;
}

// Builds the content and meta-data token lists for one record. A page with
// too few tokens is rejected as too_short before the language test runs, so
// blank pages are never reported as non-English.
inline Document preprocess(const CrawlRecord& record, const PrepConfig& config) {
  Document doc;
  doc.source_url = record.page_url;
  doc.category_label = record.category_label;

  const auto content_raw = tokenize(html::extract_visible_text(record.html));
  auto content = remove_stopwords(content_raw, config.stopwords);
  auto meta = remove_stopwords(tokenize(html::extract_meta(record.html)), config.stopwords);

  if (content.size() + meta.size() < config.min_tokens) {
    doc.rejected_reason = RejectReason::too_short;
  } else if (!is_english(content_raw, config)) {
    doc.rejected_reason = RejectReason::non_english;
  } else {
    doc.content_tokens = std::move(content);
    doc.meta_tokens = std::move(meta);
  }
  return doc;
}

inline nlohmann::ordered_json to_json(const Document& d) {
  nlohmann::ordered_json j;
  j["source_url"] = d.source_url;
  j["category_label"] = d.category_label ? nlohmann::ordered_json(*d.category_label)
                                         : nlohmann::ordered_json(nullptr);
  j["content_tokens"] = d.content_tokens;
  j["meta_tokens"] = d.meta_tokens;
  j["rejected_reason"] = d.rejected_reason
                             ? nlohmann::ordered_json(std::string(to_string(*d.rejected_reason)))
                             : nlohmann::ordered_json(nullptr);
  auto& tp = j["third_parties"] = nlohmann::ordered_json::array();
  for (const auto& occ : d.third_parties) {
    tp.push_back(nlohmann::ordered_json{{"domain", occ.domain}, {"level", occ.level}});
  }
  return j;
}

inline Document document_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("document must be a JSON object");
  Document d;
  d.source_url = detail::require_string(j, "source_url");
  d.category_label = detail::optional_string(j, "category_label");
  auto tokens = [&](const char* key) {
    const auto& arr = detail::require(j, key);
    if (!arr.is_array()) throw DataError(std::string("field '") + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& t : arr) {
      if (!t.is_string()) throw DataError(std::string("field '") + key + "' must hold strings");
      out.push_back(t.get<std::string>());
    }
    return out;
  };
  d.content_tokens = tokens("content_tokens");
  d.meta_tokens = tokens("meta_tokens");
  if (const auto reason = detail::optional_string(j, "rejected_reason")) {
    d.rejected_reason = parse_reject_reason(*reason);
    if (!d.rejected_reason) throw DataError("unknown rejected_reason '" + *reason + "'");
  }
  if (const auto it = j.find("third_parties"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("field 'third_parties' must be an array");
    for (const auto& occ : *it) {
      d.third_parties.push_back({detail::require_string(occ, "domain"),
                                 static_cast<int>(detail::require_int(occ, "level"))});
    }
  }
  return d;
}

inline std::string serialize_document(const Document& d) {
  return to_json(d).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

// Documents are stored one per line, like crawl records. Any malformed line
// is a hard DataError: documents are produced by this tool, not by a crawler.
inline std::vector<Document> read_documents(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(document_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("documents line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("documents line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

}  // namespace sensitrack
