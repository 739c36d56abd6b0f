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

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensitrack/error.hpp"
#include "sensitrack/url.hpp"

namespace sensitrack {

enum class RequestType { document, sub_frame, script, image, xhr, stylesheet, other };

inline constexpr std::array<std::string_view, 7> kRequestTypeNames = {
    "document", "sub_frame", "script", "image", "xhr", "stylesheet", "other"};

inline std::string_view to_string(RequestType t) {
  return kRequestTypeNames[static_cast<std::size_t>(t)];
}

inline std::optional<RequestType> parse_request_type(std::string_view s) {
  for (std::size_t i = 0; i < kRequestTypeNames.size(); ++i) {
    if (kRequestTypeNames[i] == s) return static_cast<RequestType>(i);
  }
  return std::nullopt;
}

struct RequestEntry {
  std::int64_t seq = 0;
  std::string url;
  std::optional<std::string> initiator_url;
  RequestType request_type = RequestType::other;
  std::optional<std::string> frame_id;
  std::optional<int> response_status;

  bool operator==(const RequestEntry&) const = default;
};

// One rendered page visit.
struct CrawlRecord {
  std::string page_url;
  std::string final_url;
  std::optional<std::string> category_label;
  int fetch_status = 200;
  std::string html;
  std::vector<RequestEntry> requests;  // capture order
  std::string captured_at;             // RFC-3339, UTC

  bool operator==(const CrawlRecord&) const = default;
};

struct ParseError {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct ParseResult {
  std::vector<CrawlRecord> records;
  std::vector<ParseError> errors;
};

struct Violation {
  std::string field;
  std::string message;
};

namespace detail {

using ojson = nlohmann::ordered_json;

template <typename T>
ojson optional_json(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::int64_t require_int(const nlohmann::json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_number_integer()) {
    throw DataError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string or null");
  return it->get<std::string>();
}

inline std::optional<int> optional_int(const nlohmann::json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) {
    throw DataError(std::string("field '") + key + "' must be an integer or null");
  }
  return it->get<int>();
}

inline bool is_rfc3339_utc(const std::string& s) {
  static const std::regex re(
      R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]00:00)$)");
  return std::regex_match(s, re);
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RequestEntry& r) {
  detail::ojson j;
  j["seq"] = r.seq;
  j["url"] = r.url;
  j["initiator_url"] = detail::optional_json(r.initiator_url);
  j["request_type"] = std::string(to_string(r.request_type));
  j["frame_id"] = detail::optional_json(r.frame_id);
  j["response_status"] = detail::optional_json(r.response_status);
  return j;
}

inline nlohmann::ordered_json to_json(const CrawlRecord& rec) {
  detail::ojson j;
  j["page_url"] = rec.page_url;
  j["final_url"] = rec.final_url;
  j["category_label"] = detail::optional_json(rec.category_label);
  j["fetch_status"] = rec.fetch_status;
  j["html"] = rec.html;
  auto& reqs = j["requests"] = detail::ojson::array();
  for (const auto& r : rec.requests) reqs.push_back(to_json(r));
  j["captured_at"] = rec.captured_at;
  return j;
}

// Throws DataError on missing or mistyped fields.
inline RequestEntry request_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("request entry must be an object");
  RequestEntry r;
  r.seq = detail::require_int(j, "seq");
  r.url = detail::require_string(j, "url");
  r.initiator_url = detail::optional_string(j, "initiator_url");
  const auto type = detail::require_string(j, "request_type");
  const auto parsed = parse_request_type(type);
  if (!parsed) throw DataError("unknown request_type '" + type + "'");
  r.request_type = *parsed;
  r.frame_id = detail::optional_string(j, "frame_id");
  r.response_status = detail::optional_int(j, "response_status");
  return r;
}

inline CrawlRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("record must be a JSON object");
  CrawlRecord rec;
  rec.page_url = detail::require_string(j, "page_url");
  rec.final_url = detail::require_string(j, "final_url");
  rec.category_label = detail::optional_string(j, "category_label");
  rec.fetch_status = static_cast<int>(detail::require_int(j, "fetch_status"));
  rec.html = detail::require_string(j, "html");
  const auto& reqs = detail::require(j, "requests");
  if (!reqs.is_array()) throw DataError("field 'requests' must be an array");
  rec.requests.reserve(reqs.size());
  for (const auto& r : reqs) rec.requests.push_back(request_from_json(r));
  rec.captured_at = detail::require_string(j, "captured_at");
  return rec;
}

// One JSON object, no trailing newline. Field order is fixed, so equal
// records always serialize to equal bytes.
inline std::string serialize_record(const CrawlRecord& rec) {
  return to_json(rec).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

inline void write_crawl_records(std::ostream& out, const std::vector<CrawlRecord>& records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

// Reads newline-delimited records. Malformed lines become ParseErrors and do
// not affect neighbouring lines; blank lines are skipped. Only an unreadable
// stream is fatal.
inline ParseResult parse_crawl_records(std::istream& in) {
  if (!in.good() && !in.eof()) throw DataError("crawl record stream is not readable");
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      result.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({line_no, e.what()});
    } catch (const DataError& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw DataError("read error on crawl record stream");
  return result;
}

inline ParseResult parse_crawl_records(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_crawl_records(in);
}

// Lists every schema invariant the record breaks. Pipeline policy (e.g. 404
// exclusion) is not checked here.
inline std::vector<Violation> validate_record(const CrawlRecord& rec) {
  std::vector<Violation> out;
  if (!is_http_url(rec.page_url)) out.push_back({"page_url", "not an absolute http(s) URL"});
  if (!is_http_url(rec.final_url)) out.push_back({"final_url", "not an absolute http(s) URL"});
  if (rec.fetch_status < 100 || rec.fetch_status > 599) {
    out.push_back({"fetch_status", "outside [100, 599]: " + std::to_string(rec.fetch_status)});
  }
  if (!detail::is_rfc3339_utc(rec.captured_at)) {
    out.push_back({"captured_at", "not an RFC-3339 UTC timestamp"});
  }

  std::set<std::int64_t> seen;
  std::set<std::int64_t> reported;
  std::size_t documents = 0;
  for (std::size_t i = 0; i < rec.requests.size(); ++i) {
    const auto& r = rec.requests[i];
    const std::string where = "requests[" + std::to_string(i) + "]";
    if (r.seq < 0) out.push_back({where + ".seq", "negative sequence number"});
    if (!seen.insert(r.seq).second && reported.insert(r.seq).second) {
      out.push_back({where + ".seq", "duplicate seq " + std::to_string(r.seq)});
    }
    if (i > 0 && r.seq < rec.requests[i - 1].seq) {
      out.push_back({where + ".seq", "sequence numbers decrease"});
    }
    if (!is_http_url(r.url)) out.push_back({where + ".url", "not an absolute http(s) URL"});
    if (r.initiator_url && !is_http_url(*r.initiator_url)) {
      out.push_back({where + ".initiator_url", "not an absolute http(s) URL"});
    }
    if (r.request_type == RequestType::document) ++documents;
  }
  if (documents > 1) {
    out.push_back({"requests", "multiple document-type entries (" + std::to_string(documents) + ")"});
  }
  return out;
}

// 404 responses and pages that never loaded are dropped from the corpus.
inline bool should_discard(const CrawlRecord& rec, bool attempts_exhausted) {
  return attempts_exhausted || rec.fetch_status == 404;
}

}  // namespace sensitrack
