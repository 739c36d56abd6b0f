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

#include <gtest/gtest.h>

#include <sstream>

#include "sensitrack/crawl_record.hpp"
#include "sensitrack/sample_corpus.hpp"
#include "support/fixtures.hpp"

namespace sensitrack {
namespace {

bool has_violation(const CrawlRecord& r, const std::string& field_prefix) {
  for (const auto& v : validate_record(r)) {
    if (v.field.rfind(field_prefix, 0) == 0) return true;
  }
  return false;
}

TEST(CrawlRecord, RoundTripsThroughJson) {
  auto rec = fixtures::mangoporn();
  rec.category_label = "Porn";
  rec.requests[3].response_status = std::nullopt;
  const auto line = serialize_record(rec);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto parsed = parse_crawl_records(line + "\n");
  ASSERT_TRUE(parsed.errors.empty());
  ASSERT_EQ(parsed.records.size(), 1u);
  EXPECT_EQ(parsed.records[0], rec);
  EXPECT_EQ(serialize_record(parsed.records[0]), line);
}

TEST(CrawlRecord, NullsSerializeExplicitly) {
  fixtures::RecordBuilder b("https://a.com/");
  const auto j = nlohmann::json::parse(serialize_record(b.rec));
  EXPECT_TRUE(j["category_label"].is_null());
  EXPECT_TRUE(j["requests"][0]["initiator_url"].is_null());
  EXPECT_TRUE(j["requests"][0]["frame_id"].is_null());
  EXPECT_EQ(j["requests"][0]["request_type"], "document");
}

TEST(CrawlRecord, SampleCorpusRoundTrips) {
  const auto corpus = sample::make_corpus({});
  std::stringstream ss;
  write_crawl_records(ss, corpus);
  const auto back = parse_crawl_records(ss);
  EXPECT_TRUE(back.errors.empty());
  EXPECT_EQ(back.records, corpus);
}

TEST(CrawlRecord, BadLinesAreIsolated) {
  const auto good = serialize_record(fixtures::RecordBuilder("https://a.com/").rec);
  const std::string text = good + "\n{not json\n\n" + R"({"page_url": 3})" + "\n" +
                           R"({"page_url":"https://b.com/","final_url":"https://b.com/","fetch_status":200,"html":"","requests":[{"seq":0,"url":"https://b.com/","request_type":"websocket"}],"captured_at":"2026-01-01T00:00:00Z"})" +
                           "\n" + good + "\r\n";
  const auto r = parse_crawl_records(text);
  EXPECT_EQ(r.records.size(), 2u);
  ASSERT_EQ(r.errors.size(), 3u);
  EXPECT_EQ(r.errors[0].line, 2u);
  EXPECT_EQ(r.errors[1].line, 4u);
  EXPECT_NE(r.errors[1].reason.find("page_url"), std::string::npos);
  EXPECT_NE(r.errors[2].reason.find("websocket"), std::string::npos);
}

TEST(CrawlRecord, MissingOptionalFieldsAccepted) {
  const std::string line =
      R"({"page_url":"https://b.com/","final_url":"https://b.com/","fetch_status":200,"html":"x","requests":[{"seq":0,"url":"https://b.com/","request_type":"document"}],"captured_at":"2026-01-01T00:00:00Z"})";
  const auto r = parse_crawl_records(line);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_FALSE(r.records[0].category_label);
  EXPECT_FALSE(r.records[0].requests[0].initiator_url);
}

TEST(Validate, CleanRecordPasses) { EXPECT_TRUE(validate_record(fixtures::mangoporn()).empty()); }

TEST(Validate, ReportsEachInvariant) {
  auto r = fixtures::RecordBuilder("https://a.com/").rec;
  r.final_url = "not a url";
  r.fetch_status = 42;
  r.captured_at = "2026-01-01 10:00";
  r.requests.push_back({-1, "https://x.com/", std::string("ftp://y"), RequestType::document, std::nullopt, 200});
  r.requests.push_back({-1, "relative", std::nullopt, RequestType::script, std::nullopt, 200});
  EXPECT_TRUE(has_violation(r, "final_url"));
  EXPECT_TRUE(has_violation(r, "fetch_status"));
  EXPECT_TRUE(has_violation(r, "captured_at"));
  EXPECT_TRUE(has_violation(r, "requests[1].seq"));
  EXPECT_TRUE(has_violation(r, "requests[1].initiator_url"));
  EXPECT_TRUE(has_violation(r, "requests[2].url"));
  EXPECT_TRUE(has_violation(r, "requests"));
  EXPECT_FALSE(has_violation(r, "page_url"));
}

TEST(Validate, DuplicateSeqReportedOnce) {
  auto r = fixtures::RecordBuilder("https://a.com/").rec;
  for (int i = 0; i < 3; ++i) {
    r.requests.push_back({5, "https://x.com/", std::nullopt, RequestType::script, std::nullopt, 200});
  }
  std::size_t dupes = 0;
  for (const auto& v : validate_record(r)) dupes += v.message.find("duplicate") != std::string::npos;
  EXPECT_EQ(dupes, 1u);
}

TEST(Validate, TimestampForms) {
  auto r = fixtures::RecordBuilder("https://a.com/").rec;
  for (const char* ok : {"2026-03-01T10:00:00Z", "2026-03-01T10:00:00.123Z", "2026-03-01T10:00:00+00:00"}) {
    r.captured_at = ok;
    EXPECT_FALSE(has_violation(r, "captured_at")) << ok;
  }
  for (const char* bad : {"2026-03-01T10:00:00+02:00", "2026-03-01", ""}) {
    r.captured_at = bad;
    EXPECT_TRUE(has_violation(r, "captured_at")) << bad;
  }
}

TEST(ShouldDiscard, NotFoundOrExhausted) {
  auto r = fixtures::RecordBuilder("https://a.com/").rec;
  EXPECT_FALSE(should_discard(r, false));
  EXPECT_TRUE(should_discard(r, true));
  r.fetch_status = 404;
  EXPECT_TRUE(should_discard(r, false));
  r.fetch_status = 500;
  EXPECT_FALSE(should_discard(r, false));
}

TEST(RequestType, NamesRoundTrip) {
  for (auto name : kRequestTypeNames) {
    const auto t = parse_request_type(name);
    ASSERT_TRUE(t);
    EXPECT_EQ(to_string(*t), name);
  }
  EXPECT_FALSE(parse_request_type("Script"));
}

}  // namespace
}  // namespace sensitrack
