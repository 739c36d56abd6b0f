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
#include <optional>
#include <string>
#include <vector>

#include "sensitrack/crawl_record.hpp"
#include "sensitrack/csync.hpp"
#include "sensitrack/psl.hpp"

#ifndef SENSITRACK_DATA_DIR
#error "SENSITRACK_DATA_DIR must be defined"
#endif
#ifndef SENSITRACK_TEST_DATA_DIR
#error "SENSITRACK_TEST_DATA_DIR must be defined"
#endif

namespace fixtures {

using sensitrack::CrawlRecord;
using sensitrack::RequestEntry;
using sensitrack::RequestType;

inline const sensitrack::PublicSuffixList& psl() {
  static const auto list = sensitrack::PublicSuffixList::load(std::string(SENSITRACK_DATA_DIR) + "/public_suffix_list.dat");
  return list;
}

inline std::string data_path(const std::string& name) { return std::string(SENSITRACK_DATA_DIR) + "/" + name; }
inline std::string test_data_path(const std::string& name) { return std::string(SENSITRACK_TEST_DATA_DIR) + "/" + name; }

struct RecordBuilder {
  CrawlRecord rec;
  std::int64_t seq = 0;

  explicit RecordBuilder(const std::string& page) {
    rec.page_url = page;
    rec.final_url = page;
    rec.fetch_status = 200;
    rec.html = "<p>fixture</p>";
    rec.captured_at = "2026-03-01T10:00:00Z";
    rec.requests.push_back({seq++, page, std::nullopt, RequestType::document, std::nullopt, 200});
  }

  RecordBuilder& add(const std::string& url, std::optional<std::string> initiator, RequestType type = RequestType::script,
                     std::optional<std::string> frame = std::nullopt) {
    rec.requests.push_back({seq++, url, std::move(initiator), type, std::move(frame), 200});
    return *this;
  }
};

// One page of a pornographic site with five directly included third
// parties, three of which pull in eleven more domains.
inline CrawlRecord mangoporn() {
  const std::string page = "https://mangoporn.net/";
  RecordBuilder b(page);
  b.add(page + "wp-content/themes/main.css", page, RequestType::stylesheet);
  b.add(page + "wp-includes/js/jquery.js", page);

  const std::string disqus = "https://disqus.com/embed.js";
  b.add(disqus, page);
  b.add("https://a.disquscdn.com/next/embed/common.bundle.js", disqus);
  b.add("https://c.disquscdn.com/next/embed/styles/lounge.css", disqus, RequestType::stylesheet);
  b.add("https://www.google-analytics.com/analytics.js", disqus);
  b.add("https://disqus.com/api/config.js", disqus);  // same party, stays at level 1

  const std::string exo_frame = "https://exosrv.com/iframe.php?idzone=1";
  b.add(exo_frame, page, RequestType::sub_frame, std::string("frame-7"));
  b.add("https://main.exoclick.com/tag.js", std::nullopt, RequestType::script, std::string("frame-7"));
  b.add("https://s.magsrv.com/splash.php", exo_frame);
  b.add("https://a.realsrv.com/ad-provider.js", exo_frame);
  b.add("https://syndication.exdynsrv.com/ads.php", std::nullopt, RequestType::xhr, std::string("frame-7"));

  const std::string gtm = "https://www.googletagmanager.com/gtag/js?id=UA-1";
  b.add(gtm, page);
  b.add("https://www.googleadservices.com/pagead/conversion.js", gtm);
  b.add("https://stats.g.doubleclick.net/r/collect?v=1", gtm, RequestType::image);
  b.add("https://googleads.g.doubleclick.net/pagead/viewthroughconversion/1", gtm, RequestType::image);
  b.add("https://td.doubleclick.net/td/rul/1", gtm, RequestType::sub_frame, std::string("frame-9"));
  b.add("https://www.googletagmanager.com/gtag/js?id=UA-1", page);  // repeat request

  b.add("https://cdnjs.cloudflare.com/ajax/libs/lazysizes.min.js", page);
  b.add("https://fonts.googleapis.com/css?family=Roboto", page, RequestType::stylesheet);
  b.add(page + "favicon.ico", page, RequestType::image);
  return b.rec;
}

inline sensitrack::CSyncKeywordList test_keywords() {
  return sensitrack::make_keyword_list({"usercookie", "external_user_id", "usermatch", "async_usersync"});
}

// 32 distinct base64-alphabet characters: entropy 5 bits/char.
inline const std::string kBlob = "aZ3kQ9xW7pL2mN8vB4cR6tY1uI5oE0sD";

struct PlantedEvent {
  std::string source, dest, keyword;
  std::int64_t seq;
};

struct PlantedCorpus {
  std::vector<CrawlRecord> records;
  std::vector<PlantedEvent> expected;
};

inline PlantedCorpus planted_csync() {
  PlantedCorpus pc;
  {
    const std::string page = "https://www.shop-site.com/";
    RecordBuilder b(page);
    const std::string a = "https://tag.a-tracker.com/t.js";
    b.add(a, page);                                                               // 1
    b.add("https://b-sync.com/usersync", a, RequestType::image);                  // 2 argumentless
    b.add("https://x.a-tracker.com/sync?usermatch=1", a, RequestType::image);     // 3 same eTLD+1
    b.add("https://b-sync.com/sync?usercookie=XYZ7", a, RequestType::image);      // 4 keyword hit
    b.add("https://c-sync.com/px?usermatch=" + kBlob, a, RequestType::image);     // 5 obfuscated under keyword
    b.add("https://d-sync.com/async_usersync?id=" + kBlob, a, RequestType::image);  // 6 path hit, all obfuscated
    b.add("https://e-sync.com/p?x=1&y=2", a, RequestType::image);                 // 7 no keyword
    b.add("https://f-sync.com/r?redirect=external_user_id", a, RequestType::image);  // 8 keyword in value
    b.add("https://www.shop-site.com/sync?usercookie=1", a, RequestType::image);  // 9 to first party
    b.add("https://b-sync.com/sync?usercookie=2", page, RequestType::image);      // 10 from first party
    b.add("https://g-sync.com/cm?USERMATCH=77&pid=" + kBlob, a, RequestType::image);  // 11 readable keyword arg
    pc.records.push_back(b.rec);
    pc.expected.push_back({"a-tracker.com", "b-sync.com", "usercookie", 4});
    pc.expected.push_back({"a-tracker.com", "f-sync.com", "external_user_id", 8});
    pc.expected.push_back({"a-tracker.com", "g-sync.com", "usermatch", 11});
  }
  {
    const std::string page = "https://www.news-site.org/";
    RecordBuilder b(page);
    const std::string b_tag = "https://b-sync.com/tag.js";
    b.add(b_tag, page);
    b.add("https://a-tracker.com/match?async_usersync=1&uid=42", b_tag, RequestType::image);
    pc.records.push_back(b.rec);
    pc.expected.push_back({"b-sync.com", "a-tracker.com", "async_usersync", 2});
  }
  return pc;
}

// pagead2.googlesyndication.com talking to tpc.googlesyndication.com: a
// single registrable domain, so never a sync between parties.
inline CrawlRecord googlesyndication() {
  const std::string page = "https://www.recipes-blog.com/";
  RecordBuilder b(page);
  const std::string tag = "https://pagead2.googlesyndication.com/pagead/js/adsbygoogle.js";
  b.add(tag, page);
  b.add("https://tpc.googlesyndication.com/sodar/sodar2.js?usercookie=abc&usermatch=1", tag);
  b.add("https://tpc.googlesyndication.com/safeframe/1-0-40/html/container.html?external_user_id=9", tag,
        RequestType::sub_frame, std::string("f-ads"));
  return b.rec;
}

}  // namespace fixtures
