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

#include "sensitrack/csync.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace sensitrack {
namespace {

using fixtures::kBlob;
using fixtures::RecordBuilder;

std::vector<CSyncEvent> detect(const CrawlRecord& r, const ObfuscationRule& rule = {}) {
  return detect_csync(r, build_inclusion_tree(r, fixtures::psl()), fixtures::test_keywords(), rule);
}

// One tracker script on a first-party page issuing `url`.
CrawlRecord single_request(const std::string& url) {
  RecordBuilder b("https://www.host-site.com/");
  b.add("https://tag.origin-ads.com/t.js", std::string("https://www.host-site.com/"));
  b.add(url, std::string("https://tag.origin-ads.com/t.js"), RequestType::image);
  return b.rec;
}

TEST(Keywords, NormalizedAndDeduplicated) {
  const auto k = make_keyword_list({"UserMatch", "usermatch", "", "uid_sync"});
  EXPECT_EQ(k.keywords, (std::vector<std::string>{"usermatch", "uid_sync"}));
  EXPECT_THROW(make_keyword_list({}), ConfigError);
  std::istringstream in("# header\n\n  usercookie  \nsync_id # trailing\n");
  EXPECT_EQ(load_keywords(in).keywords, (std::vector<std::string>{"usercookie", "sync_id"}));
}

TEST(Keywords, ShippedListStartsWithTheCoreFour) {
  const auto k = load_keywords(fixtures::data_path("csync_keywords.txt"));
  ASSERT_GE(k.keywords.size(), 4u);
  const std::vector<std::string> head(k.keywords.begin(), k.keywords.begin() + 4);
  EXPECT_EQ(head, fixtures::test_keywords().keywords);
  EXPECT_THROW(load_keywords(std::filesystem::path("/nonexistent/keywords.txt")), ConfigError);
}

TEST(UrlArguments, Presence) {
  EXPECT_TRUE(has_url_arguments("https://a.com/p?x=1"));
  EXPECT_TRUE(has_url_arguments("https://a.com/p?flag"));
  EXPECT_FALSE(has_url_arguments("https://a.com/p?"));
  EXPECT_FALSE(has_url_arguments("https://a.com/usersync"));
  std::size_t bad = 0;
  EXPECT_FALSE(has_url_arguments("::::", &bad));
  EXPECT_EQ(bad, 1u);
}

TEST(Entropy, MatchesOracle) {
  for (const std::string& s : std::vector<std::string>{"", "aaaa", "abab", "abcd", kBlob, "Zm9vYmFyYmF6cXV4"}) {
    EXPECT_NEAR(shannon_entropy(s), oracle::entropy_bits(s), 1e-12) << s;
  }
  EXPECT_DOUBLE_EQ(shannon_entropy(kBlob), 5.0);
}

TEST(Obfuscation, Rule) {
  const auto kw = fixtures::test_keywords();
  EXPECT_TRUE(is_obfuscated(kBlob, kw));
  EXPECT_FALSE(is_obfuscated(kBlob.substr(0, 15), kw));                      // too short
  EXPECT_FALSE(is_obfuscated("aaaaaaaaaaaaaaaaaaaa", kw));                   // low entropy
  EXPECT_FALSE(is_obfuscated(kBlob + "!", kw));                              // outside alphabet
  EXPECT_FALSE(is_obfuscated("xQ7" + std::string("usermatch") + "Zk2Lp9", kw));  // embeds a keyword
  EXPECT_TRUE(is_obfuscated("aZ3-kQ9_xW7+pL2/mN8=", kw));
  EXPECT_FALSE(is_obfuscated(kBlob, kw, {40, 3.5}));
  EXPECT_FALSE(is_obfuscated(kBlob, kw, {16, 5.5}));
}

TEST(Detect, PlantedFixture) {
  const auto planted = fixtures::planted_csync();
  std::vector<CSyncEvent> all;
  for (const auto& r : planted.records) {
    const auto ev = detect(r);
    all.insert(all.end(), ev.begin(), ev.end());
  }
  ASSERT_EQ(all.size(), planted.expected.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].source_etld1, planted.expected[i].source);
    EXPECT_EQ(all[i].dest_etld1, planted.expected[i].dest);
    EXPECT_EQ(all[i].matched_keyword, planted.expected[i].keyword);
    EXPECT_EQ(all[i].request_seq, planted.expected[i].seq);
  }
  EXPECT_EQ(all[0].site, "shop-site.com");
  EXPECT_EQ(all[0].url, "https://b-sync.com/sync?usercookie=XYZ7");
}

TEST(Detect, SinglePartyNeverSyncs) { EXPECT_TRUE(detect(fixtures::googlesyndication()).empty()); }

TEST(Detect, KeywordLocations) {
  EXPECT_EQ(detect(single_request("https://x.partner.net/async_usersync/p?id=1")).at(0).matched_keyword,
            "async_usersync");
  EXPECT_EQ(detect(single_request("https://x.partner.net/p?UserCookie=1")).at(0).matched_keyword, "usercookie");
  EXPECT_EQ(detect(single_request("https://x.partner.net/p?r=external%5Fuser%5Fid")).at(0).matched_keyword,
            "external_user_id");
  EXPECT_TRUE(detect(single_request("https://x.partner.net/p?id=42")).empty());
}

TEST(Detect, FirstKeywordInListOrderWins) {
  const auto ev = detect(single_request("https://x.partner.net/p?usermatch=1&usercookie=2"));
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].matched_keyword, "usercookie");
}

TEST(Detect, ObfuscatedValuesHideNothing) {
  EXPECT_TRUE(detect(single_request("https://x.partner.net/p?usermatch=" + kBlob)).empty());
  EXPECT_TRUE(detect(single_request("https://x.partner.net/usermatch?a=" + kBlob)).empty());
  EXPECT_EQ(detect(single_request("https://x.partner.net/usermatch?a=" + kBlob + "&b=1")).size(), 1u);
  ObfuscationRule lax{64, 3.5};
  EXPECT_EQ(detect(single_request("https://x.partner.net/p?usermatch=" + kBlob), lax).size(), 1u);
}

TEST(Detect, EndpointsMustBeThirdParties) {
  EXPECT_TRUE(detect(single_request("https://www.host-site.com/sync?usermatch=1")).empty());
  RecordBuilder b("https://www.host-site.com/");
  b.add("https://x.partner.net/p?usermatch=1", std::string("https://www.host-site.com/"));
  EXPECT_TRUE(detect(b.rec).empty());
}

TEST(Detect, TreeMustMatchRecord) {
  const auto r = single_request("https://x.partner.net/p?usermatch=1");
  const auto other = build_inclusion_tree(fixtures::mangoporn(), fixtures::psl());
  EXPECT_THROW(detect_csync(r, other, fixtures::test_keywords()), std::invalid_argument);
}

TEST(Events, JsonLines) {
  const auto ev = detect(single_request("https://x.partner.net/p?usermatch=1"));
  std::ostringstream out;
  write_events(out, ev);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["site"], "host-site.com");
  EXPECT_EQ(j["source_etld1"], "origin-ads.com");
  EXPECT_EQ(j["dest_etld1"], "partner.net");
  EXPECT_EQ(j["request_seq"], 2);
}

CSyncEvent ev(const std::string& a, const std::string& b) { return {"", a, b, "usermatch", 0, ""}; }

TEST(Stats, RowsAndAggregates) {
  std::vector<CSyncSite> sites = {
      {"Health", "h1.com", 10, {ev("a.com", "b.com"), ev("b.com", "a.com")}},
      {"Health", "h2.com", 5, {}},
      {"Religion", "r1.com", 20, {ev("a.com", "niche.org")}},
      {"TopK", "t1.com", 15, {ev("c.com", "d.com")}},
      {"TopK", "t1.com", 10, {}},
  };
  const std::map<std::string, std::set<std::string>> niche = {
      {"Religion", {"niche.org"}}, {"TopK", {"d.com"}}, {"Porn", {"a.com"}}};
  const auto rows = csync_stats(sites, niche);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].category, "Health");
  EXPECT_EQ(rows[0].n_websites, 2u);
  EXPECT_EQ(rows[0].n_websites_with_csync, 1u);
  EXPECT_DOUBLE_EQ(rows[0].pct_websites_with_csync, 50.0);
  EXPECT_EQ(rows[0].n_csync_requests, 2u);
  EXPECT_NEAR(rows[0].pct_csync_requests, 100.0 * 2 / 15, 1e-12);
  EXPECT_EQ(rows[0].n_unique_pairs, 1u);
  EXPECT_EQ(rows[0].n_niche_pairs, 0u);  // the Porn list does not apply
  EXPECT_EQ(rows[1].category, "Religion");
  EXPECT_DOUBLE_EQ(rows[1].pct_niche_pairs, 100.0);
  EXPECT_EQ(rows[2].category, "TopK");
  EXPECT_EQ(rows[2].n_domains, 1u);
  EXPECT_EQ(rows[2].n_niche_pairs, 1u);

  const auto& sens = rows[3];
  EXPECT_EQ(sens.category, kAllSensitive);
  EXPECT_EQ(sens.n_websites, 3u);
  EXPECT_EQ(sens.n_unique_pairs, 2u);
  EXPECT_EQ(sens.n_niche_pairs, 1u);

  const auto& all = rows[4];
  EXPECT_EQ(all.category, kOverall);
  EXPECT_EQ(all.n_websites, 5u);
  EXPECT_EQ(all.n_domains, 4u);
  EXPECT_EQ(all.n_requests, 60u);
  EXPECT_EQ(all.n_unique_pairs, 3u);
  EXPECT_EQ(all.n_niche_pairs, 2u);
}

TEST(Stats, EmptyInputGivesZeroAggregates) {
  const auto rows = csync_stats({}, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].n_websites, 0u);
  EXPECT_EQ(rows[1].pct_websites_with_csync, 0.0);
}

}  // namespace
}  // namespace sensitrack
