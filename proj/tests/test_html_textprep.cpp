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

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "sensitrack/html.hpp"
#include "sensitrack/textprep.hpp"
#include "support/fixtures.hpp"

namespace sensitrack {
namespace {

using html::extract_meta;
using html::extract_visible_text;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

PrepConfig english_config() {
  PrepConfig c;
  c.stopwords = load_stopwords(fixtures::data_path("stopwords_en.txt"));
  return c;
}

CrawlRecord page(const std::string& html) {
  auto r = fixtures::RecordBuilder("https://www.clinic.org/").rec;
  r.html = html;
  r.category_label = "Health";
  return r;
}

bool contains(const std::vector<std::string>& v, const std::string& t) {
  return std::find(v.begin(), v.end(), t) != v.end();
}

TEST(Html, VisibleTextSkipsScriptsStylesAndComments) {
  const auto text = extract_visible_text(
      "<html><head><title>T</title><script>var hidden = 1;</script><style>p{}</style></head>"
      "<body><p>Hello<!-- not me --> world</p><noscript>nojs</noscript><template>tpl</template>"
      "<textarea>typed</textarea></body></html>");
  EXPECT_EQ(text.find("hidden"), std::string::npos);
  EXPECT_EQ(text.find("not me"), std::string::npos);
  EXPECT_EQ(text.find("nojs"), std::string::npos);
  EXPECT_EQ(text.find("tpl"), std::string::npos);
  EXPECT_NE(text.find("Hello world"), std::string::npos);
}

TEST(Html, BlockBoundariesSeparateWords) {
  EXPECT_EQ(extract_visible_text("<div>one</div><div>two</div>"), "one two");
  EXPECT_EQ(extract_visible_text("<p>in<b>line</b></p>"), "inline");
  EXPECT_EQ(extract_visible_text("a<br>b"), "a b");
}

TEST(Html, EntitiesDecoded) {
  EXPECT_EQ(extract_visible_text("<p>Fish &amp; chips &lt;3 &#233;t&#xE9; &nbsp;x &bogus;</p>"),
            "Fish & chips <3 \xC3\xA9t\xC3\xA9 x &bogus;");
}

TEST(Html, TolerantOfBrokenMarkup) {
  EXPECT_NO_THROW(extract_visible_text("<p unclosed <div>text</p></span><!-- open comment"));
  EXPECT_EQ(extract_visible_text("<script>never closed"), "");
  EXPECT_EQ(extract_visible_text(""), "");
}

TEST(Html, MetaCollectsTitleAndWhitelistedTags) {
  const auto meta = extract_meta(
      "<head><title> My  Page </title><meta name=\"Description\" content=\"about things\">"
      "<meta property='og:title' content='OG'><meta name=viewport content=\"width=device-width\">"
      "<meta name=\"keywords\"></head>");
  EXPECT_EQ(meta, "My Page about things OG");
}

TEST(Tokenize, SplitsLowercasesAndDropsShortTokens) {
  EXPECT_EQ(tokenize("The QUICK brown-fox, an ox; 42 123 x9z"),
            (std::vector<std::string>{"the", "quick", "brown", "fox", "123", "x9z"}));
}

TEST(Tokenize, UnicodeLetters) {
  const auto t = tokenize("Ärzte helfen f\xC3\xBCr Gr\xC3\xB6\xC3\x9F" "e");
  EXPECT_EQ(t, (std::vector<std::string>{"\xC3\xA4rzte", "helfen", "f\xC3\xBCr", "gr\xC3\xB6\xC3\x9F" "e"}));
}

TEST(Stopwords, LoadIgnoresCommentsAndCase) {
  std::istringstream in("# header\nThe\n  and  \n\nof # trailing\n");
  const auto s = load_stopwords(in);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_TRUE(s.count("the"));
  EXPECT_TRUE(s.count("of"));
}

TEST(Stopwords, ShippedListContainsCommonWords) {
  const auto s = english_config().stopwords;
  for (const char* w : {"the", "and", "which", "their", "about", "should"}) EXPECT_TRUE(s.count(w)) << w;
  EXPECT_FALSE(s.count("diabetes"));
}

TEST(Preprocess, EnglishPageAccepted) {
  const auto doc = preprocess(page(read_file(fixtures::test_data_path("lang/english.html"))), english_config());
  ASSERT_FALSE(doc.rejected_reason);
  EXPECT_EQ(doc.category_label, "Health");
  EXPECT_TRUE(contains(doc.content_tokens, "diabetes"));
  EXPECT_TRUE(contains(doc.content_tokens, "nurses"));
  EXPECT_FALSE(contains(doc.content_tokens, "the"));
  EXPECT_FALSE(contains(doc.content_tokens, "datalayer"));
  EXPECT_FALSE(contains(doc.content_tokens, "pixel"));
  EXPECT_TRUE(contains(doc.meta_tokens, "insulin"));
  EXPECT_TRUE(contains(doc.meta_tokens, "clinic"));
}

TEST(Preprocess, NonEnglishPagesRejected) {
  for (const char* name : {"lang/german.html", "lang/spanish.html"}) {
    const auto doc = preprocess(page(read_file(fixtures::test_data_path(name))), english_config());
    EXPECT_EQ(doc.rejected_reason, RejectReason::non_english) << name;
    EXPECT_TRUE(doc.content_tokens.empty());
  }
}

TEST(Preprocess, BlankPageIsTooShortNotForeign) {
  EXPECT_EQ(preprocess(page("<html><body></body></html>"), english_config()).rejected_reason, RejectReason::too_short);
  EXPECT_EQ(preprocess(page("<p>the and of</p>"), english_config()).rejected_reason, RejectReason::too_short);
}

TEST(Preprocess, MinTokensBoundary) {
  auto cfg = english_config();
  cfg.min_tokens = 3;
  // Three non-stop tokens plus the stop words that make it English.
  EXPECT_FALSE(preprocess(page("<p>the apple and the banana with cherry</p>"), cfg).rejected_reason);
  EXPECT_EQ(preprocess(page("<p>the apple and the banana</p>"), cfg).rejected_reason, RejectReason::too_short);
}

TEST(Preprocess, EnglishThresholdIsConfigurable) {
  auto cfg = english_config();
  const auto html = read_file(fixtures::test_data_path("lang/english.html"));
  cfg.english_stopword_ratio_threshold = 0.99;
  EXPECT_EQ(preprocess(page(html), cfg).rejected_reason, RejectReason::non_english);
  cfg.english_stopword_ratio_threshold = 0.0;
  EXPECT_FALSE(preprocess(page(read_file(fixtures::test_data_path("lang/german.html"))), cfg).rejected_reason);
}

TEST(Document, JsonRoundTrip) {
  Document d;
  d.source_url = "https://a.com/";
  d.category_label = "Religion";
  d.content_tokens = {"church", "prayer"};
  d.meta_tokens = {"faith"};
  d.third_parties = {{"cdn.x.com", 1}, {"y.net", 2}};
  std::istringstream in(serialize_document(d) + "\n");
  const auto back = read_documents(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], d);

  Document r;
  r.source_url = "https://b.com/";
  r.rejected_reason = RejectReason::non_english;
  std::istringstream in2(serialize_document(r));
  EXPECT_EQ(read_documents(in2).at(0), r);
}

TEST(RejectReason, NamesRoundTrip) {
  for (auto r : {RejectReason::non_english, RejectReason::too_short, RejectReason::discarded_fetch}) {
    EXPECT_EQ(parse_reject_reason(to_string(r)), r);
  }
  EXPECT_FALSE(parse_reject_reason("other"));
}

}  // namespace
}  // namespace sensitrack
