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

#include "sensitrack/coverage.hpp"
#include "support/fixtures.hpp"

namespace sensitrack {
namespace {

// Ten Health sites and ten Religion sites with a controlled tracker mix.
class CoverageTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (int i = 0; i < 20; ++i) {
      const bool health = i < 10;
      const std::string page = "https://www.site" + std::to_string(i) + ".com/";
      fixtures::RecordBuilder b(page);
      b.add("https://www.google-analytics.com/a.js", page);  // everywhere
      if (health && i < 7) b.add("https://tag.medpixel.com/t.js", page);
      if (!health && i == 10) b.add("https://px.medpixel.com/p.gif", page);  // one leak
      if (health && i < 3) b.add("https://cdn.rarehealth.org/r.js", page);
      if (!health && i < 15) b.add("https://cdn.faithcounter.net/c.js", page);
      records.push_back(b.rec);
    }
    for (const auto& r : records) trees.push_back(build_inclusion_tree(r, fixtures::psl()));
    for (std::size_t i = 0; i < records.size(); ++i) {
      views.push_back({&records[i], &trees[i], i < 10 ? "Health" : "Religion"});
    }
  }

  std::vector<CrawlRecord> records;
  std::vector<InclusionTree> trees;
  std::vector<SiteView> views;
};

TEST_F(CoverageTest, PercentagesAndCounts) {
  const PresenceIndex index(views, Granularity::etld1);
  EXPECT_EQ(index.total_sites(), 20u);
  EXPECT_EQ(index.sites_in("Health"), 10u);
  EXPECT_EQ(index.sites_in("Porn"), 0u);
  const auto e = tracker_coverage(index, "medpixel.com", "Health");
  EXPECT_EQ(e.cat_sites, 7u);
  EXPECT_EQ(e.other_sites, 1u);
  EXPECT_DOUBLE_EQ(e.cat_percent, 70.0);
  EXPECT_DOUBLE_EQ(e.other_percent, 10.0);
  const auto ga = tracker_coverage(index, "google-analytics.com", "Religion");
  EXPECT_DOUBLE_EQ(ga.cat_percent, 100.0);
  EXPECT_DOUBLE_EQ(ga.other_percent, 100.0);
  const auto none = tracker_coverage(index, "absent.com", "Health");
  EXPECT_EQ(none.cat_sites, 0u);
  EXPECT_EQ(none.cat_total, 10u);
  EXPECT_THROW(tracker_coverage(index, "x.com", "Porn"), std::invalid_argument);
}

TEST_F(CoverageTest, FullHostGranularitySeparatesSubdomains) {
  const PresenceIndex index(views, Granularity::full);
  EXPECT_EQ(tracker_coverage(index, "tag.medpixel.com", "Health").other_sites, 0u);
  EXPECT_EQ(tracker_coverage(index, "px.medpixel.com", "Religion").cat_sites, 1u);
  EXPECT_EQ(tracker_coverage(index, "medpixel.com", "Health").cat_sites, 0u);
}

TEST_F(CoverageTest, NicheSelection) {
  const PresenceIndex index(views, Granularity::etld1);
  const auto strict = niche_trackers(index, "Health", {5.0, 10, Granularity::etld1});
  ASSERT_EQ(strict.size(), 1u);
  EXPECT_EQ(strict[0].tracker, "rarehealth.org");

  const auto loose = niche_trackers(index, "Health", {10.0, 10, Granularity::etld1});
  ASSERT_EQ(loose.size(), 2u);
  EXPECT_EQ(loose[0].tracker, "medpixel.com");  // boundary q is inclusive
  EXPECT_EQ(loose[1].tracker, "rarehealth.org");

  const auto all = niche_trackers(index, "Health", {100.0, 10, Granularity::etld1});
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].tracker, "google-analytics.com");

  const auto top1 = niche_trackers(index, "Health", {100.0, 1, Granularity::etld1});
  ASSERT_EQ(top1.size(), 1u);

  const auto religion = niche_trackers(index, "Religion", {0.0, 10, Granularity::etld1});
  ASSERT_EQ(religion.size(), 1u);
  EXPECT_EQ(religion[0].tracker, "faithcounter.net");
  EXPECT_DOUBLE_EQ(religion[0].cat_percent, 50.0);
}

TEST_F(CoverageTest, NicheOrderedByCategorySites) {
  const PresenceIndex index(views, Granularity::full);
  // 10, 7 and 3 Health sites respectively.
  const auto r = niche_trackers(index, "Health", {100.0, 10, Granularity::full});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].tracker, "www.google-analytics.com");
  EXPECT_EQ(r[1].tracker, "tag.medpixel.com");
}

TEST_F(CoverageTest, NicheArgumentValidation) {
  const PresenceIndex index(views, Granularity::etld1);
  EXPECT_THROW(niche_trackers(index, "Health", {-1.0, 10, Granularity::etld1}), std::invalid_argument);
  EXPECT_THROW(niche_trackers(index, "Health", {1.0, 0, Granularity::etld1}), std::invalid_argument);
  EXPECT_THROW(niche_trackers(index, "Health", {1.0, 10, Granularity::full}), std::invalid_argument);
  EXPECT_TRUE(niche_trackers(index, "Porn", {1.0, 10, Granularity::etld1}).empty());
}

TEST_F(CoverageTest, DuplicateSitesCollapse) {
  auto dup = views;
  dup.push_back(views[0]);
  const PresenceIndex index(dup, Granularity::etld1);
  EXPECT_EQ(index.total_sites(), 20u);
  dup.push_back({views[1].record, views[1].tree, "Religion"});
  EXPECT_THROW(PresenceIndex(dup, Granularity::etld1), std::invalid_argument);
}

TEST_F(CoverageTest, SingleCategoryHasZeroOtherPercent) {
  const std::vector<SiteView> only(views.begin(), views.begin() + 10);
  const PresenceIndex index(only, Granularity::etld1);
  const auto e = tracker_coverage(index, "medpixel.com", "Health");
  EXPECT_EQ(e.other_total, 0u);
  EXPECT_EQ(e.other_percent, 0.0);
}

TEST_F(CoverageTest, TrackersInIsSorted) {
  const PresenceIndex index(views, Granularity::etld1);
  EXPECT_EQ(index.trackers_in("Religion"),
            (std::vector<std::string>{"faithcounter.net", "google-analytics.com", "medpixel.com"}));
  EXPECT_TRUE(index.trackers_in("Porn").empty());
}

}  // namespace
}  // namespace sensitrack
