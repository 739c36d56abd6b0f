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

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensitrack/chains.hpp"

namespace sensitrack {

struct CoverageEntry {
  std::string tracker;
  std::string category;
  double cat_percent = 0;
  double other_percent = 0;
  std::size_t cat_sites = 0;
  std::size_t cat_total = 0;
  std::size_t other_sites = 0;
  std::size_t other_total = 0;
};

struct NicheFilterConfig {
  double q = 100.0;
  std::size_t top_n = 10;
  Granularity granularity = Granularity::etld1;
};

// Which trackers appear on which site, grouped by category. A site is
// identified by its final URL; repeated records of the same site collapse.
class PresenceIndex {
 public:
  PresenceIndex(const std::vector<SiteView>& corpus, Granularity g) : granularity_(g) {
    std::unordered_map<std::string, std::string> site_category;
    for (const auto& s : corpus) {
      if (!s.record || !s.tree) throw std::invalid_argument("PresenceIndex: incomplete site view");
      const auto& id = s.record->final_url;
      const auto [it, fresh] = site_category.emplace(id, s.category);
      if (!fresh) {
        if (it->second != s.category) {
          throw std::invalid_argument("site " + id + " is assigned to both " + it->second + " and " + s.category);
        }
        continue;
      }
      const auto c = category_slot(s.category);
      ++site_counts_[c];
      ++total_sites_;
      for (const auto& t : site_trackers(*s.tree, g)) {
        auto& row = counts_[t];
        row.resize(categories_.size(), 0);
        ++row[c];
      }
    }
  }

  Granularity granularity() const { return granularity_; }
  const std::vector<std::string>& categories() const { return categories_; }
  std::size_t total_sites() const { return total_sites_; }

  std::size_t sites_in(const std::string& category) const {
    const auto c = find_category(category);
    return c ? site_counts_[*c] : 0;
  }

  CoverageEntry coverage(const std::string& tracker, const std::string& category) const {
    const auto c = find_category(category);
    if (!c || site_counts_[*c] == 0) throw std::invalid_argument("no sites in category '" + category + "'");
    CoverageEntry e;
    e.tracker = tracker;
    e.category = category;
    e.cat_total = site_counts_[*c];
    e.other_total = total_sites_ - e.cat_total;
    if (const auto it = counts_.find(tracker); it != counts_.end()) {
      std::size_t everywhere = 0;
      for (auto v : it->second) everywhere += v;
      e.cat_sites = *c < it->second.size() ? it->second[*c] : 0;
      e.other_sites = everywhere - e.cat_sites;
    }
    e.cat_percent = 100.0 * static_cast<double>(e.cat_sites) / static_cast<double>(e.cat_total);
    e.other_percent =
        e.other_total == 0 ? 0.0 : 100.0 * static_cast<double>(e.other_sites) / static_cast<double>(e.other_total);
    return e;
  }

  // Every tracker seen on at least one site of the category, in name order.
  std::vector<std::string> trackers_in(const std::string& category) const {
    std::vector<std::string> out;
    const auto c = find_category(category);
    if (!c) return out;
    for (const auto& [t, row] : counts_) {
      if (*c < row.size() && row[*c] > 0) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t category_slot(const std::string& name) {
    if (const auto c = find_category(name)) return *c;
    categories_.push_back(name);
    site_counts_.push_back(0);
    return categories_.size() - 1;
  }

  std::optional<std::size_t> find_category(const std::string& name) const {
    for (std::size_t i = 0; i < categories_.size(); ++i) {
      if (categories_[i] == name) return i;
    }
    return std::nullopt;
  }

  Granularity granularity_;
  std::vector<std::string> categories_;
  std::vector<std::size_t> site_counts_;
  std::size_t total_sites_ = 0;
  std::unordered_map<std::string, std::vector<std::size_t>> counts_;
};

inline CoverageEntry tracker_coverage(const PresenceIndex& index, const std::string& tracker,
                                      const std::string& category) {
  return index.coverage(tracker, category);
}

// Trackers of the category whose coverage among all other sites is at most
// q percent, by category coverage descending then name, truncated to top_n.
inline std::vector<CoverageEntry> niche_trackers(const PresenceIndex& index, const std::string& category,
                                                 const NicheFilterConfig& config) {
  if (config.q < 0) throw std::invalid_argument("niche filter q must be >= 0");
  if (config.top_n < 1) throw std::invalid_argument("niche filter top_n must be >= 1");
  if (config.granularity != index.granularity()) {
    throw std::invalid_argument("niche filter granularity differs from the presence index");
  }
  std::vector<CoverageEntry> kept;
  for (const auto& t : index.trackers_in(category)) {
    auto e = index.coverage(t, category);
    if (e.other_percent <= config.q) kept.push_back(std::move(e));
  }
  std::sort(kept.begin(), kept.end(), [](const CoverageEntry& a, const CoverageEntry& b) {
    if (a.cat_sites != b.cat_sites) return a.cat_sites > b.cat_sites;
    return a.tracker < b.tracker;
  });
  if (kept.size() > config.top_n) kept.resize(config.top_n);
  return kept;
}

}  // namespace sensitrack
