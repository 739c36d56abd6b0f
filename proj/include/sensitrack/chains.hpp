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
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sensitrack/crawl_record.hpp"
#include "sensitrack/error.hpp"
#include "sensitrack/psl.hpp"
#include "sensitrack/textprep.hpp"
#include "sensitrack/url.hpp"

namespace sensitrack {

enum class Granularity { full, etld1 };

inline std::string_view to_string(Granularity g) { return g == Granularity::full ? "full" : "etld1"; }

inline std::optional<Granularity> parse_granularity(std::string_view s) {
  if (s == "full") return Granularity::full;
  if (s == "etld1") return Granularity::etld1;
  return std::nullopt;
}

struct TreeNode {
  std::string domain;  // full hostname
  std::string etld1;
  int level = 1;
  int parent = -1;  // index into InclusionTree::nodes; -1 is the first party
  std::int64_t via_request = 0;
};

// How one request of the record was placed. Node indices refer to
// InclusionTree::nodes; kFirstParty means the level-0 party.
struct RequestAttribution {
  static constexpr int kFirstParty = -1;
  static constexpr int kUnparseable = -2;

  int source = kFirstParty;  // party that initiated the request
  int dest = kFirstParty;    // party that served it
  bool fallback = false;     // initiator could not be resolved
};

struct InclusionTree {
  std::string root;  // first-party eTLD+1
  std::vector<TreeNode> nodes;
  std::vector<RequestAttribution> attributions;  // parallel to record.requests
  std::size_t unattributed = 0;

  const std::string& party_etld1(int index) const {
    return index < 0 ? root : nodes[static_cast<std::size_t>(index)].etld1;
  }
};

namespace detail {

inline std::optional<std::string> host_etld1(const std::optional<std::string>& url,
                                             const PublicSuffixList& psl) {
  if (!url) return std::nullopt;
  const auto host = url_host(*url);
  if (!host) return std::nullopt;
  return psl.etld1(*host);
}

}  // namespace detail

// Places every third-party request of the record under the party that
// initiated it.
//
//  * Initiator with the first party's eTLD+1: the request is a direct
//    inclusion (level 1), unless it runs inside an iframe that the first
//    party opened for a third party, in which case that frame's party is
//    the parent.
//  * Initiator matching existing nodes: attach below the one with the
//    smallest level (earliest on ties).
//  * No usable initiator: level-1 fallback, counted in `unattributed`.
//  * A request to the parent's own eTLD+1 stays at the parent's level.
//
// Nodes are identified by (full domain, level); repeats reuse the node.
inline InclusionTree build_inclusion_tree(const CrawlRecord& record, const PublicSuffixList& psl) {
  InclusionTree tree;
  auto root_host = url_host(record.final_url);
  if (!root_host) root_host = url_host(record.page_url);
  if (!root_host) throw DataError("record has no parseable page URL: " + record.page_url);
  tree.root = psl.etld1(*root_host);

  std::map<std::pair<std::string, int>, int> by_key;
  std::unordered_map<std::string, std::vector<int>> by_etld1;
  std::unordered_map<std::string, int> frame_owner;

  tree.attributions.reserve(record.requests.size());
  for (const auto& req : record.requests) {
    RequestAttribution attr;
    const auto host = url_host(req.url);
    if (!host) {
      attr.source = attr.dest = RequestAttribution::kUnparseable;
      tree.attributions.push_back(attr);
      ++tree.unattributed;
      continue;
    }
    const std::string dest_etld1 = psl.etld1(*host);
    const bool is_frame = req.request_type == RequestType::sub_frame;

    std::optional<int> framed;
    if (!is_frame && req.frame_id) {
      if (const auto it = frame_owner.find(*req.frame_id); it != frame_owner.end()) framed = it->second;
    }

    int parent = RequestAttribution::kFirstParty;
    const auto init_etld1 = detail::host_etld1(req.initiator_url, psl);
    if (init_etld1 && *init_etld1 == tree.root) {
      if (framed) parent = *framed;
    } else if (init_etld1) {
      const auto it = by_etld1.find(*init_etld1);
      if (it != by_etld1.end()) {
        parent = it->second.front();
        for (int idx : it->second) {
          if (tree.nodes[idx].level < tree.nodes[parent].level) parent = idx;
        }
      } else {
        attr.fallback = true;
      }
    } else if (framed) {
      parent = *framed;
    } else {
      attr.fallback = true;
    }
    attr.source = parent;

    if (dest_etld1 == tree.root) {
      attr.dest = RequestAttribution::kFirstParty;
      attr.fallback = false;
      tree.attributions.push_back(attr);
      continue;
    }
    if (attr.fallback) ++tree.unattributed;

    int attach = parent;
    int level = parent < 0 ? 1 : tree.nodes[parent].level + 1;
    if (parent >= 0 && tree.nodes[parent].etld1 == dest_etld1) {
      attach = tree.nodes[parent].parent;
      level = tree.nodes[parent].level;
    }

    auto key = std::make_pair(*host, level);
    int index;
    if (const auto it = by_key.find(key); it != by_key.end()) {
      index = it->second;
    } else {
      index = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({*host, dest_etld1, level, attach, req.seq});
      by_key.emplace(std::move(key), index);
      by_etld1[dest_etld1].push_back(index);
    }
    if (is_frame && req.frame_id) frame_owner[*req.frame_id] = index;
    attr.dest = index;
    tree.attributions.push_back(attr);
  }
  return tree;
}

using Chain = std::vector<std::string>;

// Maximal inclusion chains: one root-to-leaf domain path per leaf node.
inline std::vector<Chain> enumerate_chains(const InclusionTree& tree) {
  std::vector<bool> has_child(tree.nodes.size(), false);
  for (const auto& n : tree.nodes) {
    if (n.parent >= 0) has_child[static_cast<std::size_t>(n.parent)] = true;
  }
  std::vector<Chain> chains;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (has_child[i]) continue;
    Chain path;
    for (int cur = static_cast<int>(i); cur >= 0; cur = tree.nodes[cur].parent) {
      path.push_back(tree.nodes[cur].domain);
    }
    path.push_back(tree.root);
    std::reverse(path.begin(), path.end());
    chains.push_back(std::move(path));
  }
  return chains;
}

inline int max_level(const InclusionTree& tree) {
  int m = 0;
  for (const auto& n : tree.nodes) m = std::max(m, n.level);
  return m;
}

inline std::vector<ThirdPartyOccurrence> third_party_occurrences(const InclusionTree& tree) {
  std::vector<ThirdPartyOccurrence> out;
  out.reserve(tree.nodes.size());
  for (const auto& n : tree.nodes) out.push_back({n.domain, n.level});
  return out;
}

// Trackers present on the site at any level.
inline std::set<std::string> site_trackers(const InclusionTree& tree, Granularity g) {
  std::set<std::string> out;
  for (const auto& n : tree.nodes) out.insert(g == Granularity::full ? n.domain : n.etld1);
  return out;
}

struct Summary {
  double median = 0;  // lower median
  double mean = 0;
  double std = 0;  // population
};

inline Summary summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.median = values[(values.size() - 1) / 2];
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

struct CategoryStats {
  std::string category;
  std::size_t n_websites = 0;
  std::size_t total_requests = 0;        // third-party requests
  std::size_t total_unique_domains = 0;  // distinct third-party hosts in the category
  std::size_t total_unique_etld1 = 0;
  Summary requests_per_site;
  Summary domains_per_site;
  Summary etld1_per_site;
};

struct SiteView {
  const CrawlRecord* record = nullptr;
  const InclusionTree* tree = nullptr;
  std::string category;
};

inline constexpr std::string_view kAllSensitive = "All Sensitive";
inline constexpr std::string_view kOverall = "Overall";

namespace detail {

inline CategoryStats stats_for(const std::string& name, const std::vector<const SiteView*>& sites) {
  CategoryStats st;
  st.category = name;
  st.n_websites = sites.size();
  std::set<std::string> all_domains, all_etld1;
  std::vector<double> reqs, doms, etlds;
  for (const auto* site : sites) {
    std::set<std::string> domains, etld1s;
    std::size_t third = 0;
    for (const auto& a : site->tree->attributions) {
      if (a.dest < 0) continue;
      const auto& node = site->tree->nodes[static_cast<std::size_t>(a.dest)];
      ++third;
      domains.insert(node.domain);
      etld1s.insert(node.etld1);
    }
    st.total_requests += third;
    all_domains.insert(domains.begin(), domains.end());
    all_etld1.insert(etld1s.begin(), etld1s.end());
    reqs.push_back(static_cast<double>(third));
    doms.push_back(static_cast<double>(domains.size()));
    etlds.push_back(static_cast<double>(etld1s.size()));
  }
  st.total_unique_domains = all_domains.size();
  st.total_unique_etld1 = all_etld1.size();
  st.requests_per_site = summarize(std::move(reqs));
  st.domains_per_site = summarize(std::move(doms));
  st.etld1_per_site = summarize(std::move(etlds));
  return st;
}

}  // namespace detail

// Per-category third-party presence, categories in name order, followed by
// an "All Sensitive" row covering every category except `topk_label`.
inline std::vector<CategoryStats> category_stats(const std::vector<SiteView>& corpus,
                                                 const std::string& topk_label = "TopK") {
  std::map<std::string, std::vector<const SiteView*>> groups;
  std::vector<const SiteView*> sensitive;
  for (const auto& s : corpus) {
    if (!s.tree) throw std::invalid_argument("category_stats: site without inclusion tree");
    groups[s.category].push_back(&s);
    if (s.category != topk_label) sensitive.push_back(&s);
  }
  std::vector<CategoryStats> out;
  for (const auto& [name, sites] : groups) out.push_back(detail::stats_for(name, sites));
  if (!sensitive.empty()) out.push_back(detail::stats_for(std::string(kAllSensitive), sensitive));
  return out;
}

struct HopDistribution {
  std::string tracker;
  std::size_t n_sites = 0;
  std::size_t sites_with_tracker = 0;
  double coverage_percent = 0;
  std::size_t occurrences = 0;
  std::map<int, double> percent_by_hops;  // 0 hops = direct inclusion
};

// Coverage of `tracker` over the trees and the share of its node occurrences
// at each hop count (level - 1).
inline HopDistribution hop_distribution(const std::vector<const InclusionTree*>& corpus,
                                        const std::string& tracker,
                                        Granularity g = Granularity::etld1) {
  if (corpus.empty()) throw std::invalid_argument("hop_distribution: empty corpus");
  HopDistribution h;
  h.tracker = tracker;
  h.n_sites = corpus.size();
  std::map<int, std::size_t> counts;
  for (const auto* tree : corpus) {
    bool seen = false;
    for (const auto& n : tree->nodes) {
      if ((g == Granularity::full ? n.domain : n.etld1) != tracker) continue;
      seen = true;
      ++counts[n.level - 1];
      ++h.occurrences;
    }
    h.sites_with_tracker += seen ? 1 : 0;
  }
  h.coverage_percent = 100.0 * static_cast<double>(h.sites_with_tracker) / static_cast<double>(h.n_sites);
  for (const auto& [hops, c] : counts) {
    h.percent_by_hops[hops] = 100.0 * static_cast<double>(c) / static_cast<double>(h.occurrences);
  }
  return h;
}

}  // namespace sensitrack
