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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sensitrack/chains.hpp"
#include "sensitrack/csv.hpp"
#include "sensitrack/error.hpp"
#include "sensitrack/textprep.hpp"

namespace sensitrack {

enum class SourceMode { C, M, TPD, TPD_LVL, M_plus_C, M_plus_C_plus_TPD, M_plus_C_plus_TPD_LVL };

inline constexpr std::array<std::string_view, 7> kSourceModeNames = {
    "C", "M", "TPD", "TPD_LVL", "M_plus_C", "M_plus_C_plus_TPD", "M_plus_C_plus_TPD_LVL"};

inline std::string_view to_string(SourceMode m) { return kSourceModeNames[static_cast<std::size_t>(m)]; }

inline std::optional<SourceMode> parse_source_mode(std::string_view s) {
  for (std::size_t i = 0; i < kSourceModeNames.size(); ++i) {
    if (kSourceModeNames[i] == s) return static_cast<SourceMode>(i);
  }
  return std::nullopt;
}

inline bool uses_content(SourceMode m) {
  return m == SourceMode::C || m == SourceMode::M_plus_C || m == SourceMode::M_plus_C_plus_TPD ||
         m == SourceMode::M_plus_C_plus_TPD_LVL;
}
inline bool uses_meta(SourceMode m) { return m != SourceMode::C && m != SourceMode::TPD && m != SourceMode::TPD_LVL; }
inline bool uses_third_parties(SourceMode m) {
  return m == SourceMode::TPD || m == SourceMode::TPD_LVL || m == SourceMode::M_plus_C_plus_TPD ||
         m == SourceMode::M_plus_C_plus_TPD_LVL;
}
inline bool uses_levels(SourceMode m) {
  return m == SourceMode::TPD_LVL || m == SourceMode::M_plus_C_plus_TPD_LVL;
}

// Term list of a document for the given input-source combination: meta
// tokens, then content tokens, then third-party terms. Third-party terms are
// exact hostnames, suffixed "-<level>" in the level-aware modes.
inline std::vector<std::string> doc_terms(const Document& doc,
                                          const std::vector<ThirdPartyOccurrence>& third_parties,
                                          SourceMode mode) {
  std::vector<std::string> terms;
  if (uses_meta(mode)) terms.insert(terms.end(), doc.meta_tokens.begin(), doc.meta_tokens.end());
  if (uses_content(mode)) terms.insert(terms.end(), doc.content_tokens.begin(), doc.content_tokens.end());
  if (uses_third_parties(mode)) {
    for (const auto& occ : third_parties) {
      terms.push_back(uses_levels(mode) ? occ.domain + "-" + std::to_string(occ.level) : occ.domain);
    }
  }
  return terms;
}

inline std::vector<std::string> doc_terms(const Document& doc, SourceMode mode) {
  return doc_terms(doc, doc.third_parties, mode);
}

inline std::vector<std::string> doc_terms(const Document& doc, const CrawlRecord& record,
                                          SourceMode mode, const PublicSuffixList& psl) {
  if (!uses_third_parties(mode)) return doc_terms(doc, {}, mode);
  if (record.requests.empty()) {
    throw DataError("mode " + std::string(to_string(mode)) + " needs the request log of " +
                    record.page_url);
  }
  return doc_terms(doc, third_party_occurrences(build_inclusion_tree(record, psl)), mode);
}

struct Vocabulary {
  std::vector<std::string> terms;  // index = feature id
  std::vector<std::size_t> df;     // document frequency on the fitting corpus
  std::size_t k = 0;
  SourceMode mode = SourceMode::M_plus_C;

  static Vocabulary from_terms(std::vector<std::string> terms, SourceMode mode,
                               std::vector<std::size_t> df = {}) {
    Vocabulary v;
    v.terms = std::move(terms);
    v.df = std::move(df);
    v.df.resize(v.terms.size(), 0);
    v.k = v.terms.size();
    v.mode = mode;
    v.rebuild_index();
    return v;
  }

  // Must be called after `terms` changes; lookups read the index only, so a
  // finished vocabulary is safe to share between threads.
  void rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < terms.size(); ++i) index_.emplace(terms[i], i);
  }

  std::optional<std::size_t> id(const std::string& term) const {
    const auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // FNV-1a over the mode name and the ordered terms.
  std::string hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&](std::string_view s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
      }
      h ^= 0x0A;
      h *= 1099511628211ULL;
    };
    feed(to_string(mode));
    for (const auto& t : terms) feed(t);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps the k terms with the highest document frequency, ordered by
// descending df and then lexicographically. k shrinks to the number of
// distinct terms when the corpus has fewer.
inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus, std::size_t k,
                                   SourceMode mode) {
  if (corpus.empty()) throw std::invalid_argument("build_vocabulary: empty corpus");
  if (k < 1) throw std::invalid_argument("build_vocabulary: k must be >= 1");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::unordered_set<std::string_view> seen(doc.begin(), doc.end());
    for (auto t : seen) ++df[std::string(t)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  for (auto& [term, count] : ranked) {
    terms.push_back(term);
    counts.push_back(count);
  }
  return Vocabulary::from_terms(std::move(terms), mode, std::move(counts));
}

struct SparseEntry {
  std::size_t id = 0;
  double weight = 0;

  bool operator==(const SparseEntry&) const = default;
};

// Entries sorted by strictly increasing id, all weights positive.
struct SparseVector {
  std::vector<SparseEntry> entries;

  double sum() const {
    double s = 0;
    for (const auto& e : entries) s += e.weight;
    return s;
  }
  bool empty() const { return entries.empty(); }
  bool operator==(const SparseVector&) const = default;
};

inline SparseVector vectorize_bow(const std::vector<std::string>& terms, const Vocabulary& vocab) {
  std::map<std::size_t, double> counts;
  for (const auto& t : terms) {
    if (const auto id = vocab.id(t)) counts[*id] += 1.0;
  }
  SparseVector v;
  v.entries.reserve(counts.size());
  for (const auto& [id, c] : counts) v.entries.push_back({id, c});
  return v;
}

struct IdfTable {
  std::vector<double> idf;
  std::size_t n_docs = 0;
};

// Smoothed inverse document frequency: ln((1 + N) / (1 + df)) + 1.
inline IdfTable fit_idf(const std::vector<SparseVector>& corpus, const Vocabulary& vocab) {
  if (corpus.empty()) throw std::invalid_argument("fit_idf: empty corpus");
  std::vector<std::size_t> df(vocab.k, 0);
  for (const auto& v : corpus) {
    for (const auto& e : v.entries) {
      if (e.id >= vocab.k) throw std::invalid_argument("fit_idf: feature id outside vocabulary");
      if (e.weight > 0) ++df[e.id];
    }
  }
  IdfTable t;
  t.n_docs = corpus.size();
  t.idf.resize(vocab.k);
  const double n = static_cast<double>(t.n_docs);
  for (std::size_t i = 0; i < vocab.k; ++i) {
    t.idf[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  }
  return t;
}

// Raw count times idf, then L2-normalized.
inline SparseVector vectorize_tfidf(const SparseVector& bow, const IdfTable& idf) {
  SparseVector out;
  double norm2 = 0;
  for (const auto& e : bow.entries) {
    if (e.id >= idf.idf.size()) throw std::invalid_argument("vectorize_tfidf: dimension mismatch");
    const double w = e.weight * idf.idf[e.id];
    if (w > 0) {
      out.entries.push_back({e.id, w});
      norm2 += w * w;
    }
  }
  if (norm2 == 0) return {};
  const double norm = std::sqrt(norm2);
  for (auto& e : out.entries) e.weight /= norm;
  return out;
}

// "index<TAB>term<TAB>df" lines after one '#' header naming the mode.
inline void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  out << "# mode=" << to_string(vocab.mode) << " k=" << vocab.k << '\n';
  for (std::size_t i = 0; i < vocab.terms.size(); ++i) {
    out << i << '\t' << vocab.terms[i] << '\t' << (i < vocab.df.size() ? vocab.df[i] : 0) << '\n';
  }
}

inline Vocabulary read_vocabulary(std::istream& in) {
  Vocabulary v;
  std::vector<std::size_t> df;
  std::string line;
  bool have_mode = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto p = line.find("mode=");
      if (p != std::string::npos) {
        const auto mode = parse_source_mode(line.substr(p + 5, line.find(' ', p) - p - 5));
        if (!mode) throw DataError("vocabulary header names an unknown mode");
        v.mode = *mode;
        have_mode = true;
      }
      continue;
    }
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) throw DataError("malformed vocabulary line: " + line);
    if (std::stoull(line.substr(0, t1)) != v.terms.size()) throw DataError("vocabulary indices out of order");
    v.terms.push_back(line.substr(t1 + 1, t2 - t1 - 1));
    df.push_back(std::stoull(line.substr(t2 + 1)));
  }
  if (!have_mode) throw DataError("vocabulary file lacks its '# mode=' header");
  return Vocabulary::from_terms(std::move(v.terms), v.mode, std::move(df));
}

inline void write_idf(std::ostream& out, const IdfTable& t, const Vocabulary& vocab) {
  CsvWriter csv(out);
  csv.header({"index", "term", "idf", "n_docs"});
  for (std::size_t i = 0; i < t.idf.size(); ++i) {
    csv.write({csv_int(i), i < vocab.terms.size() ? vocab.terms[i] : std::string(), t.idf[i], csv_int(t.n_docs)});
  }
}

inline IdfTable read_idf(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty()) throw DataError("idf table is empty");
  IdfTable t;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 4) throw DataError("idf row " + std::to_string(r) + " has wrong arity");
    if (std::stoull(rows[r][0]) != t.idf.size()) throw DataError("idf indices out of order");
    t.idf.push_back(parse_double(rows[r][2]));
    t.n_docs = std::stoull(rows[r][3]);
  }
  return t;
}

}  // namespace sensitrack
