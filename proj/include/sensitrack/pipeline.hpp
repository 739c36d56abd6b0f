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
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensitrack/chains.hpp"
#include "sensitrack/classifier.hpp"
#include "sensitrack/config.hpp"
#include "sensitrack/coverage.hpp"
#include "sensitrack/crawl_record.hpp"
#include "sensitrack/csv.hpp"
#include "sensitrack/csync.hpp"
#include "sensitrack/error.hpp"
#include "sensitrack/features.hpp"
#include "sensitrack/parallel.hpp"
#include "sensitrack/psl.hpp"
#include "sensitrack/textprep.hpp"

namespace sensitrack {

namespace fs = std::filesystem;

namespace detail {

inline std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw DataError("cannot write " + (dir / name).string());
  return out;
}

inline std::ifstream open_input(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  return in;
}

inline std::string dump_line(const nlohmann::ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline std::vector<CrawlRecord> load_records(const fs::path& file) {
  auto in = open_input(file);
  auto parsed = parse_crawl_records(in);
  if (!parsed.errors.empty()) {
    const auto& e = parsed.errors.front();
    throw DataError(file.string() + ":" + std::to_string(e.line) + ": " + e.reason);
  }
  for (std::size_t i = 0; i < parsed.records.size(); ++i) {
    const auto v = validate_record(parsed.records[i]);
    if (!v.empty()) {
      throw DataError(file.string() + ": record " + std::to_string(i + 1) + ": " + v.front().field + ": " +
                      v.front().message);
    }
  }
  return std::move(parsed.records);
}

// The capture harness marks a page it gave up on with an empty record
// carrying the last error status.
inline bool is_give_up_marker(const CrawlRecord& r) {
  return r.html.empty() && r.requests.empty() && r.fetch_status >= 400;
}

inline bool discarded(const CrawlRecord& r) { return should_discard(r, is_give_up_marker(r)); }

inline PublicSuffixList load_psl(const PipelineConfig& cfg) { return PublicSuffixList::load(cfg.psl.string()); }

}  // namespace detail

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessSummary {
  std::size_t n_records = 0;
  std::size_t n_documents = 0;
  std::map<RejectReason, std::size_t> rejected{
      {RejectReason::non_english, 0}, {RejectReason::too_short, 0}, {RejectReason::discarded_fetch, 0}};
};

// documents.jsonl holds accepted documents only; rejections.csv counts the
// rest by reason.
inline PreprocessSummary cmd_preprocess(const fs::path& input, const PipelineConfig& cfg, const fs::path& out_dir,
                                        std::size_t threads = 1) {
  const auto records = detail::load_records(input);
  const auto psl = detail::load_psl(cfg);
  PrepConfig prep;
  prep.stopwords = load_stopwords(cfg.stopwords.string());
  prep.min_tokens = cfg.min_tokens;
  prep.english_stopword_ratio_threshold = cfg.english_threshold;

  const auto docs = parallel_map(
      records,
      [&](const CrawlRecord& r) {
        if (detail::discarded(r)) {
          Document d;
          d.source_url = r.page_url;
          d.category_label = r.category_label;
          d.rejected_reason = RejectReason::discarded_fetch;
          return d;
        }
        auto d = preprocess(r, prep);
        if (!d.rejected_reason) d.third_parties = third_party_occurrences(build_inclusion_tree(r, psl));
        return d;
      },
      threads);

  PreprocessSummary summary;
  summary.n_records = records.size();
  auto out = detail::open_output(out_dir, "documents.jsonl");
  for (const auto& d : docs) {
    if (d.rejected_reason) {
      ++summary.rejected[*d.rejected_reason];
      continue;
    }
    out << serialize_document(d) << '\n';
    ++summary.n_documents;
  }

  auto rej = detail::open_output(out_dir, "rejections.csv");
  CsvWriter csv(rej);
  csv.header({"reason", "count"});
  for (const auto& [reason, n] : summary.rejected) csv.write({std::string(to_string(reason)), csv_int(n)});
  return summary;
}

// ---------------------------------------------------------------------------
// train

struct TrainSummary {
  Evaluation evaluation;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  std::size_t k_requested = 0;
  std::size_t k_effective = 0;
  std::size_t skipped = 0;  // unlabeled or unmapped documents
  double feature_seconds = 0;
  double training_seconds = 0;
};

namespace detail {

struct LabeledDoc {
  const Document* doc = nullptr;
  std::string label;
};

inline SparseVector featurize(const Document& doc, const Vocabulary& vocab, const std::optional<IdfTable>& idf) {
  auto v = vectorize_bow(doc_terms(doc, vocab.mode), vocab);
  return idf ? vectorize_tfidf(v, *idf) : v;
}

}  // namespace detail

// Writes model.json, vocab.tsv, idf.csv (tfidf only), evaluation.json,
// confusion_matrix.csv, top_features.csv, threshold_sweep.csv and
// timing.csv. Only timing.csv depends on the clock.
inline TrainSummary cmd_train(const fs::path& documents, const PipelineConfig& cfg, const fs::path& out_dir,
                              std::size_t threads = 1) {
  using Clock = std::chrono::steady_clock;
  auto in = detail::open_input(documents);
  const auto docs = read_documents(in);

  TrainSummary s;
  std::vector<detail::LabeledDoc> labeled;
  for (const auto& d : docs) {
    std::optional<std::string> cat;
    if (!d.rejected_reason && d.category_label) cat = cfg.category_of(*d.category_label);
    if (!cat) {
      ++s.skipped;
      continue;
    }
    labeled.push_back({&d, *cat});
  }
  std::set<std::string> classes;
  for (const auto& l : labeled) classes.insert(l.label);
  if (classes.size() < 2) throw DataError("training needs labeled documents for at least two categories");

  const auto label_of = [](const detail::LabeledDoc& l) -> const std::string& { return l.label; };
  const auto balanced = balance_classes(labeled, label_of, derive_seed(cfg.seed, 1));
  const auto [train_set, validation_set] =
      split_train_validation(balanced, label_of, cfg.split_ratio, derive_seed(cfg.seed, 2));
  std::set<std::string> train_classes;
  for (const auto& l : train_set) train_classes.insert(l.label);
  for (const auto& c : classes) {
    if (!train_classes.count(c)) throw DataError("category '" + c + "' has no training documents after the split");
  }
  if (validation_set.empty()) throw DataError("validation split is empty");
  s.n_train = train_set.size();
  s.n_validation = validation_set.size();

  const auto t0 = Clock::now();
  const auto train_terms =
      parallel_map(train_set, [&](const detail::LabeledDoc& l) { return doc_terms(*l.doc, cfg.mode); }, threads);
  const auto vocab = build_vocabulary(train_terms, cfg.k, cfg.mode);
  s.k_requested = cfg.k;
  s.k_effective = vocab.k;
  auto train_vectors = parallel_map(
      train_terms, [&](const std::vector<std::string>& t) { return vectorize_bow(t, vocab); }, threads);
  std::optional<IdfTable> idf;
  if (cfg.weighting == Weighting::tfidf) {
    idf = fit_idf(train_vectors, vocab);
    train_vectors = parallel_map(train_vectors, [&](const SparseVector& v) { return vectorize_tfidf(v, *idf); }, threads);
  }
  const auto validation_vectors = parallel_map(
      validation_set, [&](const detail::LabeledDoc& l) { return detail::featurize(*l.doc, vocab, idf); }, threads);
  const auto t1 = Clock::now();

  std::vector<std::string> train_labels, validation_labels;
  for (const auto& l : train_set) train_labels.push_back(l.label);
  for (const auto& l : validation_set) validation_labels.push_back(l.label);
  auto model = train(train_vectors, train_labels, vocab.k, cfg.alpha);
  model.vocab_hash = vocab.hash();
  model.mode = cfg.mode;
  model.weighting = cfg.weighting;
  const auto t2 = Clock::now();

  s.evaluation = evaluate(model, validation_vectors, validation_labels);
  s.feature_seconds = std::chrono::duration<double>(t1 - t0).count();
  s.training_seconds = std::chrono::duration<double>(t2 - t1).count();

  {
    auto out = detail::open_output(out_dir, "model.json");
    out << to_json(model).dump(1, ' ') << '\n';
  }
  {
    auto out = detail::open_output(out_dir, "vocab.tsv");
    write_vocabulary(out, vocab);
  }
  if (idf) {
    auto out = detail::open_output(out_dir, "idf.csv");
    write_idf(out, *idf, vocab);
  }
  {
    nlohmann::ordered_json j;
    j["classes"] = model.classes;
    j["mode"] = std::string(to_string(cfg.mode));
    j["weighting"] = std::string(to_string(cfg.weighting));
    j["seed"] = cfg.seed;
    j["n_train"] = s.n_train;
    j["n_validation"] = s.n_validation;
    j["skipped_documents"] = s.skipped;
    j["k_requested"] = s.k_requested;
    j["k_effective"] = s.k_effective;
    j["k_reduced"] = s.k_effective < s.k_requested;
    j["accuracy"] = round12(s.evaluation.accuracy);
    nlohmann::ordered_json per_class;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
      per_class[model.classes[c]] = round12(s.evaluation.per_class_accuracy[c]);
    }
    j["per_class_accuracy"] = per_class;
    auto out = detail::open_output(out_dir, "evaluation.json");
    out << j.dump(1, ' ') << '\n';
  }
  {
    auto out = detail::open_output(out_dir, "confusion_matrix.csv");
    CsvWriter csv(out);
    csv.header({"actual", "predicted", "count", "row_percent"});
    const auto& cm = s.evaluation.confusion;
    for (std::size_t r = 0; r < cm.classes.size(); ++r) {
      for (std::size_t c = 0; c < cm.classes.size(); ++c) {
        csv.write({cm.classes[r], cm.classes[c], csv_int(cm.counts[r][c]), cm.row_percent[r][c]});
      }
    }
  }
  {
    auto out = detail::open_output(out_dir, "top_features.csv");
    CsvWriter csv(out);
    csv.header({"category", "rank", "term", "score"});
    const auto top = top_features(model, vocab, std::min(cfg.top_features, vocab.k));
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
      for (std::size_t r = 0; r < top[c].size(); ++r) {
        csv.write({model.classes[c], csv_int(r + 1), top[c][r].term, top[c][r].score});
      }
    }
  }
  {
    std::vector<std::pair<Prediction, bool>> preds;
    for (std::size_t i = 0; i < validation_vectors.size(); ++i) {
      auto p = predict_proba(model, validation_vectors[i]);
      const bool ok = p.predicted_class == validation_labels[i];
      preds.emplace_back(std::move(p), ok);
    }
    auto out = detail::open_output(out_dir, "threshold_sweep.csv");
    CsvWriter csv(out);
    csv.header({"threshold", "accepted", "true_accepted", "true_positive_rate", "retained"});
    for (const auto& pt : threshold_sweep(preds, threshold_grid(cfg.threshold_steps))) {
      csv.write({pt.threshold, csv_int(pt.accepted), csv_int(pt.true_accepted), pt.true_positive_rate, pt.retained});
    }
  }
  {
    auto out = detail::open_output(out_dir, "timing.csv");
    CsvWriter csv(out);
    csv.header({"phase", "seconds", "n_documents", "k"});
    csv.write({std::string("feature_engineering"), s.feature_seconds, csv_int(s.n_train + s.n_validation),
               csv_int(vocab.k)});
    csv.write({std::string("training"), s.training_seconds, csv_int(s.n_train), csv_int(vocab.k)});
  }
  return s;
}

// ---------------------------------------------------------------------------
// classify

struct PredictionRecord {
  std::string source_url;
  Prediction prediction;
  std::optional<std::string> label;
};

inline nlohmann::ordered_json to_json(const PredictionRecord& r, const NBModel& model) {
  nlohmann::ordered_json j;
  j["source_url"] = r.source_url;
  j["label"] = r.label ? nlohmann::ordered_json(*r.label) : nlohmann::ordered_json(nullptr);
  j["predicted_class"] = r.prediction.predicted_class;
  j["p_max"] = round12(r.prediction.p_max);
  nlohmann::ordered_json probs;
  for (std::size_t c = 0; c < model.classes.size(); ++c) probs[model.classes[c]] = round12(r.prediction.probabilities[c]);
  j["probabilities"] = probs;
  return j;
}

// Loads model.json and its sibling vocab.tsv (and idf.csv for tfidf
// models). A vocabulary whose hash differs from the model's is rejected.
struct LoadedModel {
  NBModel model;
  Vocabulary vocab;
  std::optional<IdfTable> idf;
};

inline LoadedModel load_model(const fs::path& model_file) {
  LoadedModel m;
  {
    auto in = detail::open_input(model_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(model_file.string() + ": " + e.what());
    }
    m.model = model_from_json(j);
  }
  const auto dir = model_file.parent_path();
  {
    auto in = detail::open_input(dir / "vocab.tsv");
    m.vocab = read_vocabulary(in);
  }
  if (m.vocab.hash() != m.model.vocab_hash) {
    throw DataError("vocabulary hash mismatch: model expects " + m.model.vocab_hash + ", vocab.tsv is " +
                    m.vocab.hash());
  }
  if (m.vocab.k != m.model.n_features()) throw DataError("vocabulary size differs from the model");
  if (m.model.weighting == Weighting::tfidf) {
    auto in = detail::open_input(dir / "idf.csv");
    m.idf = read_idf(in);
    if (m.idf->idf.size() != m.vocab.k) throw DataError("idf table size differs from the vocabulary");
  }
  return m;
}

inline std::vector<PredictionRecord> cmd_classify(const fs::path& documents, const fs::path& model_file,
                                                  double threshold, const fs::path& out_dir,
                                                  std::size_t threads = 1) {
  if (!(threshold >= 0 && threshold <= 1)) throw ConfigError("threshold must be in [0, 1]");
  const auto m = load_model(model_file);
  auto in = detail::open_input(documents);
  auto docs = read_documents(in);
  docs.erase(std::remove_if(docs.begin(), docs.end(), [](const Document& d) { return d.rejected_reason.has_value(); }),
             docs.end());

  const auto out = parallel_map(
      docs,
      [&](const Document& d) {
        PredictionRecord r;
        r.source_url = d.source_url;
        r.prediction = predict_proba(m.model, detail::featurize(d, m.vocab, m.idf));
        r.label = classify_unlabeled(r.prediction, threshold);
        return r;
      },
      threads);
  auto file = detail::open_output(out_dir, "predictions.jsonl");
  for (const auto& r : out) file << detail::dump_line(to_json(r, m.model)) << '\n';
  return out;
}

// source_url -> accepted label (null labels are skipped).
inline std::unordered_map<std::string, std::string> read_prediction_labels(const fs::path& file) {
  std::unordered_map<std::string, std::string> out;
  auto in = detail::open_input(file);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(file.string() + ":" + std::to_string(n) + ": " + e.what());
    }
    if (!j.is_object()) throw DataError(file.string() + ":" + std::to_string(n) + ": not an object");
    const auto url = detail::require_string(j, "source_url");
    if (const auto label = detail::optional_string(j, "label")) out[url] = *label;
  }
  return out;
}

// ---------------------------------------------------------------------------
// audit

struct AuditSummary {
  std::size_t n_records = 0;
  std::size_t n_discarded = 0;
  std::size_t n_sites = 0;
  std::size_t unattributed_requests = 0;
  std::size_t n_events = 0;
};

namespace detail {

inline std::string join_chain(const Chain& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += " > ";
    s += c[i];
  }
  return s;
}

inline void write_summary_row(CsvWriter& csv, const CategoryStats& st) {
  csv.write({st.category, csv_int(st.n_websites), csv_int(st.total_requests), csv_int(st.total_unique_domains),
             csv_int(st.total_unique_etld1), st.requests_per_site.median, st.requests_per_site.mean,
             st.requests_per_site.std, st.domains_per_site.median, st.domains_per_site.mean, st.domains_per_site.std,
             st.etld1_per_site.median, st.etld1_per_site.mean, st.etld1_per_site.std});
}

}  // namespace detail

// Runs chains, coverage and csync over the crawl. A record's category comes
// from the predictions file when it labels the page, else from the record's
// own label through the category map, else from default_category.
inline AuditSummary cmd_audit(const fs::path& crawl, const std::optional<fs::path>& predictions,
                              const PipelineConfig& cfg, const fs::path& out_dir, std::size_t threads = 1) {
  auto records = detail::load_records(crawl);
  const auto psl = detail::load_psl(cfg);
  const auto keywords = load_keywords(cfg.keywords);
  const auto predicted =
      predictions ? read_prediction_labels(*predictions) : std::unordered_map<std::string, std::string>{};

  AuditSummary summary;
  summary.n_records = records.size();
  const auto kept_end = std::stable_partition(records.begin(), records.end(),
                                              [](const CrawlRecord& r) { return !detail::discarded(r); });
  summary.n_discarded = static_cast<std::size_t>(records.end() - kept_end);
  records.erase(kept_end, records.end());

  std::vector<std::string> categories;
  for (const auto& r : records) {
    std::optional<std::string> cat;
    if (const auto it = predicted.find(r.page_url); it != predicted.end()) cat = it->second;
    if (!cat && r.category_label) cat = cfg.category_of(*r.category_label);
    if (!cat) cat = cfg.default_category;
    if (!cat) throw DataError("no category assignment for " + r.page_url);
    categories.push_back(*cat);
  }

  const auto trees = parallel_map(records, [&](const CrawlRecord& r) { return build_inclusion_tree(r, psl); }, threads);
  std::vector<SiteView> views;
  for (std::size_t i = 0; i < records.size(); ++i) views.push_back({&records[i], &trees[i], categories[i]});
  summary.n_sites = views.size();
  for (const auto& t : trees) summary.unattributed_requests += t.unattributed;

  {
    auto out = detail::open_output(out_dir, "chain_stats.csv");
    CsvWriter csv(out);
    csv.header({"category", "n_websites", "total_requests", "total_unique_domains", "total_unique_etld1",
                "requests_median", "requests_mean", "requests_std", "domains_median", "domains_mean", "domains_std",
                "etld1_median", "etld1_mean", "etld1_std"});
    for (const auto& st : category_stats(views, cfg.topk_category)) detail::write_summary_row(csv, st);
  }
  {
    auto chains_out = detail::open_output(out_dir, "chains.csv");
    CsvWriter chains_csv(chains_out);
    chains_csv.header({"site", "category", "chain_id", "length", "chain"});
    auto levels_out = detail::open_output(out_dir, "tree_levels.csv");
    CsvWriter levels_csv(levels_out);
    levels_csv.header({"site", "category", "level", "nodes"});
    for (const auto& v : views) {
      const auto chains = enumerate_chains(*v.tree);
      for (std::size_t c = 0; c < chains.size(); ++c) {
        chains_csv.write({v.record->final_url, v.category, csv_int(c + 1), csv_int(chains[c].size() - 1),
                          detail::join_chain(chains[c])});
      }
      std::map<int, std::size_t> per_level;
      for (const auto& n : v.tree->nodes) ++per_level[n.level];
      for (const auto& [level, n] : per_level) {
        levels_csv.write({v.record->final_url, v.category, static_cast<std::int64_t>(level), csv_int(n)});
      }
    }
  }

  const PresenceIndex index(views, cfg.granularity);
  {
    std::vector<const InclusionTree*> tree_ptrs;
    for (const auto& t : trees) tree_ptrs.push_back(&t);
    std::map<std::string, std::size_t> site_counts;
    for (const auto& t : trees) {
      for (const auto& tracker : site_trackers(t, cfg.granularity)) ++site_counts[tracker];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(site_counts.begin(), site_counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > cfg.hop_top_n) ranked.resize(cfg.hop_top_n);
    auto out = detail::open_output(out_dir, "hop_distribution.csv");
    CsvWriter csv(out);
    csv.header({"rank", "tracker", "coverage_percent", "sites_with_tracker", "n_sites", "hops", "percent"});
    if (!tree_ptrs.empty()) {
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        const auto h = hop_distribution(tree_ptrs, ranked[r].first, cfg.granularity);
        for (const auto& [hops, pct] : h.percent_by_hops) {
          csv.write({csv_int(r + 1), h.tracker, h.coverage_percent, csv_int(h.sites_with_tracker), csv_int(h.n_sites),
                     static_cast<std::int64_t>(hops), pct});
        }
      }
    }
  }

  std::map<std::string, std::set<std::string>> niche_lists;
  {
    auto out = detail::open_output(out_dir, "niche.csv");
    CsvWriter csv(out);
    csv.header({"rank", "tracker", "category", "cat_percent", "other_percent", "q"});
    std::set<std::string> names(categories.begin(), categories.end());
    for (const auto& cat : names) {
      NicheFilterConfig nf{cfg.q_for(cat), cfg.top_n, cfg.granularity};
      const auto entries = niche_trackers(index, cat, nf);
      auto& list = niche_lists[cat];
      for (std::size_t r = 0; r < entries.size(); ++r) {
        const auto& e = entries[r];
        csv.write({csv_int(r + 1), e.tracker, e.category, e.cat_percent, e.other_percent, nf.q});
        list.insert(cfg.granularity == Granularity::full ? psl.etld1(e.tracker) : e.tracker);
      }
    }
  }

  const auto events = parallel_map(
      views, [&](const SiteView& v) { return detect_csync(*v.record, *v.tree, keywords, cfg.obfuscation); }, threads);
  std::vector<CSyncSite> csync_sites;
  for (std::size_t i = 0; i < views.size(); ++i) {
    csync_sites.push_back({views[i].category, trees[i].root, records[i].requests.size(), events[i]});
    summary.n_events += events[i].size();
  }
  {
    auto out = detail::open_output(out_dir, "csync_events.jsonl");
    for (const auto& e : events) write_events(out, e);
  }
  {
    auto out = detail::open_output(out_dir, "csync_stats.csv");
    CsvWriter csv(out);
    csv.header({"category", "n_websites", "n_domains", "n_websites_with_csync", "pct_websites_with_csync",
                "n_requests", "n_csync_requests", "pct_csync_requests", "n_unique_pairs", "n_niche_pairs",
                "pct_niche_pairs"});
    for (const auto& st : csync_stats(csync_sites, niche_lists, cfg.topk_category)) {
      csv.write({st.category, csv_int(st.n_websites), csv_int(st.n_domains), csv_int(st.n_websites_with_csync),
                 st.pct_websites_with_csync, csv_int(st.n_requests), csv_int(st.n_csync_requests),
                 st.pct_csync_requests, csv_int(st.n_unique_pairs), csv_int(st.n_niche_pairs), st.pct_niche_pairs});
    }
  }
  {
    nlohmann::ordered_json j;
    j["n_records"] = summary.n_records;
    j["n_discarded"] = summary.n_discarded;
    j["n_sites"] = summary.n_sites;
    j["unattributed_requests"] = summary.unattributed_requests;
    j["n_csync_events"] = summary.n_events;
    auto out = detail::open_output(out_dir, "audit_summary.json");
    out << j.dump(1, ' ') << '\n';
  }
  return summary;
}

// ---------------------------------------------------------------------------
// report

namespace detail {

inline void print_table(std::ostream& os, const std::vector<std::vector<std::string>>& rows, std::size_t max_rows) {
  if (rows.empty()) return;
  std::vector<std::size_t> width;
  const auto shown = std::min(rows.size(), max_rows + 1);
  for (std::size_t r = 0; r < shown; ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], rows[r][c].size());
    }
  }
  for (std::size_t r = 0; r < shown; ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      os << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << rows[r][c];
    }
    os << '\n';
  }
  if (rows.size() > shown) os << "... " << rows.size() - shown << " more rows\n";
}

}  // namespace detail

// Prints every known table found in an output directory. Returns the number
// of tables printed.
inline std::size_t cmd_report(const fs::path& dir, std::ostream& os, std::size_t max_rows = 25) {
  static const std::vector<std::pair<std::string, std::string>> kTables = {
      {"rejections.csv", "Preprocessing rejections"},
      {"confusion_matrix.csv", "Confusion matrix"},
      {"top_features.csv", "Top features per category"},
      {"threshold_sweep.csv", "Validation threshold sweep"},
      {"timing.csv", "Timing"},
      {"chain_stats.csv", "Third-party presence per category"},
      {"tree_levels.csv", "Inclusion tree nodes per level"},
      {"hop_distribution.csv", "Top trackers by coverage and hop distance"},
      {"niche.csv", "Niche trackers per category"},
      {"csync_stats.csv", "Cookie synchronization"},
  };
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::size_t printed = 0;
  for (const auto& name : {std::string("evaluation.json"), std::string("audit_summary.json")}) {
    if (!fs::is_regular_file(dir / name)) continue;
    auto in = detail::open_input(dir / name);
    os << "== " << name << " ==\n" << in.rdbuf() << '\n';
    ++printed;
  }
  for (const auto& [file, title] : kTables) {
    if (!fs::is_regular_file(dir / file)) continue;
    auto in = detail::open_input(dir / file);
    os << "== " << title << " (" << file << ") ==\n";
    detail::print_table(os, read_csv(in), max_rows);
    os << '\n';
    ++printed;
  }
  if (printed == 0) throw DataError("no report files in " + dir.string());
  return printed;
}

}  // namespace sensitrack
