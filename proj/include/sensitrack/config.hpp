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

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sensitrack/chains.hpp"
#include "sensitrack/classifier.hpp"
#include "sensitrack/csync.hpp"
#include "sensitrack/error.hpp"
#include "sensitrack/features.hpp"

namespace sensitrack {

// Every tunable of the pipeline. Loaded from a "key = value" file; see
// docs/config.md for the key reference.
struct PipelineConfig {
  // Category name -> raw labels that map to it. A label equal to a category
  // name always maps to that category.
  std::map<std::string, std::set<std::string>> categories;
  std::string topk_category = "TopK";
  std::optional<std::string> default_category;

  SourceMode mode = SourceMode::M_plus_C;
  Weighting weighting = Weighting::tfidf;
  std::size_t k = 3000;
  double alpha = 1.0;
  double split_ratio = 0.7;
  std::uint64_t seed = 1;
  double threshold = 0.63;
  int threshold_steps = 100;
  std::size_t top_features = 10;

  std::map<std::string, double> q;
  double q_default = 1.0;
  std::size_t top_n = 10;
  std::size_t hop_top_n = 20;
  Granularity granularity = Granularity::etld1;
  ObfuscationRule obfuscation;

  std::size_t min_tokens = 5;
  double english_threshold = 0.02;

  std::filesystem::path stopwords;
  std::filesystem::path keywords;
  std::filesystem::path psl;

  double q_for(const std::string& category) const {
    const auto it = q.find(category);
    return it == q.end() ? q_default : it->second;
  }

  // Maps a raw label to its category, if any.
  std::optional<std::string> category_of(const std::string& label) const {
    if (categories.empty() || categories.count(label)) return label;
    for (const auto& [name, labels] : categories) {
      if (labels.count(label)) return name;
    }
    return std::nullopt;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (auto t = trim(cur); !t.empty()) out.push_back(std::move(t));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (auto t = trim(cur); !t.empty()) out.push_back(std::move(t));
  return out;
}

inline double config_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d)) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
  }
  return d;
}

inline std::uint64_t config_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::out_of_range&) {
    throw ConfigError("config key '" + key + "' is out of range");
  }
}

}  // namespace detail

// Applies one "key = value" setting. Relative paths resolve against `base`.
inline void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value,
                          const std::filesystem::path& base = {}) {
  using namespace detail;
  auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() || base.empty() ? p : base / p;
  };
  if (key.rfind("category.", 0) == 0) {
    const auto name = key.substr(9);
    if (name.empty()) throw ConfigError("empty category name in key '" + key + "'");
    auto& labels = c.categories[name];
    for (auto& l : split_list(value)) labels.insert(std::move(l));
  } else if (key.rfind("q.", 0) == 0) {
    const double q = config_real(key, value);
    if (q < 0 || q > 100) throw ConfigError("config key '" + key + "' must be within [0, 100]");
    c.q[key.substr(2)] = q;
  } else if (key == "topk_category") {
    c.topk_category = value;
  } else if (key == "default_category") {
    c.default_category = value.empty() ? std::nullopt : std::optional<std::string>(value);
  } else if (key == "mode") {
    const auto m = parse_source_mode(value);
    if (!m) throw ConfigError("unknown feature mode '" + value + "'");
    c.mode = *m;
  } else if (key == "weighting") {
    const auto w = parse_weighting(value);
    if (!w) throw ConfigError("unknown weighting '" + value + "' (bow or tfidf)");
    c.weighting = *w;
  } else if (key == "k") {
    c.k = config_uint(key, value);
    if (c.k < 1) throw ConfigError("k must be >= 1");
  } else if (key == "alpha") {
    c.alpha = config_real(key, value);
    if (!(c.alpha > 0)) throw ConfigError("alpha must be > 0");
  } else if (key == "split_ratio") {
    c.split_ratio = config_real(key, value);
    if (!(c.split_ratio > 0 && c.split_ratio < 1)) throw ConfigError("split_ratio must be in (0, 1)");
  } else if (key == "seed") {
    c.seed = config_uint(key, value);
  } else if (key == "threshold") {
    c.threshold = config_real(key, value);
    if (!(c.threshold >= 0 && c.threshold <= 1)) throw ConfigError("threshold must be in [0, 1]");
  } else if (key == "threshold_steps") {
    c.threshold_steps = static_cast<int>(config_uint(key, value));
    if (c.threshold_steps < 1 || c.threshold_steps > 100000) throw ConfigError("threshold_steps out of range");
  } else if (key == "top_features") {
    c.top_features = config_uint(key, value);
    if (c.top_features < 1) throw ConfigError("top_features must be >= 1");
  } else if (key == "q_default") {
    c.q_default = config_real(key, value);
    if (c.q_default < 0 || c.q_default > 100) throw ConfigError("q_default must be within [0, 100]");
  } else if (key == "top_n") {
    c.top_n = config_uint(key, value);
    if (c.top_n < 1) throw ConfigError("top_n must be >= 1");
  } else if (key == "hop_top_n") {
    c.hop_top_n = config_uint(key, value);
  } else if (key == "granularity") {
    const auto g = parse_granularity(value);
    if (!g) throw ConfigError("unknown granularity '" + value + "' (full or etld1)");
    c.granularity = *g;
  } else if (key == "obfuscation_min_length") {
    c.obfuscation.min_length = config_uint(key, value);
  } else if (key == "obfuscation_min_entropy") {
    c.obfuscation.min_entropy = config_real(key, value);
  } else if (key == "min_tokens") {
    c.min_tokens = config_uint(key, value);
  } else if (key == "english_threshold") {
    c.english_threshold = config_real(key, value);
    if (c.english_threshold < 0 || c.english_threshold > 1) throw ConfigError("english_threshold must be in [0, 1]");
  } else if (key == "stopwords") {
    c.stopwords = path(value);
  } else if (key == "keywords") {
    c.keywords = path(value);
  } else if (key == "psl") {
    c.psl = path(value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

// Defaults point the three data files at `data_dir`.
inline PipelineConfig default_config(const std::filesystem::path& data_dir) {
  PipelineConfig c;
  c.stopwords = data_dir / "stopwords_en.txt";
  c.keywords = data_dir / "csync_keywords.txt";
  c.psl = data_dir / "public_suffix_list.dat";
  return c;
}

inline void parse_config(PipelineConfig& c, std::istream& in, const std::filesystem::path& base = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = detail::trim(std::string_view(text).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    apply_setting(c, key, detail::trim(std::string_view(text).substr(eq + 1)), base);
  }
}

inline void load_config(PipelineConfig& c, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  parse_config(c, in, file.parent_path());
}

// Referenced files must exist before any command runs.
inline void check_config_files(const PipelineConfig& c) {
  for (const auto* p : {&c.stopwords, &c.keywords, &c.psl}) {
    if (!std::filesystem::is_regular_file(*p)) throw ConfigError("file not found: " + p->string());
  }
}

}  // namespace sensitrack
