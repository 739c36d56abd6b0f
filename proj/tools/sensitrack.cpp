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

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "sensitrack/config.hpp"
#include "sensitrack/error.hpp"
#include "sensitrack/pipeline.hpp"

#ifndef SENSITRACK_DATA_DIR
#define SENSITRACK_DATA_DIR "data"
#endif

namespace {

namespace fs = std::filesystem;
using namespace sensitrack;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::string output = "out";
  std::string input;
  std::string model;
  std::string predictions;
  std::optional<double> threshold;
};

int fail(const char* kind, int code, const std::string& message) {
  std::cerr << "sensitrack: error kind=" << kind << " exit=" << code << ": " << message << '\n';
  return code;
}

PipelineConfig make_config(const Options& o) {
  const char* env = std::getenv("SENSITRACK_DATA_DIR");
  auto cfg = default_config(env && *env ? fs::path(env) : fs::path(SENSITRACK_DATA_DIR));
  if (!o.config.empty()) load_config(cfg, o.config);
  if (o.seed) cfg.seed = *o.seed;
  check_config_files(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensitive-category web page classification and third-party tracking audit"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Configuration file (key = value)");
  app.add_option("--seed", o.seed, "Override the configured random seed");
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--output", o.output, "Output directory");

  auto* pre = app.add_subcommand("preprocess", "Crawl records to documents");
  pre->add_option("input", o.input, "crawl JSONL")->required();
  auto* tr = app.add_subcommand("train", "Train and evaluate the classifier");
  tr->add_option("documents", o.input, "documents JSONL")->required();
  auto* cl = app.add_subcommand("classify", "Label documents with a trained model");
  cl->add_option("documents", o.input, "documents JSONL")->required();
  cl->add_option("--model", o.model, "model.json written by train")->required();
  cl->add_option("--threshold", o.threshold, "Minimum winning probability");
  auto* au = app.add_subcommand("audit", "Third-party chains, coverage and cookie synchronization");
  au->add_option("crawl", o.input, "crawl JSONL")->required();
  au->add_option("--predictions", o.predictions, "predictions JSONL written by classify");
  auto* rep = app.add_subcommand("report", "Print the tables of an output directory");
  rep->add_option("dir", o.input, "output directory (defaults to --output)");

  for (auto* sub : {pre, tr, cl, au, rep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", 1, e.what());
  }

  try {
    if (rep->parsed()) {
      cmd_report(o.input.empty() ? o.output : o.input, std::cout);
      return 0;
    }
    const auto cfg = make_config(o);
    if (pre->parsed()) {
      const auto s = cmd_preprocess(o.input, cfg, o.output, o.threads);
      std::cout << "records=" << s.n_records << " documents=" << s.n_documents;
      for (const auto& [reason, n] : s.rejected) std::cout << ' ' << to_string(reason) << '=' << n;
      std::cout << '\n';
    } else if (tr->parsed()) {
      const auto s = cmd_train(o.input, cfg, o.output, o.threads);
      std::cout << "accuracy=" << format_double(s.evaluation.accuracy) << " train=" << s.n_train
                << " validation=" << s.n_validation << " k=" << s.k_effective;
      if (s.k_effective < s.k_requested) std::cout << " (reduced from " << s.k_requested << ")";
      std::cout << '\n';
    } else if (cl->parsed()) {
      const auto out = cmd_classify(o.input, o.model, o.threshold.value_or(cfg.threshold), o.output, o.threads);
      std::size_t labeled = 0;
      for (const auto& r : out) labeled += r.label ? 1 : 0;
      std::cout << "documents=" << out.size() << " labeled=" << labeled << '\n';
    } else if (au->parsed()) {
      const auto s = cmd_audit(o.input, o.predictions.empty() ? std::nullopt : std::optional<fs::path>(o.predictions),
                               cfg, o.output, o.threads);
      std::cout << "sites=" << s.n_sites << " discarded=" << s.n_discarded
                << " unattributed_requests=" << s.unattributed_requests << " csync_events=" << s.n_events << '\n';
      if (s.unattributed_requests) {
        std::cerr << "sensitrack: warning kind=unattributed count=" << s.unattributed_requests << '\n';
      }
    }
  } catch (const ConfigError& e) {
    return fail("config", 1, e.what());
  } catch (const DataError& e) {
    return fail("data", 2, e.what());
  } catch (const std::exception& e) {
    return fail("data", 2, e.what());
  }
  return 0;
}
