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

// Writes a synthetic crawl JSONL file for trying out the pipeline.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sensitrack/crawl_record.hpp"
#include "sensitrack/sample_corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic crawl corpus"};
  sensitrack::sample::SampleConfig cfg;
  std::string out_path = "-";
  bool no_rejects = false;
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--sites", cfg.sites_per_category, "Labeled sites per category");
  app.add_option("--unlabeled", cfg.unlabeled_per_category, "Unlabeled sites per category");
  app.add_flag("--no-rejects", no_rejects, "Omit the non-English, blank and 404 pages");
  app.add_option("--out", out_path, "Output file ('-' for stdout)");
  CLI11_PARSE(app, argc, argv);
  cfg.include_rejects = !no_rejects;

  const auto corpus = sensitrack::sample::make_corpus(cfg);
  if (out_path == "-") {
    sensitrack::write_crawl_records(std::cout, corpus);
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "sensitrack: error kind=data exit=2: cannot write " << out_path << '\n';
    return 2;
  }
  sensitrack::write_crawl_records(out, corpus);
  return 0;
}
