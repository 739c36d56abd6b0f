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

#include <cstdint>
#include <string>
#include <vector>

#include "sensitrack/crawl_record.hpp"
#include "sensitrack/random.hpp"

// Deterministic synthetic crawl corpus for demos and end-to-end tests:
// labeled pages per category with topical text, shared and category-skewed
// trackers, two-level inclusion chains and a few sync requests.
namespace sensitrack::sample {

struct Topic {
  std::string category;
  std::vector<std::string> words;
  std::string niche_tracker;  // eTLD+1 mostly seen in this category
};

inline std::vector<Topic> default_topics() {
  return {
      {"Health",
       {"cancer", "therapy", "clinic", "symptoms", "diabetes", "treatment", "doctor", "patients", "disease",
        "medicine", "hospital", "diagnosis", "surgery", "vaccine", "nurse", "cardiology"},
       "medpixel.com"},
      {"Religion",
       {"church", "prayer", "faith", "bible", "worship", "gospel", "mosque", "temple", "spiritual", "scripture",
        "sermon", "pastor", "holy", "ministry", "blessing", "congregation"},
       "faithcounter.net"},
      {"Political Beliefs",
       {"election", "party", "vote", "campaign", "senate", "democracy", "policy", "candidate", "liberal",
        "conservative", "parliament", "ballot", "reform", "government", "activism", "coalition"},
       "pollbeacon.org"},
      {"TopK",
       {"shopping", "weather", "sports", "movies", "travel", "recipes", "football", "music", "games", "deals",
        "fashion", "streaming", "tickets", "flights", "gadgets", "reviews"},
       ""},
  };
}

struct SampleConfig {
  std::uint64_t seed = 42;
  std::size_t sites_per_category = 30;
  std::size_t unlabeled_per_category = 5;
  bool include_rejects = true;  // one non-English, one blank and one 404 page
};

namespace detail {

inline const std::vector<std::string>& filler() {
  static const std::vector<std::string> w = {
      "the", "and", "of", "to", "in", "is", "for", "with", "on", "this", "that", "our", "you", "are", "from",
      "about", "more", "information", "page", "contact", "news", "read", "home", "online", "service", "people"};
  return w;
}

inline std::string pick(const std::vector<std::string>& v, Rng& rng) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

inline std::string slug(const std::string& category) {
  std::string s;
  for (char c : category) s.push_back(c == ' ' ? '-' : static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
  return s;
}

inline std::string page_html(const Topic& t, Rng& rng) {
  std::string title, body;
  for (int i = 0; i < 3; ++i) title += (i ? " " : "") + pick(t.words, rng);
  for (int p = 0; p < 4; ++p) {
    body += "<p>";
    for (int i = 0; i < 25; ++i) {
      body += (i ? " " : "");
      body += rng.below(3) == 0 ? pick(t.words, rng) : pick(filler(), rng);
    }
    body += ".</p>";
  }
  std::string meta;
  for (int i = 0; i < 6; ++i) meta += (i ? " " : "") + pick(t.words, rng);
  return "<html><head><title>" + title + "</title><meta name=\"description\" content=\"" + meta +
         "\"><script>var x = 1;</script></head><body><nav>Home | About</nav>" + body + "</body></html>";
}

struct RequestBuilder {
  std::vector<RequestEntry> requests;
  std::int64_t seq = 0;

  void add(const std::string& url, std::optional<std::string> initiator, RequestType type,
           std::optional<std::string> frame = std::nullopt) {
    requests.push_back({seq++, url, std::move(initiator), type, std::move(frame), 200});
  }
};

}  // namespace detail

inline CrawlRecord make_site(const Topic& t, std::size_t index, bool labeled, Rng& rng,
                             const std::vector<Topic>& topics) {
  CrawlRecord r;
  const std::string host = "www." + detail::slug(t.category) + "-site" + std::to_string(index) + ".com";
  const std::string page = "https://" + host + "/";
  r.page_url = page;
  r.final_url = page;
  if (labeled) r.category_label = t.category;
  r.fetch_status = 200;
  r.html = detail::page_html(t, rng);
  r.captured_at = "2026-01-15T12:00:00Z";

  detail::RequestBuilder b;
  b.add(page, std::nullopt, RequestType::document);
  b.add(page + "static/site.css", page, RequestType::stylesheet);
  b.add(page + "static/app.js", page, RequestType::script);
  const std::string gtm = "https://www.googletagmanager.com/gtm.js?id=GTM-" + std::to_string(index);
  if (rng.below(10) < 8) {
    b.add(gtm, page, RequestType::script);
    b.add("https://www.google-analytics.com/analytics.js", gtm, RequestType::script);
    if (rng.below(2) == 0) b.add("https://stats.g.doubleclick.net/collect?v=1", gtm, RequestType::image);
  }
  if (rng.below(3) == 0) b.add("https://cdnjs.cloudflare.com/ajax/libs/lib.min.js", page, RequestType::script);

  // Category-skewed tracker, occasionally leaking onto other categories.
  std::string niche = t.niche_tracker;
  if (rng.below(50) == 0) niche = topics[static_cast<std::size_t>(rng.below(topics.size()))].niche_tracker;
  if (!niche.empty() && rng.below(10) < 6) {
    const std::string tag = "https://tag." + niche + "/t.js";
    b.add(tag, page, RequestType::script);
    b.add("https://px." + niche + "/p.gif?site=" + std::to_string(index), tag, RequestType::image);
    if (rng.below(2) == 0) {
      b.add("https://match.adsync-exchange.com/sync?usermatch=" + niche.substr(0, 3) + std::to_string(rng.below(100000)),
            tag, RequestType::image);
    }
  }
  if (rng.below(4) == 0) {
    const std::string frame = "https://ads.exchange-hub.net/frame.html";
    b.add(frame, page, RequestType::sub_frame, std::string("f1"));
    b.add("https://cdn.exchange-hub.net/creative.js", std::nullopt, RequestType::script, std::string("f1"));
  }
  r.requests = std::move(b.requests);
  return r;
}

// Labeled sites per topic, then unlabeled ones, then optional reject cases.
inline std::vector<CrawlRecord> make_corpus(const SampleConfig& cfg, const std::vector<Topic>& topics = default_topics()) {
  std::vector<CrawlRecord> out;
  Rng rng(cfg.seed);
  std::size_t index = 0;
  for (const auto& t : topics) {
    for (std::size_t i = 0; i < cfg.sites_per_category; ++i) out.push_back(make_site(t, index++, true, rng, topics));
  }
  for (const auto& t : topics) {
    for (std::size_t i = 0; i < cfg.unlabeled_per_category; ++i) out.push_back(make_site(t, index++, false, rng, topics));
  }
  if (cfg.include_rejects) {
    CrawlRecord german = make_site(topics.front(), index++, true, rng, topics);
    german.html =
        "<html><head><title>Gesundheit und Medizin</title></head><body><p>Die Klinik bietet Behandlung und "
        "Beratung f\xc3\xbcr Patienten mit Krankheiten aller Art. Unsere \xc3\x84rzte helfen Ihnen gerne bei "
        "Fragen zur Therapie.</p></body></html>";
    out.push_back(std::move(german));
    CrawlRecord blank = make_site(topics.front(), index++, true, rng, topics);
    blank.html = "<html><head></head><body></body></html>";
    out.push_back(std::move(blank));
    CrawlRecord gone = make_site(topics.front(), index++, true, rng, topics);
    gone.fetch_status = 404;
    gone.html.clear();
    gone.requests.resize(1);
    out.push_back(std::move(gone));
  }
  return out;
}

}  // namespace sensitrack::sample
