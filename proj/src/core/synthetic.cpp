/*
 * Copyright 2026 The tkgr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "error.hpp"
#include "graph_io.hpp"
#include "util.hpp"

namespace tkgr::synth {

using kg::EntityKind;
using market::Direction;

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::kSpecInvalid, message);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    invalid("bad number '" + s + "' in planted rule");
  }
  return v;
}

}  // namespace

std::vector<PlantedRule> parse_planted_rules(std::string_view text) {
  std::vector<PlantedRule> out;
  if (text.empty()) return out;
  for (auto item : split(text, ';')) {
    const auto fields = split(item, ':');
    if (fields.size() != 4) {
      invalid("planted rule '" + std::string(item) +
              "' needs body:direction:precision:rate");
    }
    PlantedRule rule;
    for (auto rel : split(fields[0], '>')) rule.body.emplace_back(rel);
    const auto direction = market::parse_direction(fields[1]);
    if (!direction) {
      invalid("bad direction in planted rule '" + std::string(item) + "'");
    }
    rule.direction = *direction;
    rule.precision = parse_number(fields[2]);
    rule.firing_rate = parse_number(fields[3]);
    out.push_back(std::move(rule));
  }
  return out;
}

std::string format_planted_rules(const std::vector<PlantedRule>& rules) {
  std::string out;
  for (const auto& r : rules) {
    if (!out.empty()) out += ';';
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i > 0) out += '>';
      out += r.body[i];
    }
    out += ':';
    out += market::to_string(r.direction);
    out += ':' + format_double(r.precision) + ':' + format_double(r.firing_rate);
  }
  return out;
}

void GeneratorSpec::validate() const {
  if (n_companies == 0) invalid("n_companies must be positive");
  if (dates.empty()) invalid("empty date range");
  std::size_t weekdays = 0;
  for (Date d = dates.start; d < dates.end && weekdays < 2; d = d + 1) {
    weekdays += d.weekday() != 0 && d.weekday() != 6;
  }
  if (weekdays < 2) invalid("date range needs at least two weekdays");
  if (!(noise_edge_rate >= 0.0)) invalid("noise_edge_rate must be >= 0");
  if (!(decoy_ratio >= 0.0)) invalid("decoy_ratio must be >= 0");
  if (!(recency_fraction >= 0.0 && recency_fraction <= 1.0)) {
    invalid("recency_fraction must lie in [0, 1]");
  }
  if (!(return_mean > 0.0) || !(return_sd >= 0.0)) {
    invalid("return magnitude needs mean > 0 and sd >= 0");
  }
  std::set<std::string> first_relations;
  double mass = 0.0;
  for (const auto& r : rules) {
    if (r.body.empty() || r.body.size() > rules::kMaxBodyLength) {
      invalid("planted body length must be 1.." +
              std::to_string(rules::kMaxBodyLength));
    }
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (!kg::is_valid_relation_name(r.body[i])) {
        invalid("bad relation name '" + r.body[i] + "'");
      }
      if (r.body[i] == kg::kExtractedFrom && i + 1 != r.body.size()) {
        invalid("EXTRACTED_FROM may only end a planted body");
      }
    }
    if (r.body.front() == kg::kExtractedFrom) {
      invalid("a planted body cannot start with EXTRACTED_FROM");
    }
    if (!first_relations.insert(r.body.front()).second) {
      invalid("planted bodies must start with distinct relations");
    }
    if (!(r.precision > 0.0 && r.precision <= 1.0)) {
      invalid("planted precision must lie in (0, 1]");
    }
    if (!(r.firing_rate > 0.0)) invalid("firing rate must be positive");
    mass += r.firing_rate * (1.0 + decoy_ratio);
  }
  if (mass > 1.0) invalid("firing and decoy rates exceed 1 per stock-day");
}

nlohmann::ordered_json spec_to_json(const GeneratorSpec& spec) {
  nlohmann::ordered_json j;
  j["n_companies"] = spec.n_companies;
  j["n_text_sources"] = spec.n_text_sources;
  j["n_events"] = spec.n_events;
  j["n_products"] = spec.n_products;
  j["n_persons"] = spec.n_persons;
  j["start"] = spec.dates.start.iso();
  j["end"] = spec.dates.end.iso();
  j["rules"] = nlohmann::ordered_json::array();
  for (const auto& r : spec.rules) {
    nlohmann::ordered_json rj;
    rj["body"] = r.body;
    rj["direction"] = market::to_string(r.direction);
    rj["precision"] = r.precision;
    rj["firing_rate"] = r.firing_rate;
    j["rules"].push_back(std::move(rj));
  }
  j["noise_edge_rate"] = spec.noise_edge_rate;
  j["decoy_ratio"] = spec.decoy_ratio;
  j["recency_fraction"] = spec.recency_fraction;
  j["return_mean"] = spec.return_mean;
  j["return_sd"] = spec.return_sd;
  j["seed"] = spec.seed;
  return j;
}

GeneratorSpec spec_from_json(const nlohmann::json& j) {
  GeneratorSpec spec;
  try {
    spec.n_companies = j.value("n_companies", spec.n_companies);
    spec.n_text_sources = j.value("n_text_sources", spec.n_text_sources);
    spec.n_events = j.value("n_events", spec.n_events);
    spec.n_products = j.value("n_products", spec.n_products);
    spec.n_persons = j.value("n_persons", spec.n_persons);
    if (j.contains("start")) {
      spec.dates.start = Date::parse(j.at("start").get<std::string>());
    }
    if (j.contains("end")) {
      spec.dates.end = Date::parse(j.at("end").get<std::string>());
    }
    if (j.contains("rules")) {
      spec.rules.clear();
      for (const auto& rj : j.at("rules")) {
        PlantedRule r;
        r.body = rj.at("body").get<rules::Body>();
        const auto direction =
            market::parse_direction(rj.at("direction").get<std::string>());
        if (!direction) invalid("bad direction in generator spec");
        r.direction = *direction;
        r.precision = rj.at("precision").get<double>();
        r.firing_rate = rj.at("firing_rate").get<double>();
        spec.rules.push_back(std::move(r));
      }
    }
    spec.noise_edge_rate = j.value("noise_edge_rate", spec.noise_edge_rate);
    spec.decoy_ratio = j.value("decoy_ratio", spec.decoy_ratio);
    spec.recency_fraction = j.value("recency_fraction", spec.recency_fraction);
    spec.return_mean = j.value("return_mean", spec.return_mean);
    spec.return_sd = j.value("return_sd", spec.return_sd);
    spec.seed = j.value("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("bad generator spec: ") + e.what());
  } catch (const Error& e) {
    invalid(std::string("bad generator spec: ") + e.what());
  }
  return spec;
}

nlohmann::ordered_json Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["spec"] = spec_to_json(spec);
  j["rules"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& s = rules[i];
    nlohmann::ordered_json rj;
    rj["body"] = spec.rules[i].body;
    rj["direction"] = market::to_string(spec.rules[i].direction);
    rj["firings"] = s.firings;
    rj["decoys"] = s.decoys;
    rj["realized_hits"] = s.realized_hits;
    rj["realized_rate"] =
        s.firings == 0 ? 0.0
                       : static_cast<double>(s.realized_hits) /
                             static_cast<double>(s.firings);
    j["rules"].push_back(std::move(rj));
  }
  j["firings"] = nlohmann::ordered_json::array();
  for (const auto& f : firings) {
    nlohmann::ordered_json fj;
    fj["rule"] = f.rule;
    fj["ticker"] = f.ticker;
    fj["date"] = f.date.iso();
    fj["realized"] = market::to_string(f.realized);
    fj["nodes"] = f.nodes;
    fj["text_source"] = f.text_source;
    fj["published_at"] = f.published_at.iso();
    j["firings"].push_back(std::move(fj));
  }
  return j;
}

namespace {

using Rng = boost::random::mt19937_64;

std::string numbered(char prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, n);
  return buf;
}

EntityKind kind_for(std::string_view relation) {
  if (relation == "ACQUIRED" || relation == "PARTNERED" ||
      relation == "INVESTED_IN" || relation == "DIVESTED" ||
      relation == "SUED" || relation == "SETTLED") {
    return EntityKind::kCompany;
  }
  if (relation == "SELLS" || relation == "LICENSED") return EntityKind::kProduct;
  if (relation == "WORKS_FOR") return EntityKind::kPerson;
  return EntityKind::kEvent;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

class Builder {
 public:
  std::string add(EntityKind kind, char prefix, std::string name_stem,
                  std::optional<Date> published = std::nullopt) {
    kg::Entity e;
    e.uid = numbered(prefix, ++counters_[static_cast<int>(prefix)], 6);
    e.kind = kind;
    e.name = name_stem + " " + e.uid;
    e.published_at = published;
    if (kind == EntityKind::kTextSource) {
      e.metadata["title"] = "Report " + e.uid;
    }
    out_.entities.push_back(e);
    return e.uid;
  }

  void link(const std::string& head, const std::string& relation,
            const std::string& tail, Date from, std::optional<Date> to) {
    out_.triples.push_back(kg::TemporalTriple{head, relation, tail, from, to});
  }

  Generated& out() { return out_; }

 private:
  std::map<int, std::size_t> counters_;
  Generated out_;
};

}  // namespace

Generated generate(const GeneratorSpec& spec) {
  spec.validate();
  Builder b;
  Rng event_rng(derive_seed(spec.seed, "synthetic/events"));
  Rng sign_rng(derive_seed(spec.seed, "synthetic/signs"));
  Rng magnitude_rng(derive_seed(spec.seed, "synthetic/magnitudes"));
  Rng noise_rng(derive_seed(spec.seed, "synthetic/noise"));
  boost::random::uniform_01<double> unit;

  std::vector<Date> days;
  for (Date d = spec.dates.start; d < spec.dates.end; d = d + 1) {
    if (d.weekday() != 0 && d.weekday() != 6) days.push_back(d);
  }

  // Stocks.
  std::vector<std::string> stock_uids;
  std::vector<std::string> tickers;
  for (std::size_t i = 1; i <= spec.n_companies; ++i) {
    kg::Entity e;
    e.uid = numbered('C', i, 4);
    e.kind = EntityKind::kCompany;
    e.name = "Company " + e.uid;
    e.ticker = numbered('S', i, 4);
    stock_uids.push_back(e.uid);
    tickers.push_back(*e.ticker);
    b.out().entities.push_back(std::move(e));
  }

  // Planted firings and decoys: at most one event per stock and day, and
  // none on the last day, which has no next-day return.
  Manifest& manifest = b.out().manifest;
  manifest.spec = spec;
  manifest.rules.resize(spec.rules.size());
  std::vector<std::vector<Direction>> signs(spec.n_companies);
  for (std::size_t s = 0; s < spec.n_companies; ++s) {
    signs[s].resize(days.size() > 0 ? days.size() - 1 : 0);
  }
  boost::random::uniform_int_distribution<int> recent_lag(0, 7);
  boost::random::uniform_int_distribution<int> stale_lag(8, 60);

  Date published;
  auto plant_path = [&](const PlantedRule& rule, std::size_t stock, Date day,
                        std::size_t steps, std::vector<std::string>& nodes)
      -> std::string {
    nodes.push_back(stock_uids[stock]);
    std::string last_text;
    for (std::size_t k = 0; k < steps; ++k) {
      const auto& rel = rule.body[k];
      std::string next;
      if (rel == kg::kExtractedFrom) {
        const int lag = unit(event_rng) < spec.recency_fraction
                            ? recent_lag(event_rng)
                            : stale_lag(event_rng);
        published = day - lag;
        next = b.add(EntityKind::kTextSource, 'N', "Article", published);
        last_text = next;
      } else {
        const auto kind = kind_for(rel);
        next = b.add(kind, 'F', std::string(kg::to_string(kind)));
      }
      // The first edge holds on the firing day only; later hops stay open.
      b.link(nodes.back(), rel, next, day,
             k == 0 ? std::optional<Date>(day) : std::nullopt);
      nodes.push_back(next);
    }
    return last_text;
  };

  for (std::size_t t = 0; t + 1 < days.size(); ++t) {
    const Date day = days[t];
    for (std::size_t s = 0; s < spec.n_companies; ++s) {
      const double u = unit(event_rng);
      double acc = 0.0;
      std::optional<std::size_t> fired;
      std::optional<std::size_t> decoy;
      for (std::size_t r = 0; r < spec.rules.size() && !fired; ++r) {
        acc += spec.rules[r].firing_rate;
        if (u < acc) fired = r;
      }
      for (std::size_t r = 0; r < spec.rules.size() && !fired && !decoy; ++r) {
        acc += spec.rules[r].firing_rate * spec.decoy_ratio;
        if (u < acc) decoy = r;
      }
      const double sign_draw = unit(sign_rng);
      if (fired) {
        const auto& rule = spec.rules[*fired];
        Firing f;
        f.rule = *fired;
        f.ticker = tickers[s];
        f.date = day;
        f.text_source = plant_path(rule, s, day, rule.body.size(), f.nodes);
        if (rule.body.back() != kg::kExtractedFrom) {
          // Anchor the path's end at an article.
          const int lag = unit(event_rng) < spec.recency_fraction
                              ? recent_lag(event_rng)
                              : stale_lag(event_rng);
          published = day - lag;
          f.text_source =
              b.add(EntityKind::kTextSource, 'N', "Article", published);
          b.link(f.nodes.back(), std::string(kg::kExtractedFrom),
                 f.text_source, day, std::nullopt);
        }
        f.published_at = published;
        const bool match = sign_draw < rule.precision;
        f.realized = match ? rule.direction
                           : (rule.direction == Direction::kUp ? Direction::kDown
                                                               : Direction::kUp);
        signs[s][t] = f.realized;
        auto& summary = manifest.rules[*fired];
        ++summary.firings;
        summary.realized_hits += match;
        manifest.firings.push_back(std::move(f));
        continue;
      }
      if (decoy) {
        const auto& rule = spec.rules[*decoy];
        const std::size_t steps =
            rule.body.size() > 1 ? rule.body.size() - 1 : 0;
        if (steps > 0) {
          std::vector<std::string> nodes;
          plant_path(rule, s, day, steps, nodes);
          ++manifest.rules[*decoy].decoys;
        }
      }
      signs[s][t] = sign_draw < 0.5 ? Direction::kUp : Direction::kDown;
    }
  }

  // Background entities, articles, and noise edges. Noise never targets a
  // company, never uses EXTRACTED_FROM and never uses a planted first
  // relation, so planted bodies are reachable only through real firings.
  std::vector<std::string> background;  // non-text, non-stock
  std::vector<std::string> noise_heads(stock_uids);
  for (std::size_t i = 0; i < spec.n_events; ++i) {
    background.push_back(b.add(EntityKind::kEvent, 'V', "Event"));
  }
  for (std::size_t i = 0; i < spec.n_products; ++i) {
    background.push_back(b.add(EntityKind::kProduct, 'P', "Product"));
  }
  for (std::size_t i = 0; i < spec.n_persons; ++i) {
    background.push_back(b.add(EntityKind::kPerson, 'H', "Person"));
  }
  noise_heads.insert(noise_heads.end(), background.begin(), background.end());
  const int span_days = spec.dates.end - spec.dates.start;
  boost::random::uniform_int_distribution<int> offset(0, span_days - 1);
  if (!background.empty()) {
    for (std::size_t i = 0; i < spec.n_text_sources; ++i) {
      const Date published = spec.dates.start + offset(noise_rng);
      const auto text = b.add(EntityKind::kTextSource, 'B', "Article", published);
      const auto& source = background[uniform_index(noise_rng, background.size())];
      // Background coverage stays linked for two weeks after publication.
      b.link(source, std::string(kg::kExtractedFrom), text, published,
             published + 14);
    }
  }
  std::vector<std::string> noise_relations;
  for (const auto& rel : kg::seeded_relations()) {
    const bool reserved =
        rel == kg::kExtractedFrom ||
        std::any_of(spec.rules.begin(), spec.rules.end(),
                    [&](const PlantedRule& r) { return r.body.front() == rel; });
    if (!reserved) noise_relations.push_back(rel);
  }
  const auto noise_edges = static_cast<std::size_t>(
      std::llround(spec.noise_edge_rate * static_cast<double>(noise_heads.size())));
  boost::random::uniform_int_distribution<int> closed_length(30, 180);
  if (!background.empty() && !noise_relations.empty()) {
    for (std::size_t i = 0; i < noise_edges; ++i) {
      const auto& head = noise_heads[uniform_index(noise_rng, noise_heads.size())];
      const auto& tail = background[uniform_index(noise_rng, background.size())];
      const auto& rel =
          noise_relations[uniform_index(noise_rng, noise_relations.size())];
      const Date from = spec.dates.start + offset(noise_rng);
      std::optional<Date> to;
      if (unit(noise_rng) < 0.5) to = from + closed_length(noise_rng);
      if (head == tail) continue;
      b.link(head, rel, tail, from, to);
    }
  }

  // Prices: one close per weekday; the return into day t+1 carries the sign
  // drawn for day t.
  boost::random::normal_distribution<double> magnitude(spec.return_mean,
                                                       spec.return_sd);
  for (std::size_t s = 0; s < spec.n_companies; ++s) {
    std::vector<market::PricePoint> points;
    points.reserve(days.size());
    double close = 100.0;
    for (std::size_t t = 0; t < days.size(); ++t) {
      if (t > 0) {
        const double m = std::max(std::abs(magnitude(magnitude_rng)), 1e-4);
        close *= 1.0 + (signs[s][t - 1] == Direction::kUp ? m : -m);
      }
      points.push_back(market::PricePoint{days[t], close});
    }
    b.out().prices.emplace_back(tickers[s], std::move(points));
  }

  std::stable_sort(manifest.firings.begin(), manifest.firings.end(),
                   [](const Firing& a, const Firing& c) {
                     return std::tie(a.date, a.ticker) < std::tie(c.date, c.ticker);
                   });
  return std::move(b.out());
}

OutputPaths default_paths(const std::filesystem::path& dir) {
  return OutputPaths{dir / "entities.jsonl", dir / "edges.jsonl",
                     dir / "prices.csv", dir / "manifest.json"};
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return os;
}

}  // namespace

void write_generated(const Generated& data, const OutputPaths& paths) {
  {
    auto os = open_out(paths.entities);
    kg::write_entities_jsonl(os, data.entities);
  }
  {
    auto os = open_out(paths.edges);
    kg::write_edges_jsonl(os, data.triples);
  }
  {
    auto os = open_out(paths.prices);
    market::write_prices_csv(os, data.prices);
  }
  {
    auto os = open_out(paths.manifest);
    os << data.manifest.to_json().dump(1) << '\n';
  }
}

}  // namespace tkgr::synth
