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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graph.hpp"
#include "market.hpp"
#include "rules.hpp"

namespace tkgr::synth {

struct PlantedRule {
  rules::Body body;
  market::Direction direction = market::Direction::kUp;
  double precision = 0.8;     // P(next-day sign == direction | firing)
  double firing_rate = 0.05;  // per stock and trading day
};

// "ACQUIRED>EXTRACTED_FROM:UP:0.8:0.05", several joined by ';'.
// Throws Error{kSpecInvalid}.
std::vector<PlantedRule> parse_planted_rules(std::string_view text);
std::string format_planted_rules(const std::vector<PlantedRule>& rules);

struct GeneratorSpec {
  std::size_t n_companies = 30;
  std::size_t n_text_sources = 200;  // background articles
  std::size_t n_events = 200;
  std::size_t n_products = 60;
  std::size_t n_persons = 60;
  DateRange dates{Date::from_ymd(2022, 1, 3), Date::from_ymd(2024, 1, 2)};
  std::vector<PlantedRule> rules = {
      {{"ACQUIRED", "EXTRACTED_FROM"}, market::Direction::kUp, 0.8, 0.06},
      {{"SUED", "CAUSED_DECLINE", "EXTRACTED_FROM"},
       market::Direction::kDown, 0.8, 0.04},
  };
  // Noise edges per background entity.
  double noise_edge_rate = 1.0;
  // Prefix-only copies of each planted path per firing, on non-firing days.
  double decoy_ratio = 4.0;
  // Share of planted articles published 0-7 days before the firing day; the
  // rest fall 8-60 days before.
  double recency_fraction = 0.7;
  double return_mean = 0.01;
  double return_sd = 0.005;
  std::uint64_t seed = 42;

  // Throws Error{kSpecInvalid}.
  void validate() const;
};

nlohmann::ordered_json spec_to_json(const GeneratorSpec& spec);
// Missing keys keep their defaults. Throws Error{kSpecInvalid}.
GeneratorSpec spec_from_json(const nlohmann::json& j);

struct Firing {
  std::size_t rule = 0;
  std::string ticker;
  Date date;
  market::Direction realized = market::Direction::kUp;
  std::vector<std::string> nodes;  // planted path, stock first
  std::string text_source;
  Date published_at;
};

struct RuleSummary {
  std::size_t firings = 0;
  std::size_t decoys = 0;
  std::size_t realized_hits = 0;  // firings whose sign matched the direction
};

struct Manifest {
  GeneratorSpec spec;
  std::vector<RuleSummary> rules;
  std::vector<Firing> firings;  // date, then ticker order

  nlohmann::ordered_json to_json() const;
};

struct Generated {
  std::vector<kg::Entity> entities;
  std::vector<kg::TemporalTriple> triples;
  std::vector<market::PriceSeries> prices;
  Manifest manifest;
};

// Deterministic in `spec` alone.
Generated generate(const GeneratorSpec& spec);

struct OutputPaths {
  std::filesystem::path entities;
  std::filesystem::path edges;
  std::filesystem::path prices;
  std::filesystem::path manifest;
};

OutputPaths default_paths(const std::filesystem::path& dir);
// Throws Error{kIo}.
void write_generated(const Generated& data, const OutputPaths& paths);

}  // namespace tkgr::synth
