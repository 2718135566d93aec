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

// Reference implementations used only by tests. They work on the raw entity
// and triple lists with plain loops and share no code with the library
// beyond its value types.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "evaluation.hpp"
#include "graph.hpp"
#include "market.hpp"
#include "rules.hpp"

namespace tkgr::oracle {

struct RawGraph {
  std::vector<kg::Entity> entities;
  std::vector<kg::TemporalTriple> triples;

  const kg::Entity& entity(const std::string& uid) const;
  bool is_text(const std::string& uid) const;
};

struct RandomGraphOptions {
  std::size_t stocks = 3;
  std::size_t companies = 2;  // without ticker
  std::size_t others = 6;     // events and products
  std::size_t texts = 4;
  std::size_t edges = 30;
  std::vector<std::string> relations = {"ACQUIRED", "PARTNERED", "SELLS",
                                        "EXTRACTED_FROM"};
  Date start = Date::from_ymd(2023, 3, 1);
  int days = 3;
  double open_fraction = 0.5;
};

RawGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& options);

// As-of rules restated from their definitions.
bool node_visible(const RawGraph& g, const std::string& uid, Date as_of);
bool triple_visible(const RawGraph& g, const kg::TemporalTriple& t, Date as_of);

// Random UP/DOWN labels for every stock and date.
market::LabelTable random_labels(std::mt19937_64& rng, const RawGraph& g,
                                 const std::vector<Date>& dates);

struct MinedRule {
  rules::Body body;
  market::Direction direction;
  std::size_t support;
  std::size_t hits;

  friend auto operator<=>(const MinedRule&, const MinedRule&) = default;
};

// Exhaustive forward path enumeration per labeled (stock, date), then
// thresholding and prefix pruning.
std::set<MinedRule> brute_force_mine(const RawGraph& g,
                                     const market::LabelTable& labels,
                                     const rules::MiningConfig& config);

struct FoundHypothesis {
  std::vector<std::string> nodes;
  rules::Body body;
  market::Direction direction;

  friend auto operator<=>(const FoundHypothesis&, const FoundHypothesis&) = default;
};

// Every simple path from the stock of length <= max_depth whose relation
// sequence stays a rule-body prefix, which no shorter hypothesis cut off,
// matched against rules with confidence > tau_hyp and text evidence.
std::multiset<FoundHypothesis> brute_force_hypotheses(
    const RawGraph& g, const std::string& stock, Date as_of,
    const std::vector<rules::Rule>& rules, std::size_t max_depth,
    double tau_hyp, bool inverse_extracted_from);

// FNV-1a 64 over uids joined by 0x1F, byte by byte.
std::uint64_t fnv_path_hash(const std::vector<std::string>& uids);

struct RankInput {
  std::vector<std::string> nodes;
  int hyp = 0;
  double cov = 0.0;
  double rec = 0.0;
  double ahub = 0.0;
  std::size_t len = 0;
};

// Average-rank percentile of each value.
std::vector<double> percentile_ranks(const std::vector<double>& values);

// Orders node sequences by (-hyp, -pct cov, -pct rec, -pct ahub, len, hash).
std::vector<std::vector<std::string>> rank_by_key(std::vector<RankInput> inputs);

// Raw ranking signals of a path, from the raw graph.
RankInput raw_signals(const RawGraph& g, Date as_of,
                      const std::vector<std::string>& nodes,
                      const std::vector<std::string>& relations,
                      const std::vector<Date>& edge_dates,
                      const std::vector<rules::Rule>& rules, double tau_hyp);

// Confusion counts from (predicted, actual) pairs, one at a time.
struct Recount {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};
Recount recount(const std::vector<std::pair<bool, bool>>& predicted_actual_up);

}  // namespace tkgr::oracle
