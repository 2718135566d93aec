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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "graph_io.hpp"

namespace tkgr::pipeline {

inline constexpr std::string_view kVersion = "0.3.0";

struct Dataset {
  kg::Graph graph;
  kg::IngestReport graph_report;
  market::PriceData prices;
};

// Throws Error{kConfig} naming the first missing input file.
Dataset load_dataset(const RunConfig& config);
Dataset make_dataset(std::vector<kg::Entity> entities,
                     std::vector<kg::TemporalTriple> triples,
                     std::vector<market::PriceSeries> prices);

// Graph stocks with a price series, restricted to labels inside `range`.
market::LabelTable labels_in(const Dataset& data, DateRange range, int horizon);

// One as-of snapshot per labeled date.
rules::RuleBank mine_bank(const Dataset& data, const market::LabelTable& train,
                          const rules::MiningConfig& config);

// One request per label whose ticker is a graph stock, in label order.
std::vector<verdict::PredictRequest> requests_for(
    const Dataset& data, const market::LabelTable& labels);

struct Plugins {
  std::unique_ptr<explore::RelationSelector> selector;
  std::unique_ptr<verdict::Validator> validator;
  std::size_t fallbacks() const;
};
Plugins make_plugins(const RunConfig& config);

// Artifacts shared by the test and report writers.
struct Evaluation {
  eval::ClassificationReport classification;
  eval::InterpretabilityReport interpretability;
  std::optional<eval::BacktestReport> backtest;
  std::optional<std::string> backtest_error;

  nlohmann::ordered_json to_json(const std::string& config_hash) const;
};
Evaluation evaluate(const Dataset& data, std::span<const verdict::Verdict> verdicts,
                    const RunConfig& config);

// Commands. Each writes its artifacts plus run_<command>.json under out_dir
// and returns the run report. Throws Error.
nlohmann::ordered_json run_command(std::string_view command,
                                   const RunConfig& config);
const std::vector<std::string>& commands();

}  // namespace tkgr::pipeline
