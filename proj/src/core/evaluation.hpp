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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "market.hpp"
#include "verdict.hpp"

namespace tkgr::eval {

// UP is the positive class.
struct ClassificationReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t n = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the metric's denominator is zero; the metric is then 0.0.
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;
  std::size_t unmatched = 0;  // predictions without a label

  nlohmann::ordered_json to_json() const;
};

// Metrics from confusion counts, each formed as one integer ratio.
ClassificationReport metrics_from_counts(std::size_t tp, std::size_t fp,
                                         std::size_t tn, std::size_t fn);

// Throws Error{kEmptyIntersection} when no prediction has a label.
ClassificationReport classify_metrics(std::span<const verdict::Verdict> predictions,
                                      const market::LabelTable& labels);

// ---- backtesting ----

inline constexpr double kTradingDaysPerYear = 252.0;

double total_return(std::span<const double> daily);
// Running peak starts from the initial unit of capital.
double max_drawdown(std::span<const double> daily);
double win_rate(std::span<const double> daily);
// Sample standard deviation; throws Error{kInsufficientHistory} when T < 2.
double sample_std(std::span<const double> daily);
double annualized_volatility(std::span<const double> daily);
// Throws Error{kZeroVariance} on a constant series.
double sharpe_ratio(std::span<const double> daily, double risk_free_daily = 0.0);

enum class BasketRanking {
  kConfidence,    // verdict confidence regardless of direction
  kUpConfidence,  // UP verdicts first, then DOWN by ascending confidence
};

struct BacktestConfig {
  std::size_t basket_size = 10;
  BasketRanking ranking = BasketRanking::kConfidence;
  double risk_free_daily = 0.0;
};

struct BacktestReport {
  Date start;
  std::vector<std::string> basket;
  std::vector<Date> dates;            // t = 1..T
  std::vector<double> daily_returns;  // r_t
  std::vector<double> equity;         // C_t
  double total_return = 0.0;
  double sharpe = 0.0;
  double ann_vol = 0.0;
  double max_drawdown = 0.0;
  double win_rate = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Equal-weight buy-and-hold basket of the top tickers by verdict confidence
// (ties by ticker) on the first verdict date inside `window`, held to the end
// of the window without rebalancing. Throws Error{kInsufficientTickers |
// kInsufficientHistory | kZeroVariance}.
BacktestReport backtest_top10(std::span<const verdict::Verdict> verdicts,
                              const market::PriceData& prices,
                              DateRange window, const BacktestConfig& config = {});

void write_equity_curve_csv(std::ostream& os, const BacktestReport& report,
                            const std::string* config_hash = nullptr);

// ---- interpretability ----

struct InterpretabilityReport {
  std::size_t predictions = 0;
  double path_coverage = 0.0;  // predictions with >= 1 hypothesis
  double mean_paths_per_prediction = 0.0;
  double rule_match_rate = 0.0;  // scored paths equal to a rule body
  double mean_relation_types_per_path = 0.0;
  double mean_rule_patterns_per_prediction = 0.0;
  // Age of each evidence path's freshest TextSource relative to the verdict
  // date. within_30d includes within_7d.
  double recency_within_7d = 0.0;
  double recency_within_30d = 0.0;
  double recency_beyond_30d = 0.0;
  double mean_text_sources_per_prediction = 0.0;

  nlohmann::ordered_json to_json() const;
};

InterpretabilityReport interpretability_stats(
    std::span<const verdict::Verdict> verdicts, const kg::Graph& graph);

// ---- ablations ----

struct AblationSetting {
  std::string name;
  explore::AblationFlags flags;
  verdict::Aggregation aggregation = verdict::Aggregation::kMax;
};

// Full model plus one row per disabled component.
std::vector<AblationSetting> standard_ablations();

struct AblationRow {
  std::string name;
  ClassificationReport report;
  std::size_t failures = 0;
};

// Seeded fair-coin predictions for every request.
std::vector<verdict::Verdict> random_classifier(
    const kg::Graph& graph, std::span<const verdict::PredictRequest> requests,
    std::uint64_t seed, int horizon = 1);

// Runs predict_all under each setting and appends a "Random" baseline row.
std::vector<AblationRow> ablation_run(
    const kg::Graph& graph, std::span<const verdict::PredictRequest> requests,
    const rules::RuleBank& bank, const explore::RelationSelector& selector,
    const verdict::Validator& validator,
    const explore::ExplorerConfig& explorer_config,
    const verdict::VerdictConfig& verdict_config,
    const market::LabelTable& labels, std::span<const AblationSetting> settings,
    std::uint64_t seed, unsigned jobs = 1);

void write_ablation_csv(std::ostream& os, std::span<const AblationRow> rows,
                        const std::string* config_hash = nullptr);

}  // namespace tkgr::eval
