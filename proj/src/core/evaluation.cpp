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

#include "evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>

#include "error.hpp"
#include "util.hpp"

namespace tkgr::eval {

using market::Direction;

nlohmann::ordered_json ClassificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["tp"] = tp;
  j["fp"] = fp;
  j["tn"] = tn;
  j["fn"] = fn;
  j["accuracy"] = accuracy;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["precision_degenerate"] = precision_degenerate;
  j["recall_degenerate"] = recall_degenerate;
  j["f1_degenerate"] = f1_degenerate;
  j["unmatched"] = unmatched;
  return j;
}

ClassificationReport metrics_from_counts(std::size_t tp, std::size_t fp,
                                         std::size_t tn, std::size_t fn) {
  ClassificationReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  r.n = tp + fp + tn + fn;
  auto ratio = [](std::size_t num, std::size_t den, bool& degenerate) {
    if (den == 0) {
      degenerate = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  bool unused = false;
  r.accuracy = ratio(tp + tn, r.n, unused);
  r.precision = ratio(tp, tp + fp, r.precision_degenerate);
  r.recall = ratio(tp, tp + fn, r.recall_degenerate);
  // 2PR/(P+R) reduces to 2TP/(2TP+FP+FN) for non-degenerate P and R.
  if (r.precision_degenerate || r.recall_degenerate || tp == 0) {
    r.f1 = 0.0;
    r.f1_degenerate = r.precision_degenerate || r.recall_degenerate;
  } else {
    r.f1 = static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
  }
  return r;
}

ClassificationReport classify_metrics(
    std::span<const verdict::Verdict> predictions,
    const market::LabelTable& labels) {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0, unmatched = 0;
  for (const auto& v : predictions) {
    const market::Label* l = labels.find(v.ticker, v.date);
    if (!l || l->horizon != v.horizon) {
      ++unmatched;
      continue;
    }
    const bool pred_up = v.direction == Direction::kUp;
    const bool true_up = l->direction == Direction::kUp;
    if (pred_up && true_up) ++tp;
    else if (pred_up) ++fp;
    else if (true_up) ++fn;
    else ++tn;
  }
  if (tp + fp + tn + fn == 0) {
    throw Error(ErrorCode::kEmptyIntersection,
                "no prediction matches a label");
  }
  auto r = metrics_from_counts(tp, fp, tn, fn);
  r.unmatched = unmatched;
  return r;
}

double total_return(std::span<const double> daily) {
  double growth = 1.0;
  for (double r : daily) growth *= 1.0 + r;
  return growth - 1.0;
}

double max_drawdown(std::span<const double> daily) {
  double equity = 1.0;
  double peak = 1.0;
  double worst = 0.0;
  for (double r : daily) {
    equity *= 1.0 + r;
    peak = std::max(peak, equity);
    worst = std::min(worst, equity / peak - 1.0);
  }
  return worst;
}

double win_rate(std::span<const double> daily) {
  if (daily.empty()) return 0.0;
  const auto wins = std::count_if(daily.begin(), daily.end(),
                                  [](double r) { return r > 0.0; });
  return static_cast<double>(wins) / static_cast<double>(daily.size());
}

namespace {

double mean(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

double sample_std(std::span<const double> daily) {
  if (daily.size() < 2) {
    throw Error(ErrorCode::kInsufficientHistory,
                "sample standard deviation needs at least 2 returns");
  }
  const double m = mean(daily);
  double ss = 0.0;
  for (double r : daily) ss += (r - m) * (r - m);
  return std::sqrt(ss / static_cast<double>(daily.size() - 1));
}

double annualized_volatility(std::span<const double> daily) {
  return sample_std(daily) * std::sqrt(kTradingDaysPerYear);
}

double sharpe_ratio(std::span<const double> daily, double risk_free_daily) {
  std::vector<double> excess(daily.begin(), daily.end());
  for (double& r : excess) r -= risk_free_daily;
  const auto [lo, hi] = std::minmax_element(excess.begin(), excess.end());
  if (excess.size() >= 2 && *lo == *hi) {
    throw Error(ErrorCode::kZeroVariance, "constant return series");
  }
  const double s = sample_std(excess);
  if (s == 0.0) throw Error(ErrorCode::kZeroVariance, "zero return variance");
  return std::sqrt(kTradingDaysPerYear) * mean(excess) / s;
}

nlohmann::ordered_json BacktestReport::to_json() const {
  nlohmann::ordered_json j;
  j["start"] = start.iso();
  j["basket"] = basket;
  j["days"] = daily_returns.size();
  j["total_return"] = total_return;
  j["sharpe"] = sharpe;
  j["ann_vol"] = ann_vol;
  j["max_drawdown"] = max_drawdown;
  j["win_rate"] = win_rate;
  j["daily_returns"] = daily_returns;
  return j;
}

BacktestReport backtest_top10(std::span<const verdict::Verdict> verdicts,
                              const market::PriceData& prices, DateRange window,
                              const BacktestConfig& config) {
  std::optional<Date> start;
  for (const auto& v : verdicts) {
    if (window.contains(v.date) && (!start || v.date < *start)) start = v.date;
  }
  if (!start) {
    throw Error(ErrorCode::kInsufficientTickers, "no verdicts inside the window");
  }
  std::map<std::string, const verdict::Verdict*> at_start;
  for (const auto& v : verdicts) {
    if (v.date == *start) at_start.emplace(v.ticker, &v);
  }
  std::set<Date> calendar;
  for (const auto& [ticker, v] : at_start) {
    if (const auto* s = prices.find(ticker)) {
      for (const auto& p : s->points()) {
        if (p.date >= *start && p.date < window.end) calendar.insert(p.date);
      }
    }
  }
  const std::vector<Date> days(calendar.begin(), calendar.end());
  struct Candidate {
    const verdict::Verdict* verdict;
    const market::PriceSeries* series;
    std::size_t first_index;
  };
  std::vector<Candidate> eligible;
  for (const auto& [ticker, v] : at_start) {
    const auto* s = prices.find(ticker);
    if (!s || days.empty()) continue;
    const auto first = s->index_of(days.front());
    if (!first || *first + days.size() > s->points().size()) continue;
    bool full = true;
    for (std::size_t k = 0; k < days.size() && full; ++k) {
      full = s->points()[*first + k].date == days[k];
    }
    if (full) eligible.push_back(Candidate{v, s, *first});
  }
  if (eligible.size() < config.basket_size || config.basket_size == 0) {
    throw Error(ErrorCode::kInsufficientTickers,
                std::to_string(eligible.size()) + " eligible tickers, need " +
                    std::to_string(config.basket_size));
  }
  auto key = [&](const Candidate& c) {
    const double conf = c.verdict->confidence;
    if (config.ranking == BasketRanking::kConfidence) return conf;
    return c.verdict->direction == Direction::kUp ? 1.0 + conf : 1.0 - conf;
  };
  std::stable_sort(eligible.begin(), eligible.end(),
                   [&](const Candidate& a, const Candidate& b) {
                     const double ka = key(a);
                     const double kb = key(b);
                     if (ka != kb) return ka > kb;
                     return a.verdict->ticker < b.verdict->ticker;
                   });
  eligible.resize(config.basket_size);

  BacktestReport report;
  report.start = *start;
  for (const auto& c : eligible) report.basket.push_back(c.verdict->ticker);
  const double weight = 1.0 / static_cast<double>(eligible.size());
  double equity = 1.0;
  for (std::size_t t = 1; t < days.size(); ++t) {
    double r = 0.0;
    for (const auto& c : eligible) {
      const auto pts = c.series->points();
      const double prev = pts[c.first_index + t - 1].adj_close;
      const double now = pts[c.first_index + t].adj_close;
      r += weight * (now - prev) / prev;
    }
    equity *= 1.0 + r;
    report.dates.push_back(days[t]);
    report.daily_returns.push_back(r);
    report.equity.push_back(equity);
  }
  if (report.daily_returns.empty()) {
    throw Error(ErrorCode::kInsufficientHistory,
                "window holds no trading day after the basket date");
  }
  report.total_return = total_return(report.daily_returns);
  report.max_drawdown = max_drawdown(report.daily_returns);
  report.win_rate = win_rate(report.daily_returns);
  report.sharpe = sharpe_ratio(report.daily_returns, config.risk_free_daily);
  report.ann_vol = annualized_volatility(report.daily_returns);
  return report;
}

void write_equity_curve_csv(std::ostream& os, const BacktestReport& report,
                            const std::string* config_hash) {
  if (config_hash) os << "# config_hash=" << *config_hash << '\n';
  os << "date,portfolio_value\n";
  os << report.start.iso() << ",1\n";
  for (std::size_t t = 0; t < report.dates.size(); ++t) {
    os << report.dates[t].iso() << ',' << format_double(report.equity[t]) << '\n';
  }
}

nlohmann::ordered_json InterpretabilityReport::to_json() const {
  nlohmann::ordered_json j;
  j["predictions"] = predictions;
  j["path_coverage"] = path_coverage;
  j["mean_paths_per_prediction"] = mean_paths_per_prediction;
  j["rule_match_rate"] = rule_match_rate;
  j["mean_relation_types_per_path"] = mean_relation_types_per_path;
  j["mean_rule_patterns_per_prediction"] = mean_rule_patterns_per_prediction;
  j["recency_within_7d"] = recency_within_7d;
  j["recency_within_30d"] = recency_within_30d;
  j["recency_beyond_30d"] = recency_beyond_30d;
  j["mean_text_sources_per_prediction"] = mean_text_sources_per_prediction;
  return j;
}

InterpretabilityReport interpretability_stats(
    std::span<const verdict::Verdict> verdicts, const kg::Graph& graph) {
  InterpretabilityReport r;
  r.predictions = verdicts.size();
  if (verdicts.empty()) return r;
  std::size_t covered = 0, paths = 0, patterns = 0, scored = 0, matched = 0;
  std::size_t evidence_items = 0, relation_types = 0, texts = 0;
  std::size_t dated = 0, within7 = 0, within30 = 0;
  for (const auto& v : verdicts) {
    covered += v.hypotheses > 0;
    paths += v.hypotheses;
    patterns += v.rule_patterns;
    scored += v.scored_paths;
    matched += v.scored_rule_matched;
    std::set<std::string> distinct_texts;
    for (const auto& e : v.evidence) {
      ++evidence_items;
      relation_types +=
          std::set<std::string>(e.relations.begin(), e.relations.end()).size();
      std::optional<Date> freshest;
      for (const auto& uid : e.text_sources) {
        distinct_texts.insert(uid);
        const auto id = graph.find(uid);
        if (!id || !graph.entity(*id).published_at) continue;
        const Date published = *graph.entity(*id).published_at;
        if (!freshest || published > *freshest) freshest = published;
      }
      if (freshest) {
        ++dated;
        const int age = v.date - *freshest;
        within7 += age <= 7;
        within30 += age <= 30;
      }
    }
    texts += distinct_texts.size();
  }
  const double n = static_cast<double>(verdicts.size());
  r.path_coverage = static_cast<double>(covered) / n;
  r.mean_paths_per_prediction = static_cast<double>(paths) / n;
  r.mean_rule_patterns_per_prediction = static_cast<double>(patterns) / n;
  r.mean_text_sources_per_prediction = static_cast<double>(texts) / n;
  if (scored > 0) {
    r.rule_match_rate = static_cast<double>(matched) / static_cast<double>(scored);
  }
  if (evidence_items > 0) {
    r.mean_relation_types_per_path =
        static_cast<double>(relation_types) / static_cast<double>(evidence_items);
  }
  if (dated > 0) {
    r.recency_within_7d = static_cast<double>(within7) / static_cast<double>(dated);
    r.recency_within_30d = static_cast<double>(within30) / static_cast<double>(dated);
    r.recency_beyond_30d = static_cast<double>(dated - within30) / static_cast<double>(dated);
  }
  return r;
}

std::vector<AblationSetting> standard_ablations() {
  std::vector<AblationSetting> out;
  out.push_back({"Full", {}, verdict::Aggregation::kMax});
  AblationSetting s{"w/o Temporal Constraints", {}, verdict::Aggregation::kMax};
  s.flags.temporal_constraints = false;
  out.push_back(s);
  s = {"w/o Rule Mining", {}, verdict::Aggregation::kMax};
  s.flags.rule_guidance = false;
  out.push_back(s);
  s = {"w/o Multi-hop Reasoning", {}, verdict::Aggregation::kMax};
  s.flags.multi_hop = false;
  out.push_back(s);
  out.push_back({"w/o Path Aggregation", {}, verdict::Aggregation::kSingleBest});
  s = {"w/o LLM Relation Selection", {}, verdict::Aggregation::kMax};
  s.flags.llm_selection = false;
  out.push_back(s);
  return out;
}

std::vector<verdict::Verdict> random_classifier(
    const kg::Graph& graph, std::span<const verdict::PredictRequest> requests,
    std::uint64_t seed, int horizon) {
  boost::random::mt19937_64 rng(seed);
  boost::random::bernoulli_distribution<> coin(0.5);
  std::vector<verdict::Verdict> out;
  out.reserve(requests.size());
  for (const auto& req : requests) {
    verdict::Verdict v;
    const auto& e = graph.entity(req.stock);
    v.ticker = e.ticker.value_or(e.uid);
    v.date = req.date;
    v.horizon = horizon;
    v.direction = coin(rng) ? Direction::kUp : Direction::kDown;
    v.confidence = 0.5;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<AblationRow> ablation_run(
    const kg::Graph& graph, std::span<const verdict::PredictRequest> requests,
    const rules::RuleBank& bank, const explore::RelationSelector& selector,
    const verdict::Validator& validator,
    const explore::ExplorerConfig& explorer_config,
    const verdict::VerdictConfig& verdict_config,
    const market::LabelTable& labels, std::span<const AblationSetting> settings,
    std::uint64_t seed, unsigned jobs) {
  std::vector<AblationRow> rows;
  for (const auto& setting : settings) {
    auto ec = explorer_config;
    ec.ablation = setting.flags;
    auto vc = verdict_config;
    vc.aggregation = setting.aggregation;
    const auto run = verdict::predict_all(graph, requests, bank, selector,
                                          validator, ec, vc, jobs);
    rows.push_back(AblationRow{setting.name,
                               classify_metrics(run.verdicts, labels),
                               run.failures.size()});
  }
  const auto coin = random_classifier(graph, requests,
                                      derive_seed(seed, "ablation/random"),
                                      verdict_config.horizon);
  rows.push_back(AblationRow{"Random", classify_metrics(coin, labels), 0});
  return rows;
}

void write_ablation_csv(std::ostream& os, std::span<const AblationRow> rows,
                        const std::string* config_hash) {
  if (config_hash) os << "# config_hash=" << *config_hash << '\n';
  os << "configuration,accuracy,precision,recall,f1,n,failures\n";
  for (const auto& r : rows) {
    os << '"' << r.name << "\"," << format_double(r.report.accuracy) << ','
       << format_double(r.report.precision) << ','
       << format_double(r.report.recall) << ',' << format_double(r.report.f1)
       << ',' << r.report.n << ',' << r.failures << '\n';
  }
}

}  // namespace tkgr::eval
