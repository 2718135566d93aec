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

#include "pipeline.hpp"

#include <chrono>
#include <fstream>
#include <set>

#include "error.hpp"
#include "http_plugins.hpp"
#include "util.hpp"

namespace tkgr::pipeline {

namespace {

void require_file(const std::filesystem::path& path, std::string_view what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kConfig, std::string(what) + " file not found: " +
                                        path.string());
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return os;
}

nlohmann::ordered_json meta(const RunConfig& config) {
  nlohmann::ordered_json m;
  m["config_hash"] = config.hash();
  m["seed"] = config.seed;
  return m;
}

std::vector<verdict::Verdict> read_verdicts(const RunConfig& config) {
  const auto path = config.verdicts();
  require_file(path, "verdicts");
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return verdict::read_verdicts_jsonl(is);
}

rules::RuleBank read_bank(const RunConfig& config) {
  require_file(config.rules(), "rules");
  return rules::load_bank_file(config.rules());
}

}  // namespace

Dataset make_dataset(std::vector<kg::Entity> entities,
                     std::vector<kg::TemporalTriple> triples,
                     std::vector<market::PriceSeries> prices) {
  Dataset data;
  data.graph_report.entities_accepted = entities.size();
  data.graph_report.edges_accepted = triples.size();
  data.graph = kg::Graph::build(std::move(entities), std::move(triples));
  std::sort(prices.begin(), prices.end(),
            [](const auto& a, const auto& b) { return a.ticker() < b.ticker(); });
  data.prices.series = std::move(prices);
  data.prices.report.tickers = data.prices.series.size();
  for (const auto& s : data.prices.series) {
    data.prices.report.rows_accepted += s.points().size();
  }
  return data;
}

Dataset load_dataset(const RunConfig& config) {
  require_file(config.entities(), "entities");
  require_file(config.edges(), "edges");
  require_file(config.prices(), "prices");
  auto input = kg::read_graph_files(config.entities(), config.edges());
  Dataset data;
  data.graph_report = std::move(input.report);
  data.graph = kg::Graph::build(std::move(input.entities), std::move(input.triples));
  data.prices = market::read_prices_file(config.prices());
  return data;
}

market::LabelTable labels_in(const Dataset& data, DateRange range, int horizon) {
  std::vector<market::PriceSeries> stocks;
  for (const auto& s : data.prices.series) {
    const auto id = data.graph.find_ticker(s.ticker());
    if (id) stocks.push_back(s);
  }
  return market::label_table(stocks, range, horizon);
}

rules::RuleBank mine_bank(const Dataset& data, const market::LabelTable& train,
                          const rules::MiningConfig& config) {
  std::set<Date> dates;
  std::set<kg::NodeId> stock_set;
  for (const auto& l : train.labels()) {
    dates.insert(l.date);
    stock_set.insert(*data.graph.find_ticker(l.ticker));
  }
  std::vector<kg::Snapshot> snapshots;
  for (Date d : dates) snapshots.emplace_back(data.graph, d);
  const std::vector<kg::NodeId> stocks(stock_set.begin(), stock_set.end());
  return rules::mine(snapshots, stocks, train, config);
}

std::vector<verdict::PredictRequest> requests_for(
    const Dataset& data, const market::LabelTable& labels) {
  std::vector<verdict::PredictRequest> out;
  for (const auto& l : labels.labels()) {
    if (const auto id = data.graph.find_ticker(l.ticker)) {
      out.push_back({*id, l.date});
    }
  }
  return out;
}

std::size_t Plugins::fallbacks() const {
  std::size_t n = 0;
  if (auto* s = dynamic_cast<const plugins::HttpSelector*>(selector.get())) {
    n += s->fallbacks();
  }
  if (auto* v = dynamic_cast<const plugins::HttpValidator*>(validator.get())) {
    n += v->fallbacks();
  }
  return n;
}

Plugins make_plugins(const RunConfig& config) {
  Plugins p;
  if (config.selector == "http") {
    p.selector = std::make_unique<plugins::HttpSelector>(
        plugins::parse_endpoint(config.llm_endpoint, config.llm_timeout_ms));
  } else if (config.selector == "pass-through") {
    p.selector = std::make_unique<explore::PassThroughSelector>();
  } else {
    p.selector = std::make_unique<explore::HeuristicSelector>();
  }
  if (config.validator == "http") {
    p.validator = std::make_unique<plugins::HttpValidator>(
        plugins::parse_endpoint(config.llm_endpoint, config.llm_timeout_ms));
  } else {
    p.validator = std::make_unique<verdict::DefaultValidator>();
  }
  return p;
}

nlohmann::ordered_json Evaluation::to_json(const std::string& config_hash) const {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["classification"] = classification.to_json();
  j["interpretability"] = interpretability.to_json();
  if (backtest) {
    j["backtest"] = backtest->to_json();
  } else {
    j["backtest"] = {{"error", backtest_error.value_or("not run")}};
  }
  return j;
}

Evaluation evaluate(const Dataset& data, std::span<const verdict::Verdict> verdicts,
                    const RunConfig& config) {
  Evaluation e;
  const auto labels = labels_in(data, config.test, config.verdict.horizon);
  e.classification = eval::classify_metrics(verdicts, labels);
  e.interpretability = eval::interpretability_stats(verdicts, data.graph);
  try {
    e.backtest = eval::backtest_top10(verdicts, data.prices, config.test, config.backtest);
  } catch (const Error& err) {
    e.backtest_error = std::string(error_code_name(err.code())) + ": " + err.what();
  }
  return e;
}

namespace {

using Json = nlohmann::ordered_json;

struct Outcome {
  Json counts = Json::object();
  std::vector<std::string> outputs;
};

Outcome cmd_ingest(const RunConfig& config) {
  const auto data = load_dataset(config);
  Outcome out;
  Json report;
  report["config_hash"] = config.hash();
  report["graph"] = data.graph_report.to_json();
  report["prices"] = data.prices.report.to_json();
  const auto path = config.out_dir / "ingest_report.json";
  open_out(path) << report.dump(2) << '\n';
  out.outputs.push_back(path.string());
  out.counts["entities"] = data.graph.entity_count();
  out.counts["triples"] = data.graph.triple_count();
  out.counts["stocks"] = data.graph.stocks().size();
  out.counts["rejected_lines"] = data.graph_report.rejected.size();
  out.counts["price_rows"] = data.prices.report.rows_accepted;
  out.counts["rejected_price_rows"] = data.prices.report.rejected.size();
  return out;
}

Outcome cmd_mine(const RunConfig& config) {
  const auto data = load_dataset(config);
  const auto labels = labels_in(data, config.train, config.mining.horizon);
  auto mining = config.mining;
  mining.jobs = config.effective_jobs();
  const auto bank = mine_bank(data, labels, mining);
  const auto m = meta(config);
  rules::save_bank_file(config.rules(), bank, &m);
  Outcome out;
  out.outputs.push_back(config.rules().string());
  out.counts["train_labels"] = labels.size();
  out.counts["rules"] = bank.rules().size();
  return out;
}

Outcome cmd_predict(const RunConfig& config) {
  const auto data = load_dataset(config);
  const auto bank = read_bank(config);
  const auto labels = labels_in(data, config.test, config.verdict.horizon);
  const auto requests = requests_for(data, labels);
  const auto plugins = make_plugins(config);
  const auto run = verdict::predict_all(data.graph, requests, bank, *plugins.selector,
                                        *plugins.validator, config.explorer,
                                        config.verdict, config.effective_jobs());
  const auto m = meta(config);
  {
    auto os = open_out(config.verdicts());
    verdict::write_verdicts_jsonl(os, run.verdicts, &m);
  }
  Outcome out;
  out.outputs.push_back(config.verdicts().string());
  out.counts["requests"] = requests.size();
  out.counts["verdicts"] = run.verdicts.size();
  out.counts["failures"] = run.failures.size();
  out.counts["plugin_fallbacks"] = plugins.fallbacks();
  std::size_t with_evidence = 0;
  for (const auto& v : run.verdicts) with_evidence += !v.evidence.empty();
  out.counts["verdicts_with_evidence"] = with_evidence;
  return out;
}

Outcome cmd_evaluate(const RunConfig& config) {
  const auto data = load_dataset(config);
  const auto verdicts = read_verdicts(config);
  const auto e = evaluate(data, verdicts, config);
  Outcome out;
  const auto report_path = config.out_dir / "report.json";
  open_out(report_path) << e.to_json(config.hash()).dump(2) << '\n';
  out.outputs.push_back(report_path.string());
  if (e.backtest) {
    const auto curve = config.out_dir / "equity_curve.csv";
    const auto hash = config.hash();
    auto os = open_out(curve);
    eval::write_equity_curve_csv(os, *e.backtest, &hash);
    out.outputs.push_back(curve.string());
  }
  out.counts["verdicts"] = verdicts.size();
  out.counts["evaluated"] = e.classification.n;
  out.counts["unmatched"] = e.classification.unmatched;
  return out;
}

Outcome cmd_backtest(const RunConfig& config) {
  const auto data = load_dataset(config);
  const auto verdicts = read_verdicts(config);
  const auto report =
      eval::backtest_top10(verdicts, data.prices, config.test, config.backtest);
  const auto hash = config.hash();
  Outcome out;
  const auto json_path = config.out_dir / "backtest.json";
  Json j = report.to_json();
  j["config_hash"] = hash;
  open_out(json_path) << j.dump(2) << '\n';
  const auto curve = config.out_dir / "equity_curve.csv";
  {
    auto os = open_out(curve);
    eval::write_equity_curve_csv(os, report, &hash);
  }
  out.outputs = {json_path.string(), curve.string()};
  out.counts["days"] = report.daily_returns.size();
  out.counts["basket"] = report.basket.size();
  return out;
}

Outcome cmd_counterfactual(const RunConfig& config) {
  const auto data = load_dataset(config);
  const auto bank = read_bank(config);
  const auto labels = labels_in(data, config.test, config.verdict.horizon);
  auto requests = requests_for(data, labels);
  const auto plugins = make_plugins(config);
  const unsigned jobs = config.effective_jobs();
  auto baseline = verdict::predict_all(data.graph, requests, bank, *plugins.selector,
                                       *plugins.validator, config.explorer,
                                       config.verdict, jobs);
  // Keep requests parallel to the verdicts that succeeded.
  if (!baseline.failures.empty()) {
    std::set<std::pair<std::string, Date>> failed;
    for (const auto& f : baseline.failures) failed.insert({f.ticker, f.date});
    std::erase_if(requests, [&](const verdict::PredictRequest& r) {
      const auto& e = data.graph.entity(r.stock);
      return failed.count({e.ticker.value_or(e.uid), r.date}) > 0;
    });
  }
  const cf::SweepInputs in{data.graph,       requests,           baseline.verdicts,
                           labels,           bank,               *plugins.selector,
                           *plugins.validator, config.explorer, config.verdict};
  const auto result = cf::sweep(in, config.cf_kinds, config.cf_ratios, config.seed, jobs);
  const auto hash = config.hash();
  const auto path = config.out_dir / "counterfactual.csv";
  {
    auto os = open_out(path);
    cf::write_counterfactual_csv(os, result.rows, &hash);
  }
  Outcome out;
  out.outputs.push_back(path.string());
  out.counts["instances"] = requests.size();
  for (std::size_t k = 0; k < config.cf_kinds.size(); ++k) {
    const std::string name(cf::to_string(config.cf_kinds[k]));
    out.counts["eligible_" + name] = result.eligible[k];
    out.counts["excluded_" + name] = result.excluded[k];
  }
  return out;
}

Outcome cmd_ablate(const RunConfig& config) {
  const auto data = load_dataset(config);
  const auto bank = read_bank(config);
  const auto labels = labels_in(data, config.test, config.verdict.horizon);
  const auto requests = requests_for(data, labels);
  const auto plugins = make_plugins(config);
  const auto settings = eval::standard_ablations();
  const auto rows = eval::ablation_run(data.graph, requests, bank, *plugins.selector,
                                       *plugins.validator, config.explorer,
                                       config.verdict, labels, settings, config.seed,
                                       config.effective_jobs());
  const auto hash = config.hash();
  const auto path = config.out_dir / "ablation.csv";
  {
    auto os = open_out(path);
    eval::write_ablation_csv(os, rows, &hash);
  }
  Outcome out;
  out.outputs.push_back(path.string());
  out.counts["instances"] = requests.size();
  out.counts["configurations"] = rows.size();
  return out;
}

Outcome cmd_synth(const RunConfig& config) {
  auto spec = config.synth;
  spec.seed = derive_seed(config.seed, "synthetic");
  const auto data = synth::generate(spec);
  const synth::OutputPaths paths{config.entities(), config.edges(), config.prices(),
                                 config.out_dir / "manifest.json"};
  synth::write_generated(data, paths);
  Outcome out;
  out.outputs = {paths.entities.string(), paths.edges.string(), paths.prices.string(),
                 paths.manifest.string()};
  out.counts["entities"] = data.entities.size();
  out.counts["triples"] = data.triples.size();
  out.counts["tickers"] = data.prices.size();
  out.counts["firings"] = data.manifest.firings.size();
  return out;
}

using Handler = Outcome (*)(const RunConfig&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> kHandlers = {
      {"ingest", cmd_ingest},     {"mine", cmd_mine},
      {"predict", cmd_predict},   {"evaluate", cmd_evaluate},
      {"backtest", cmd_backtest}, {"counterfactual", cmd_counterfactual},
      {"ablate", cmd_ablate},     {"synth", cmd_synth},
  };
  return kHandlers;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : handlers()) out.push_back(name);
    return out;
  }();
  return kNames;
}

nlohmann::ordered_json run_command(std::string_view command,
                                   const RunConfig& config) {
  Handler handler = nullptr;
  for (const auto& [name, fn] : handlers()) {
    if (name == command) handler = fn;
  }
  if (!handler) {
    throw Error(ErrorCode::kConfig, "unknown command '" + std::string(command) + "'");
  }
  config.validate();
  if (command == "synth") config.synth.validate();
  const auto started = std::chrono::steady_clock::now();
  auto outcome = handler(config);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - started;

  Json report;
  report["command"] = command;
  report["version"] = kVersion;
  report["config_hash"] = config.hash();
  report["seed"] = config.seed;
  report["jobs"] = config.effective_jobs();
  report["counts"] = std::move(outcome.counts);
  report["outputs"] = outcome.outputs;
  report["wall_time_s"] = elapsed.count();
  const auto path = config.out_dir / ("run_" + std::string(command) + ".json");
  open_out(path) << report.dump(2) << '\n';
  return report;
}

}  // namespace tkgr::pipeline
