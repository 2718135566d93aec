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

// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "counterfactual.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "explorer.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "properties.hpp"
#include "synthetic.hpp"
#include "verdict.hpp"

namespace tkgr {
namespace {

namespace fs = std::filesystem;
using market::Direction;
using testing::d;
using testing::GraphSpec;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Trains on `train`, predicts every test label, single-threaded.
struct Scenario {
  RunConfig config;
  synth::Manifest manifest;
  pipeline::Dataset data;
  market::LabelTable train;
  market::LabelTable test;
  rules::RuleBank bank;
  std::vector<verdict::PredictRequest> requests;
  pipeline::Plugins plugins;
  verdict::PredictionRun run;

  void predict() {
    run = verdict::predict_all(data.graph, requests, bank, *plugins.selector,
                               *plugins.validator, config.explorer, config.verdict, 1);
  }
};

Scenario build(const RunConfig& config) {
  Scenario s;
  s.config = config;
  auto gen = synth::generate(config.synth);
  s.manifest = std::move(gen.manifest);
  s.data = pipeline::make_dataset(std::move(gen.entities), std::move(gen.triples),
                                  std::move(gen.prices));
  s.train = pipeline::labels_in(s.data, config.train, config.verdict.horizon);
  s.test = pipeline::labels_in(s.data, config.test, config.verdict.horizon);
  s.bank = pipeline::mine_bank(s.data, s.train, config.mining);
  s.requests = pipeline::requests_for(s.data, s.test);
  s.plugins = pipeline::make_plugins(config);
  s.predict();
  return s;
}

RunConfig base_config(std::size_t companies, const char* start, const char* split,
                      const char* end, const char* planted, std::uint64_t seed) {
  RunConfig c;
  c.synth.n_companies = companies;
  c.synth.dates = {d(start), d(end)};
  c.synth.rules = synth::parse_planted_rules(planted);
  c.synth.seed = seed;
  c.train = {d(start), d(split)};
  c.test = {d(split), d(end)};
  c.seed = seed;
  c.jobs = 1;
  return c;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

// Pearson correlation of average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = oracle::percentile_ranks(x);
  const auto ry = oracle::percentile_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx == 0 || syy == 0 ? 0.0 : sxy / std::sqrt(sxx * syy);
}

// ---- criteria ----

Outcome leakage() {
  if (auto err = prop::snapshot_soundness(1, 1000); !err.empty()) return {false, err};
  auto s = build(base_config(12, "2022-01-03", "2022-05-01", "2022-07-01",
                             "ACQUIRED>EXTRACTED_FROM:UP:0.8:0.08;"
                             "SUED>CAUSED_DECLINE>EXTRACTED_FROM:DOWN:0.8:0.06",
                             7));
  std::size_t paths = 0;
  for (const auto& v : s.run.verdicts) paths += v.evidence.size();
  if (paths == 0) return {false, "pipeline emitted no evidence paths"};
  if (auto err = prop::no_future_elements(s.data.graph, s.run.verdicts); !err.empty()) {
    return {false, err};
  }
  return {true, "1000 snapshots clean; " + std::to_string(paths) +
                    " emitted evidence paths without future elements"};
}

using Check = std::function<std::string(std::uint64_t, std::size_t*)>;

Outcome seeded(const char* what, int n, const Check& fn, const char* items = nullptr) {
  std::size_t compared = 0;
  for (int seed = 0; seed < n; ++seed) {
    if (auto err = fn(seed, &compared); !err.empty()) return {false, err};
  }
  std::string detail = std::to_string(n) + " " + what + " matched";
  if (items) detail += " (" + std::to_string(compared) + " " + items + ")";
  return {true, detail};
}

Outcome planted_recovery() {
  auto c = base_config(30, "2022-01-03", "2022-10-01", "2023-01-02",
                       "ACQUIRED>EXTRACTED_FROM:UP:0.8:0.05;"
                       "PARTNERED>EXTRACTED_FROM:UP:0.5:0.05",
                       11);
  const auto gen = synth::generate(c.synth);
  auto data = pipeline::make_dataset(gen.entities, gen.triples, gen.prices);
  const auto train = pipeline::labels_in(data, c.train, 1);
  const auto bank = pipeline::mine_bank(data, train, c.mining);

  std::string detail;
  for (std::size_t r = 0; r < c.synth.rules.size(); ++r) {
    const auto& planted = c.synth.rules[r];
    std::size_t n = 0, hits = 0;
    for (const auto& f : gen.manifest.firings) {
      if (f.rule != r || !c.train.contains(f.date)) continue;
      ++n;
      hits += f.realized == planted.direction;
    }
    const double realized = static_cast<double>(hits) / static_cast<double>(n);
    const rules::Rule* mined = nullptr;
    for (const auto& rule : bank.rules()) {
      if (rule.body == planted.body && rule.direction == planted.direction) mined = &rule;
    }
    const std::string name = planted.body.front() + ">...";
    if (realized < c.mining.tau_mine) {
      if (mined) return {false, name + " realized " + fmt(realized) + " but stored"};
      detail += name + " realized " + fmt(realized) + " not stored; ";
      continue;
    }
    if (n < 200) return {false, name + " has only " + std::to_string(n) + " train firings"};
    if (!mined) return {false, name + " not mined"};
    const double half =
        2.5758293035489 * std::sqrt(realized * (1 - realized) / static_cast<double>(mined->support));
    if (std::abs(mined->confidence - realized) > half) {
      return {false, name + " conf " + fmt(mined->confidence) + " outside " +
                         fmt(realized) + " +/- " + fmt(half)};
    }
    detail += name + " conf " + fmt(mined->confidence) + " vs realized " + fmt(realized) +
              " +/- " + fmt(half) + " (" + std::to_string(n) + " firings); ";
  }
  return {true, detail};
}

rules::Rule mk_rule(rules::Body body, Direction dir, double conf) {
  const auto hits = static_cast<std::size_t>(std::lround(conf * 100));
  return {std::move(body), dir, 100, hits, static_cast<double>(hits) / 100.0};
}

Outcome ranking_suite() {
  // Rule completion beats better recency and hubness.
  {
    GraphSpec spec;
    spec.company("S", "SSS").company("A").company("B");
    spec.edge("S", "ACQUIRED", "A", "2022-01-01").edge("S", "PARTNERED", "B", "2022-05-30");
    for (int i = 0; i < 4; ++i) {
      spec.company("H" + std::to_string(i))
          .edge("A", "SELLS", "H" + std::to_string(i), "2022-01-01");
    }
    const auto g = spec.build();
    const rules::RuleBank bank({mk_rule({"ACQUIRED"}, Direction::kUp, 0.8),
                                mk_rule({"PARTNERED", "SELLS"}, Direction::kUp, 0.7)});
    const kg::Snapshot snap(g, d("2022-06-01"));
    explore::ExplorerConfig cfg;
    cfg.ablation.rule_guidance = false;
    const explore::Path root{{g.require("S")}, {}, {}};
    std::vector<explore::Path> cands;
    for (const auto& e : explore::admissible_extensions(snap, root, bank, cfg)) {
      cands.push_back(root.extended(e.step, e.target, g.relation_name(e.relation)));
    }
    const auto ranked = explore::score_candidates(cands, bank, snap, cfg);
    if (ranked.size() != 2 || ranked[0].path.relations != rules::Body{"ACQUIRED"} ||
        !(ranked[1].score.rec > ranked[0].score.rec) ||
        !(ranked[1].score.ahub > ranked[0].score.ahub)) {
      return {false, "rule-completing candidate not ranked first"};
    }
  }
  // Singleton and hash tie-break.
  {
    const auto g = GraphSpec{}
                       .company("S", "SSS")
                       .company("A")
                       .company("B")
                       .edge("S", "PARTNERED", "A", "2022-01-01")
                       .edge("S", "PARTNERED", "B", "2022-01-01")
                       .build();
    const rules::RuleBank bank({mk_rule({"PARTNERED"}, Direction::kUp, 0.7)});
    const kg::Snapshot snap(g, d("2022-06-01"));
    const explore::Path root{{g.require("S")}, {}, {}};
    std::vector<explore::Path> cands;
    for (const auto& e : explore::admissible_extensions(snap, root, bank, {})) {
      cands.push_back(root.extended(e.step, e.target, "PARTNERED"));
    }
    const auto single = explore::score_candidates(std::span(cands).first(1), bank, snap, {});
    if (single.size() != 1 || single[0].score.cov != 1.0 || single[0].score.rec != 1.0 ||
        single[0].score.ahub != 1.0) {
      return {false, "singleton percentile signals not 1.0"};
    }
    const auto ranked = explore::score_candidates(cands, bank, snap, {});
    std::reverse(cands.begin(), cands.end());
    const auto again = explore::score_candidates(cands, bank, snap, {});
    const auto h0 = oracle::fnv_path_hash(explore::node_uids(ranked[0].path, g));
    const auto h1 = oracle::fnv_path_hash(explore::node_uids(ranked[1].path, g));
    if (!(h0 < h1) || again[0].path != ranked[0].path) {
      return {false, "tie not broken by ascending path hash"};
    }
  }
  auto random = seeded("random candidate sets", 50, prop::ranking_equivalence, "ranked paths");
  if (!random.pass) return random;
  return {true, "3 examples and " + random.detail};
}

Outcome verdict_suite() {
  GraphSpec spec;
  spec.company("S", "SSS").company("X0").company("X1");
  spec.edge("S", "PARTNERED", "X0", "2022-01-01").edge("S", "PARTNERED", "X1", "2022-01-01");
  const auto g = spec.build();
  const kg::Snapshot snap(g, d("2022-06-01"));
  const auto s = g.require("S");
  auto hyp = [&](int spoke, Direction dir, double conf) {
    const auto t = g.out_edges(s)[spoke];
    explore::Hypothesis h;
    h.path = explore::Path{{s}, {}, {}}.extended({t, false}, g.edge(t).tail, "PARTNERED");
    h.rule = {{"PARTNERED"}, dir, 10, 7, conf};
    h.confidence = conf;
    h.direction = dir;
    return h;
  };
  const verdict::DefaultValidator validator;
  const std::vector<explore::Hypothesis> max_case{hyp(0, Direction::kUp, 0.8),
                                                  hyp(1, Direction::kDown, 0.7)};
  const auto v1 = verdict::decide(max_case, validator, snap, {});
  if (v1.direction != Direction::kUp || v1.confidence != 0.8) return {false, "max example"};
  const std::vector<explore::Hypothesis> tie{hyp(0, Direction::kDown, 0.65),
                                             hyp(1, Direction::kUp, 0.65)};
  const auto v2 = verdict::decide(tie, validator, snap, {});
  if (v2.direction != Direction::kUp || v2.confidence != 0.65) return {false, "tie example"};
  const auto v3 = verdict::decide({}, validator, snap, {});
  if (v3.direction != Direction::kDown || v3.confidence != 0.0 || !v3.evidence.empty()) {
    return {false, "empty example"};
  }
  auto random = seeded("random hypothesis sets", 1000,
                       [](std::uint64_t seed, std::size_t*) { return prop::verdict_laws(seed); });
  if (!random.pass) return random;
  return {true, "3 examples and " + random.detail};
}

Outcome metric_suite() {
  auto rel_close = [](double got, double want) {
    return std::abs(got - want) <= 1e-12 * std::abs(want);
  };
  const std::vector<double> fixture{0.10, -0.50};
  if (!rel_close(eval::total_return(fixture), -0.45)) return {false, "TotRet fixture"};
  if (!rel_close(eval::max_drawdown(fixture), -0.50)) return {false, "MaxDD fixture"};
  std::vector<double> zero_mean;
  for (int i = 0; i < 20; ++i) zero_mean.push_back(i % 2 ? -0.01 : 0.01);
  if (eval::sharpe_ratio(zero_mean) != 0.0) return {false, "Sharpe of zero-mean series"};
  try {
    const std::vector<double> constant(10, 0.002);
    eval::sharpe_ratio(constant);
    return {false, "constant series gave a Sharpe ratio"};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroVariance) return {false, "wrong error on constant series"};
  }

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 60);
    std::vector<market::Label> labels;
    std::vector<verdict::Verdict> preds;
    std::vector<std::pair<bool, bool>> pairs;
    for (int i = 0; i < n; ++i) {
      const bool actual = rng() & 1, predicted = rng() & 1;
      const std::string ticker = "T" + std::to_string(i);
      labels.push_back({ticker, d("2023-01-02"), 1, actual ? 0.01 : -0.01,
                        actual ? Direction::kUp : Direction::kDown});
      verdict::Verdict v;
      v.ticker = ticker;
      v.date = d("2023-01-02");
      v.direction = predicted ? Direction::kUp : Direction::kDown;
      preds.push_back(v);
      pairs.push_back({predicted, actual});
    }
    std::sort(labels.begin(), labels.end(),
              [](const auto& a, const auto& b) { return a.ticker < b.ticker; });
    const market::LabelTable table(labels, 0);
    const auto r = eval::classify_metrics(preds, table);
    const auto c = oracle::recount(pairs);
    const bool ok =
        r.tp == c.tp && r.fp == c.fp && r.tn == c.tn && r.fn == c.fn &&
        r.accuracy == static_cast<double>(c.tp + c.tn) / n &&
        (c.tp + c.fp == 0 || r.precision == static_cast<double>(c.tp) / (c.tp + c.fp)) &&
        (c.tp + c.fn == 0 || r.recall == static_cast<double>(c.tp) / (c.tp + c.fn)) &&
        (c.tp == 0 || r.f1 == static_cast<double>(2 * c.tp) / (2 * c.tp + c.fp + c.fn));
    if (!ok) return {false, "classification differs from recount in trial " + std::to_string(trial)};
  }
  return {true, "backtest fixture, Sharpe cases and 500 recounts exact"};
}

Outcome counterfactual_decline() {
  std::vector<double> ratios, acc, f1;
  double acc0 = 0, acc100 = 0, f10 = 0, f1100 = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto s = build(base_config(20, "2022-01-03", "2022-07-01", "2022-10-03",
                               "ACQUIRED>EXTRACTED_FROM:UP:0.85:0.08;"
                               "SUED>CAUSED_DECLINE>EXTRACTED_FROM:DOWN:0.85:0.06",
                               seed));
    const cf::SweepInputs in{s.data.graph, s.requests, s.run.verdicts, s.test, s.bank,
                             *s.plugins.selector, *s.plugins.validator,
                             s.config.explorer, s.config.verdict};
    if (!s.run.failures.empty()) return {false, "prediction failures in seed " + std::to_string(seed)};
    const std::vector<cf::MaskKind> kinds{cf::MaskKind::kText};
    const auto out = cf::sweep(in, kinds, cf::kDefaultRatios, seed, 1);
    for (const auto& row : out.rows) {
      ratios.push_back(row.ratio);
      acc.push_back(row.report.accuracy);
      f1.push_back(row.report.f1);
      if (row.ratio == 0) acc0 += row.report.accuracy / 5, f10 += row.report.f1 / 5;
      if (row.ratio == 100) acc100 += row.report.accuracy / 5, f1100 += row.report.f1 / 5;
    }
  }
  const double rho_acc = spearman(ratios, acc);
  const double rho_f1 = spearman(ratios, f1);
  const std::string detail = "accuracy " + fmt(acc0) + " -> " + fmt(acc100) + ", F1 " +
                             fmt(f10) + " -> " + fmt(f1100) + ", Spearman " + fmt(rho_acc) +
                             " / " + fmt(rho_f1);
  return {acc100 <= acc0 && f1100 <= f10 && rho_acc <= 0 && rho_f1 <= 0, detail};
}

Outcome multihop_ablation() {
  std::string detail;
  bool ok = true;
  double total = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = base_config(20, "2022-01-03", "2022-07-01", "2022-10-03",
                         "ACQUIRED>EXTRACTED_FROM:UP:0.85:0.1;"
                         "PARTNERED>SELLS>EXTRACTED_FROM:UP:0.85:0.08",
                         seed);
    auto s = build(c);
    const double full = eval::classify_metrics(s.run.verdicts, s.test).accuracy;
    apply_ablation(s.config, "no-multihop");
    s.predict();
    const double shallow = eval::classify_metrics(s.run.verdicts, s.test).accuracy;
    const double gain = 100 * (full - shallow);
    total += gain / 5;
    ok = ok && gain >= 5.0;
    detail += fmt(gain, 3) + " ";
  }
  return {ok, "accuracy gain in points per seed: " + detail + "(mean " + fmt(total, 3) + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& work) {
  std::string first[3];
  for (int rep = 0; rep < 2; ++rep) {
    RunConfig c = base_config(15, "2022-01-03", "2022-05-02", "2022-07-01",
                              "ACQUIRED>EXTRACTED_FROM:UP:0.8:0.06;"
                              "SUED>CAUSED_DECLINE>EXTRACTED_FROM:DOWN:0.8:0.04",
                              5);
    c.out_dir = work / ("determinism_" + std::to_string(rep));
    c.jobs = rep == 0 ? 1 : 2;
    c.backtest.basket_size = 5;
    fs::remove_all(c.out_dir);
    for (const char* cmd : {"synth", "mine", "predict", "evaluate", "counterfactual"}) {
      pipeline::run_command(cmd, c);
    }
    const char* files[] = {"verdicts.jsonl", "report.json", "counterfactual.csv"};
    for (int i = 0; i < 3; ++i) {
      const auto bytes = slurp(c.out_dir / files[i]);
      if (bytes.empty()) return {false, std::string(files[i]) + " empty"};
      if (rep == 0) {
        first[i] = bytes;
      } else if (bytes != first[i]) {
        return {false, std::string(files[i]) + " differs between runs"};
      }
    }
  }
  return {true, "verdicts.jsonl, report.json, counterfactual.csv identical (jobs 1 vs 2)"};
}

Outcome recency() {
  auto c = base_config(30, "2022-01-03", "2023-01-02", "2024-01-02",
                       "ACQUIRED>EXTRACTED_FROM:UP:0.8:0.06;"
                       "SUED>CAUSED_DECLINE>EXTRACTED_FROM:DOWN:0.8:0.04",
                       21);
  c.synth.recency_fraction = 0.7;
  const auto s = build(c);
  const auto stats = eval::interpretability_stats(s.run.verdicts, s.data.graph);
  std::size_t paths = 0;
  for (const auto& v : s.run.verdicts) paths += v.evidence.size();
  const double share = stats.recency_within_7d;
  return {std::abs(share - 0.70) <= 0.05,
          "within-7d share " + fmt(share) + " over " + std::to_string(paths) + " evidence paths"};
}

}  // namespace
}  // namespace tkgr

int main(int argc, char** argv) {
  using namespace tkgr;
  fs::path work = fs::temp_directory_path() / "tkgr_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--work") work = argv[i + 1];
  }
  fs::create_directories(work);

  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 = untimed
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "as-of leakage", 10, leakage},
      {2, "mining oracle equivalence", 60,
       [] { return seeded("random graphs", 200, prop::mining_equivalence, "rules"); }},
      {3, "planted-rule recovery", 0, planted_recovery},
      {4, "explorer exhaustive equivalence", 0,
       [] { return seeded("random graphs", 100, prop::explorer_equivalence, "hypotheses"); }},
      {5, "lexicographic ranking", 0, ranking_suite},
      {6, "verdict laws", 0, verdict_suite},
      {7, "metric oracles", 0, metric_suite},
      {8, "counterfactual degradation", 300, counterfactual_decline},
      {9, "multi-hop ablation", 0, multihop_ablation},
      {10, "determinism", 0, [&] { return determinism(work); }},
      {11, "interpretability recency", 0, recency},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.limit_s)) + " s budget";
    }
    failures += !o.pass;
    std::printf("%s %2d %-32s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
