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

#include "verdict.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <unordered_set>

#include "error.hpp"
#include "util.hpp"

namespace tkgr::verdict {

namespace {

const std::unordered_set<std::string>& up_words() {
  static const std::unordered_set<std::string> kWords = {
      "increase", "increases", "increased", "rise",     "rises",
      "rose",     "surge",     "surges",    "surged",   "gain",
      "gains",    "beat",      "beats",     "upgrade",  "upgraded",
      "growth",   "record",    "soar",      "soars",    "rally",
      "rallies",  "up"};
  return kWords;
}

const std::unordered_set<std::string>& down_words() {
  static const std::unordered_set<std::string> kWords = {
      "decline",   "declines",   "declined", "fall",     "falls",
      "fell",      "drop",       "drops",    "dropped",  "miss",
      "misses",    "downgrade",  "downgraded", "loss",   "losses",
      "lawsuit",   "sued",       "plunge",   "plunges",  "slump",
      "slumps",    "down"};
  return kWords;
}

void count_words(std::string_view text, int& up, int& down) {
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (up_words().contains(word)) ++up;
    if (down_words().contains(word)) ++down;
    word.clear();
  };
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
}

}  // namespace

Validation DefaultValidator::validate(const ValidationContext& context,
                                      const explore::Path& path,
                                      const rules::Rule& rule) const {
  int up = 0;
  int down = 0;
  for (const auto& rel : path.relations) {
    if (rel == "CAUSED_INCREASE") ++up;
    if (rel == "CAUSED_DECLINE") ++down;
  }
  const kg::Graph& g = context.snap.graph();
  for (kg::NodeId t : context.text_sources) {
    const kg::Entity& e = g.entity(t);
    if (const auto it = e.metadata.find("title"); it != e.metadata.end()) {
      count_words(it->second, up, down);
    }
    count_words(e.name, up, down);
  }
  const int consistent = rule.direction == Direction::kUp ? up : down;
  const int inconsistent = rule.direction == Direction::kUp ? down : up;
  const int total = consistent + inconsistent;
  const double p = 0.5 + 0.5 * static_cast<double>(consistent - inconsistent) /
                             static_cast<double>(std::max(1, total));
  return Validation{rule.direction, std::clamp(p, 0.0, 1.0)};
}

void VerdictConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kConfig, "alpha must lie in [0, 1]");
  }
  if (horizon < 1) throw Error(ErrorCode::kConfig, "horizon must be >= 1");
}

Verdict decide(std::span<const explore::Hypothesis> hypotheses,
               const Validator& validator, const kg::Snapshot& snap,
               const VerdictConfig& config) {
  config.validate();
  Verdict v;
  v.horizon = config.horizon;
  v.hypotheses = hypotheses.size();
  {
    std::set<rules::Body> bodies;
    for (const auto& h : hypotheses) bodies.insert(h.rule.body);
    v.rule_patterns = bodies.size();
  }
  if (hypotheses.empty()) return v;

  std::span<const explore::Hypothesis> pool = hypotheses;
  if (config.aggregation == Aggregation::kSingleBest) {
    pool = hypotheses.first(1);
  }
  double conf_up = 0.0;
  double conf_down = 0.0;
  for (const auto& h : pool) {
    double& slot = h.direction == Direction::kUp ? conf_up : conf_down;
    slot = std::max(slot, h.confidence);
  }
  v.direction = conf_up >= conf_down ? Direction::kUp : Direction::kDown;
  v.confidence = v.direction == Direction::kUp ? conf_up : conf_down;

  const kg::Graph& g = snap.graph();
  std::vector<EvidenceItem> items;
  for (const auto& h : pool) {
    if (h.direction != v.direction) continue;
    const ValidationContext ctx{snap, h.text_sources};
    const Validation val = validator.validate(ctx, h.path, h.rule);
    if (val.label != h.direction) continue;
    EvidenceItem item;
    item.nodes = explore::node_uids(h.path, g);
    item.relations = h.path.relations;
    item.rule = h.rule;
    item.rule_confidence = h.confidence;
    item.validator_label = val.label;
    item.plausibility = std::clamp(val.plausibility, 0.0, 1.0);
    for (kg::NodeId t : h.text_sources) item.text_sources.push_back(g.entity(t).uid);
    item.tiebreak_hash = explore::tiebreak_hash(item.nodes);
    item.path = h.path;
    items.push_back(std::move(item));
  }
  const double alpha = config.alpha;
  auto fused = [alpha](const EvidenceItem& e) {
    return alpha * e.rule_confidence + (1.0 - alpha) * e.plausibility;
  };
  std::stable_sort(items.begin(), items.end(),
                   [&](const EvidenceItem& a, const EvidenceItem& b) {
                     const double fa = fused(a);
                     const double fb = fused(b);
                     if (fa != fb) return fa > fb;
                     return a.tiebreak_hash < b.tiebreak_hash;
                   });
  if (items.size() > config.evidence_budget) items.resize(config.evidence_budget);
  v.evidence = std::move(items);
  return v;
}

Verdict predict_one(const kg::Snapshot& snap, kg::NodeId stock,
                    const rules::RuleBank& bank,
                    const explore::RelationSelector& selector,
                    const Validator& validator,
                    const explore::ExplorerConfig& explorer_config,
                    const VerdictConfig& verdict_config) {
  const auto result =
      explore::explore(snap, stock, bank, selector, explorer_config);
  const kg::Snapshot view = explore::effective_snapshot(snap, explorer_config);
  Verdict v = decide(result.hypotheses, validator, view, verdict_config);
  const kg::Graph& g = snap.graph();
  v.ticker = g.entity(stock).ticker.value_or(g.entity(stock).uid);
  v.date = snap.as_of();
  v.scored_paths = result.scored_paths.size();
  for (const auto& sp : result.scored_paths) {
    if (!bank.exact_matches(sp.path.relations).empty()) ++v.scored_rule_matched;
  }
  return v;
}

namespace {

class SerializedSelector final : public explore::RelationSelector {
 public:
  explicit SerializedSelector(const explore::RelationSelector& inner)
      : inner_(inner) {}
  std::vector<int> score(const explore::SelectionContext& ctx) const override {
    std::lock_guard lock(mu_);
    return inner_.score(ctx);
  }
  std::string_view name() const override { return inner_.name(); }

 private:
  const explore::RelationSelector& inner_;
  mutable std::mutex mu_;
};

class SerializedValidator final : public Validator {
 public:
  explicit SerializedValidator(const Validator& inner) : inner_(inner) {}
  Validation validate(const ValidationContext& ctx, const explore::Path& path,
                      const rules::Rule& rule) const override {
    std::lock_guard lock(mu_);
    return inner_.validate(ctx, path, rule);
  }
  std::string_view name() const override { return inner_.name(); }

 private:
  const Validator& inner_;
  mutable std::mutex mu_;
};

}  // namespace

PredictionRun predict_all(const kg::Graph& graph,
                          std::span<const PredictRequest> requests,
                          const rules::RuleBank& bank,
                          const explore::RelationSelector& selector,
                          const Validator& validator,
                          const explore::ExplorerConfig& explorer_config,
                          const VerdictConfig& verdict_config, unsigned jobs) {
  explorer_config.validate();
  verdict_config.validate();
  const SerializedSelector serial_selector(selector);
  const SerializedValidator serial_validator(validator);
  const explore::RelationSelector& sel =
      selector.concurrent() ? selector : serial_selector;
  const Validator& val = validator.concurrent() ? validator : serial_validator;

  std::vector<std::optional<Verdict>> slots(requests.size());
  std::vector<std::optional<PredictFailure>> errors(requests.size());
  parallel_for(requests.size(), jobs, [&](std::size_t i) {
    const auto& req = requests[i];
    try {
      const kg::Snapshot snap(graph, req.date);
      slots[i] = predict_one(snap, req.stock, bank, sel, val, explorer_config,
                             verdict_config);
    } catch (const Error& ex) {
      const auto& e = graph.entity(req.stock);
      errors[i] = PredictFailure{e.ticker.value_or(e.uid), req.date, ex.code(),
                                 ex.what()};
    }
  });
  PredictionRun run;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (slots[i]) run.verdicts.push_back(std::move(*slots[i]));
    if (errors[i]) run.failures.push_back(std::move(*errors[i]));
  }
  return run;
}

nlohmann::ordered_json verdict_to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["ticker"] = v.ticker;
  j["date"] = v.date.iso();
  j["horizon"] = v.horizon;
  j["direction"] = market::to_string(v.direction);
  j["confidence"] = v.confidence;
  auto evidence = nlohmann::ordered_json::array();
  for (const auto& e : v.evidence) {
    nlohmann::ordered_json item;
    item["nodes"] = e.nodes;
    item["relations"] = e.relations;
    item["rule"] = rules::rule_to_json(e.rule);
    item["conf"] = e.rule_confidence;
    item["p"] = e.plausibility;
    item["label"] = market::to_string(e.validator_label);
    item["text_sources"] = e.text_sources;
    evidence.push_back(std::move(item));
  }
  j["evidence"] = std::move(evidence);
  j["hypotheses"] = v.hypotheses;
  j["rule_patterns"] = v.rule_patterns;
  j["scored_paths"] = v.scored_paths;
  j["scored_rule_matched"] = v.scored_rule_matched;
  return j;
}

Verdict verdict_from_json(const nlohmann::json& j) {
  try {
    Verdict v;
    v.ticker = j.at("ticker").get<std::string>();
    v.date = Date::parse(j.at("date").get<std::string>());
    v.horizon = j.at("horizon").get<int>();
    const auto dir = market::parse_direction(j.at("direction").get<std::string>());
    if (!dir) throw ParseError(0, "direction must be UP or DOWN");
    v.direction = *dir;
    v.confidence = j.at("confidence").get<double>();
    for (const auto& item : j.at("evidence")) {
      EvidenceItem e;
      e.nodes = item.at("nodes").get<std::vector<std::string>>();
      e.relations = item.at("relations").get<std::vector<std::string>>();
      e.rule = rules::rule_from_json(item.at("rule"));
      e.rule_confidence = item.at("conf").get<double>();
      e.plausibility = item.at("p").get<double>();
      e.validator_label = e.rule.direction;
      if (const auto it = item.find("label"); it != item.end()) {
        if (auto l = market::parse_direction(it->get<std::string>())) {
          e.validator_label = *l;
        }
      }
      if (const auto it = item.find("text_sources"); it != item.end()) {
        e.text_sources = it->get<std::vector<std::string>>();
      }
      e.tiebreak_hash = explore::tiebreak_hash(e.nodes);
      v.evidence.push_back(std::move(e));
    }
    v.hypotheses = j.value("hypotheses", v.evidence.size());
    v.rule_patterns = j.value("rule_patterns", std::size_t{0});
    v.scored_paths = j.value("scored_paths", std::size_t{0});
    v.scored_rule_matched = j.value("scored_rule_matched", std::size_t{0});
    return v;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(0, ex.what());
  }
}

void write_verdicts_jsonl(std::ostream& os, std::span<const Verdict> verdicts,
                          const nlohmann::ordered_json* meta) {
  if (meta) os << nlohmann::ordered_json{{"meta", *meta}}.dump() << '\n';
  for (const auto& v : verdicts) os << verdict_to_json(v).dump() << '\n';
}

std::vector<Verdict> read_verdicts_jsonl(std::istream& is) {
  std::vector<Verdict> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (line_no == 1 && j.is_object() && j.contains("meta")) continue;
      out.push_back(verdict_from_json(j));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(line_no, ex.what());
    } catch (const ParseError& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
  return out;
}

}  // namespace tkgr::verdict
