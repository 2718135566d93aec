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

#include "rules.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "error.hpp"
#include "util.hpp"

namespace tkgr::rules {

void MiningConfig::validate() const {
  if (!(tau_mine >= 0.0 && tau_mine <= 1.0)) {
    throw Error(ErrorCode::kConfig, "tau_mine must lie in [0, 1]");
  }
  if (min_support < 1) throw Error(ErrorCode::kConfig, "min_support must be >= 1");
  if (max_body_len < 1 || max_body_len > kMaxBodyLength) {
    throw Error(ErrorCode::kConfig, "max_body_len must lie in [1, 4]");
  }
  if (horizon < 1) throw Error(ErrorCode::kConfig, "horizon must be >= 1");
}

bool rule_order(const Rule& a, const Rule& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.support != b.support) return a.support > b.support;
  if (a.body != b.body) return a.body < b.body;
  return a.direction > b.direction;  // UP first
}

RuleBank::RuleBank(std::vector<Rule> rules) : rules_(std::move(rules)) {
  std::set<std::pair<Body, Direction>> seen;
  for (const auto& r : rules_) {
    if (r.body.empty() || r.body.size() > kMaxBodyLength) {
      throw Error(ErrorCode::kInvariantViolation, "rule body length must be 1..4");
    }
    if (r.hits > r.support) {
      throw Error(ErrorCode::kInvariantViolation, "rule hits exceed support");
    }
    if (!seen.emplace(r.body, r.direction).second) {
      throw Error(ErrorCode::kInvariantViolation,
                  "duplicate rule body/direction");
    }
  }
  std::sort(rules_.begin(), rules_.end(), rule_order);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Body& body = rules_[i].body;
    for (std::size_t len = 0; len <= body.size(); ++len) {
      auto& entry = prefix_index_[Body(body.begin(), body.begin() + len)];
      if (entry.rules.empty() || body.size() < entry.shortest) {
        entry.shortest = body.size();
      }
      entry.rules.push_back(i);
    }
  }
}

const RuleBank::PrefixEntry* RuleBank::lookup(
    std::span<const std::string> prefix) const {
  const auto it = prefix_index_.find(Body(prefix.begin(), prefix.end()));
  return it == prefix_index_.end() ? nullptr : &it->second;
}

std::vector<const Rule*> RuleBank::prefix_matches(
    std::span<const std::string> prefix) const {
  std::vector<const Rule*> out;
  if (const auto* entry = lookup(prefix)) {
    for (std::size_t i : entry->rules) out.push_back(&rules_[i]);
  }
  return out;
}

bool RuleBank::is_prefix(std::span<const std::string> prefix) const {
  return lookup(prefix) != nullptr;
}

std::optional<std::size_t> RuleBank::shortest_extension(
    std::span<const std::string> prefix) const {
  if (const auto* entry = lookup(prefix)) return entry->shortest;
  return std::nullopt;
}

std::vector<const Rule*> RuleBank::exact_matches(
    std::span<const std::string> relations) const {
  std::vector<const Rule*> out;
  if (const auto* entry = lookup(relations)) {
    for (std::size_t i : entry->rules) {
      if (rules_[i].body.size() == relations.size()) out.push_back(&rules_[i]);
    }
  }
  return out;
}

namespace {

// Bodies of up to four relations packed into 16-bit lanes of (id + 1).
using PackedBody = std::uint64_t;

PackedBody push_relation(PackedBody body, std::size_t depth,
                         kg::RelationId rel) {
  return body | (static_cast<PackedBody>(rel + 1) << (16 * depth));
}

Body unpack(PackedBody packed, const kg::Graph& g) {
  Body body;
  for (std::size_t d = 0; d < kMaxBodyLength; ++d) {
    const auto lane = static_cast<std::uint16_t>(packed >> (16 * d));
    if (lane == 0) break;
    body.emplace_back(g.relation_name(static_cast<kg::RelationId>(lane - 1)));
  }
  return body;
}

void collect_bodies(const kg::Snapshot& snap, kg::NodeId node,
                    std::size_t depth, std::size_t max_len, PackedBody body,
                    std::vector<kg::NodeId>& on_path,
                    std::vector<PackedBody>& out) {
  if (depth == max_len) return;
  const kg::Graph& g = snap.graph();
  for (kg::TripleId t : g.out_edges(node)) {
    if (!snap.edge_visible(t)) continue;
    const kg::Edge& e = g.edge(t);
    if (std::find(on_path.begin(), on_path.end(), e.tail) != on_path.end()) {
      continue;
    }
    const PackedBody next = push_relation(body, depth, e.relation);
    out.push_back(next);
    // Articles end a path, as they do during exploration.
    if (g.is_text_source(e.tail)) continue;
    on_path.push_back(e.tail);
    collect_bodies(snap, e.tail, depth + 1, max_len, next, on_path, out);
    on_path.pop_back();
  }
}

}  // namespace

std::map<Body, std::vector<Instance>> enumerate_bodies(
    std::span<const kg::Snapshot> snapshots,
    std::span<const kg::NodeId> stocks, const MiningConfig& config) {
  config.validate();
  std::map<Body, std::vector<Instance>> result;
  if (snapshots.empty() || stocks.empty()) return result;
  const kg::Graph& g = snapshots.front().graph();
  const std::size_t roots = snapshots.size() * stocks.size();
  std::vector<std::vector<PackedBody>> per_root(roots);
  parallel_for(roots, config.jobs, [&](std::size_t i) {
    const kg::Snapshot& snap = snapshots[i / stocks.size()];
    const kg::NodeId stock = stocks[i % stocks.size()];
    if (!snap.node_visible(stock)) return;
    std::vector<kg::NodeId> on_path{stock};
    auto& bodies = per_root[i];
    collect_bodies(snap, stock, 0, config.max_body_len, 0, on_path, bodies);
    std::sort(bodies.begin(), bodies.end());
    bodies.erase(std::unique(bodies.begin(), bodies.end()), bodies.end());
  });
  std::map<PackedBody, std::vector<Instance>> packed;
  for (std::size_t i = 0; i < roots; ++i) {
    const Instance inst{stocks[i % stocks.size()],
                        snapshots[i / stocks.size()].as_of()};
    for (PackedBody b : per_root[i]) packed[b].push_back(inst);
  }
  for (auto& [key, instances] : packed) {
    std::sort(instances.begin(), instances.end());
    instances.erase(std::unique(instances.begin(), instances.end()),
                    instances.end());
    result.emplace(unpack(key, g), std::move(instances));
  }
  return result;
}

std::vector<Rule> prune(std::vector<Rule> rules, const MiningConfig& config) {
  std::vector<Rule> kept;
  for (const auto& r : rules) {
    if (r.support < config.min_support) continue;
    const bool subsumed =
        std::any_of(rules.begin(), rules.end(), [&](const Rule& s) {
          return s.direction == r.direction && s.body.size() < r.body.size() &&
                 s.support >= config.min_support &&
                 std::equal(s.body.begin(), s.body.end(), r.body.begin()) &&
                 s.confidence >= r.confidence;
        });
    if (!subsumed) kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end(), rule_order);
  return kept;
}

RuleBank mine(std::span<const kg::Snapshot> snapshots,
              std::span<const kg::NodeId> stocks,
              const market::LabelTable& labels, const MiningConfig& config) {
  config.validate();
  if (labels.empty()) {
    throw Error(ErrorCode::kEmptyLabelTable, "no labels to mine against");
  }
  std::vector<Rule> candidates;
  if (snapshots.empty()) return RuleBank{};
  const kg::Graph& g = snapshots.front().graph();
  for (const auto& [body, instances] :
       enumerate_bodies(snapshots, stocks, config)) {
    if (body.size() == 1 && !config.unary_bodies) continue;
    std::size_t support = 0;
    std::size_t up = 0;
    for (const auto& inst : instances) {
      const auto& ticker = g.entity(inst.stock).ticker;
      if (!ticker) continue;
      const market::Label* l = labels.find(*ticker, inst.date);
      if (!l || l->horizon != config.horizon) continue;
      ++support;
      up += l->direction == Direction::kUp;
    }
    if (support < config.min_support) continue;
    for (const auto dir : {Direction::kUp, Direction::kDown}) {
      const std::size_t hits = dir == Direction::kUp ? up : support - up;
      const double conf =
          static_cast<double>(hits) / static_cast<double>(support);
      if (conf >= config.tau_mine) {
        candidates.push_back(Rule{body, dir, support, hits, conf});
      }
    }
  }
  return RuleBank(prune(std::move(candidates), config));
}

nlohmann::ordered_json rule_to_json(const Rule& rule) {
  nlohmann::ordered_json j;
  j["body"] = rule.body;
  j["direction"] = market::to_string(rule.direction);
  j["support"] = rule.support;
  j["hits"] = rule.hits;
  j["confidence"] = rule.confidence;
  return j;
}

Rule rule_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError(0, "expected a JSON object");
  Rule r;
  const auto& body = j.at("body");
  if (!body.is_array() || body.empty()) {
    throw ParseError(0, "body must be a non-empty array");
  }
  for (const auto& rel : body) {
    if (!rel.is_string() || !kg::is_valid_relation_name(rel.get<std::string>())) {
      throw ParseError(0, "body atoms must be relation names");
    }
    r.body.push_back(rel.get<std::string>());
  }
  const auto dir = market::parse_direction(j.at("direction").get<std::string>());
  if (!dir) throw ParseError(0, "direction must be UP or DOWN");
  r.direction = *dir;
  r.support = j.at("support").get<std::size_t>();
  r.hits = j.at("hits").get<std::size_t>();
  r.confidence = j.at("confidence").get<double>();
  if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
    throw ParseError(0, "confidence must lie in [0, 1]");
  }
  return r;
}

void save_bank(std::ostream& os, const RuleBank& bank,
               const nlohmann::ordered_json* meta) {
  if (meta) os << nlohmann::ordered_json{{"meta", *meta}}.dump() << '\n';
  for (const auto& r : bank.rules()) os << rule_to_json(r).dump() << '\n';
}

RuleBank load_bank(std::istream& is) {
  std::vector<Rule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (line_no == 1 && j.is_object() && j.contains("meta")) continue;
      rules.push_back(rule_from_json(j));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(line_no, ex.what());
    } catch (const ParseError& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
  try {
    return RuleBank(std::move(rules));
  } catch (const Error& ex) {
    throw ParseError(0, ex.what());
  }
}

void save_bank_file(const std::filesystem::path& path, const RuleBank& bank,
                    const nlohmann::ordered_json* meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  save_bank(os, bank, meta);
}

RuleBank load_bank_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load_bank(is);
}

}  // namespace tkgr::rules
