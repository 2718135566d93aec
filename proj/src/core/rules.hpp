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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graph.hpp"
#include "market.hpp"

namespace tkgr::rules {

using market::Direction;

// Relation-name sequence, 1..4 atoms.
using Body = std::vector<std::string>;

inline constexpr std::size_t kMaxBodyLength = 4;

struct Rule {
  Body body;
  Direction direction = Direction::kUp;
  std::size_t support = 0;  // labeled stock-day instances matching the body
  std::size_t hits = 0;     // of those, instances moving in `direction`
  double confidence = 0.0;  // hits / support

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct MiningConfig {
  double tau_mine = 0.60;
  std::size_t min_support = 5;
  std::size_t max_body_len = 4;
  int horizon = 1;
  // Single-relation bodies; off reproduces enumeration starting at 2 hops.
  bool unary_bodies = true;
  unsigned jobs = 1;

  // Throws Error{kConfig}.
  void validate() const;
};

// Canonical bank order: confidence desc, support desc, body lexicographic,
// UP before DOWN.
bool rule_order(const Rule& a, const Rule& b);

class RuleBank {
 public:
  RuleBank() = default;
  // Sorts into canonical order. Throws Error{kInvariantViolation} on duplicate
  // (body, direction) pairs, empty or over-long bodies, hits > support.
  explicit RuleBank(std::vector<Rule> rules);

  std::span<const Rule> rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  // Rules whose body starts with `prefix` (exact bodies included), in bank
  // order. The empty prefix matches every rule.
  std::vector<const Rule*> prefix_matches(std::span<const std::string> prefix) const;
  bool is_prefix(std::span<const std::string> prefix) const;
  // Shortest body length among rules extending `prefix`, if any.
  std::optional<std::size_t> shortest_extension(
      std::span<const std::string> prefix) const;
  // Rules whose body equals `relations` exactly, in bank order.
  std::vector<const Rule*> exact_matches(
      std::span<const std::string> relations) const;

  friend bool operator==(const RuleBank& a, const RuleBank& b) {
    return a.rules_ == b.rules_;
  }

 private:
  struct PrefixEntry {
    std::vector<std::size_t> rules;  // indices into rules_, ascending
    std::size_t shortest = 0;
  };

  const PrefixEntry* lookup(std::span<const std::string> prefix) const;

  std::vector<Rule> rules_;
  std::map<Body, PrefixEntry> prefix_index_;
};

// (stock, date) root of a rule-body grounding.
struct Instance {
  kg::NodeId stock;
  Date date;

  friend auto operator<=>(const Instance&, const Instance&) = default;
};

// Every forward relation sequence of length 1..max_body_len realized by a
// simple directed path rooted at a stock in some snapshot, mapped to the
// sorted set of (stock, as_of) instances realizing it. A TextSource ends a
// path. Length-1 bodies are included regardless of `unary_bodies`; mine()
// applies that switch.
std::map<Body, std::vector<Instance>> enumerate_bodies(
    std::span<const kg::Snapshot> snapshots,
    std::span<const kg::NodeId> stocks, const MiningConfig& config);

// Drops a rule when a strictly shorter same-direction rule whose body is a
// prefix of it has confidence >= its confidence. Returns canonical order.
std::vector<Rule> prune(std::vector<Rule> rules, const MiningConfig& config);

// Throws Error{kEmptyLabelTable}.
RuleBank mine(std::span<const kg::Snapshot> snapshots,
              std::span<const kg::NodeId> stocks,
              const market::LabelTable& labels, const MiningConfig& config);

nlohmann::ordered_json rule_to_json(const Rule& rule);
Rule rule_from_json(const nlohmann::json& j);

// JSON lines in canonical order. An optional first line `{"meta":{...}}`
// carries run metadata and is skipped by load_bank.
void save_bank(std::ostream& os, const RuleBank& bank,
               const nlohmann::ordered_json* meta = nullptr);
// Throws ParseError with the offending line number.
RuleBank load_bank(std::istream& is);
void save_bank_file(const std::filesystem::path& path, const RuleBank& bank,
                    const nlohmann::ordered_json* meta = nullptr);
RuleBank load_bank_file(const std::filesystem::path& path);

}  // namespace tkgr::rules
