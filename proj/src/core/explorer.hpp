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

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graph.hpp"
#include "rules.hpp"

namespace tkgr::explore {

using market::Direction;

struct Step {
  kg::TripleId triple;
  bool inverse = false;  // traversed tail -> head

  friend bool operator==(const Step&, const Step&) = default;
};

// Alternating node/relation chain rooted at the seed. relations[i] labels
// steps[i], which joins nodes[i] and nodes[i + 1].
struct Path {
  std::vector<kg::NodeId> nodes;
  std::vector<Step> steps;
  std::vector<std::string> relations;

  std::size_t length() const { return steps.size(); }
  kg::NodeId head() const { return nodes.back(); }
  bool contains(kg::NodeId n) const;
  Path extended(Step step, kg::NodeId target, std::string_view relation) const;

  friend bool operator==(const Path&, const Path&) = default;
};

std::vector<std::string> node_uids(const Path& path, const kg::Graph& g);
std::vector<Date> edge_dates(const Path& path, const kg::Graph& g);
bool terminal_is_text(const Path& path, const kg::Graph& g);

// FNV-1a 64 over the node uids joined by 0x1F.
std::uint64_t tiebreak_hash(std::span<const std::string> node_uids);
std::uint64_t tiebreak_hash(const Path& path, const kg::Graph& g);

enum class SeedMode { kCompany, kTextSource };

struct AblationFlags {
  bool temporal_constraints = true;
  bool rule_guidance = true;
  bool multi_hop = true;
  bool llm_selection = true;

  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct ExplorerConfig {
  std::size_t beam_width = 8;
  std::size_t max_depth = 3;
  double tau_hyp = 0.60;
  std::size_t max_scored_paths = 10;
  SeedMode seed_mode = SeedMode::kCompany;
  // text_source seeding: TextSources linked to the stock and published at
  // most this many days before as_of.
  int text_seed_lookback_days = 7;
  // Incoming EXTRACTED_FROM edges may be traversed backwards.
  bool inverse_extracted_from = true;
  AblationFlags ablation;

  // Throws Error{kConfig}.
  void validate() const;
  std::size_t effective_depth() const {
    return ablation.multi_hop ? max_depth : 1;
  }
};

// Snapshot the search actually reads: the as-of view, or the unfiltered view
// when temporal constraints are ablated.
kg::Snapshot effective_snapshot(const kg::Snapshot& snap,
                                const ExplorerConfig& config);

struct Extension {
  Step step;
  kg::NodeId target;
  kg::RelationId relation;
};

// One-hop extensions of `path` that keep it simple, respect the depth limit,
// stay visible in `snap` and (under rule guidance) keep the relation sequence
// a prefix of some rule body. TextSource nodes past the seed are terminal.
// `snap` is used as given; pass effective_snapshot() for the ablation view.
std::vector<Extension> admissible_extensions(const kg::Snapshot& snap,
                                             const Path& path,
                                             const rules::RuleBank& bank,
                                             const ExplorerConfig& config);

// ---- relation selection plugins ----

struct CandidateInfo {
  kg::NodeId target;
  kg::EntityKind target_kind;
  std::string_view relation;
  Date edge_date;                  // valid_from of the traversed edge
  std::size_t target_degree;       // visible degree
  std::size_t relation_frequency;  // head neighbors sharing this relation
};

struct SelectionContext {
  const kg::Snapshot& snap;
  const Path& parent;
  Date as_of;
  std::size_t head_neighbor_count;
  std::span<const CandidateInfo> candidates;
};

// Scores candidate one-hop extensions in {0, 1, 2}; 0 drops the candidate.
class RelationSelector {
 public:
  virtual ~RelationSelector() = default;
  virtual std::vector<int> score(const SelectionContext& context) const = 0;
  // false: the engine serializes calls.
  virtual bool concurrent() const { return true; }
  virtual std::string_view name() const = 0;
};

// Scores every candidate 2.
class PassThroughSelector final : public RelationSelector {
 public:
  std::vector<int> score(const SelectionContext& context) const override;
  std::string_view name() const override { return "pass-through"; }
};

// 2 = frequent relation AND recent edge, 1 = either, 0 = neither. A relation
// is frequent when its count among the head's neighbors reaches the count at
// the top-tercile cut of distinct relations; an edge is recent when its
// valid_from lies within `recency_days` of as_of.
class HeuristicSelector final : public RelationSelector {
 public:
  explicit HeuristicSelector(int recency_days = 30,
                             double frequent_fraction = 1.0 / 3.0)
      : recency_days_(recency_days), frequent_fraction_(frequent_fraction) {}

  std::vector<int> score(const SelectionContext& context) const override;
  std::string_view name() const override { return "heuristic"; }

 private:
  int recency_days_;
  double frequent_fraction_;
};

// ---- scoring ----

struct PathScore {
  int hyp = 0;
  double cov = 0.0;
  double rec = 0.0;
  double ahub = 0.0;
  std::size_t len = 0;
  std::uint64_t tiebreak_hash = 0;
  // Unscaled signals, kept for reports.
  double raw_cov = 0.0;
  std::int32_t raw_rec = 0;     // freshest date on the path, days since epoch
  std::int64_t raw_ahub = 0;    // -max visible degree on the path
};

// Ascending lexicographic key (-hyp, -cov, -rec, -ahub, len, hash).
bool ranks_before(const PathScore& a, const PathScore& b);

// Average-rank percentiles: (rank - 1) / (n - 1), 1.0 when n == 1.
std::vector<double> percentiles(std::span<const double> values);

struct ScoredPath {
  Path path;
  PathScore score;
  std::size_t depth = 0;
  std::size_t rank = 0;  // 0-based within its depth
  bool forms_hypothesis = false;
};

// Ranks same-depth candidates by the lexicographic key.
std::vector<ScoredPath> score_candidates(std::span<const Path> candidates,
                                         const rules::RuleBank& bank,
                                         const kg::Snapshot& snap,
                                         const ExplorerConfig& config);

// ---- search ----

struct Hypothesis {
  Path path;
  rules::Rule rule;
  double confidence = 0.0;
  Direction direction = Direction::kUp;
  std::vector<kg::NodeId> text_sources;  // ascending
};

// TextSources evidencing a path: any TextSource on it, plus TextSources that
// a non-seed node points to via a visible EXTRACTED_FROM edge.
std::vector<kg::NodeId> anchor_text_sources(const kg::Snapshot& snap,
                                            const Path& path);

struct ExploreStats {
  std::size_t candidates = 0;
  std::size_t selector_dropped = 0;
  std::size_t early_stops = 0;
  std::size_t depth_reached = 0;
};

struct ExploreResult {
  std::vector<Hypothesis> hypotheses;  // (depth, rank, bank) order
  std::vector<ScoredPath> scored_paths;  // hypotheses first, capped
  ExploreStats stats;
};

// Rule-guided beam search from `stock`. Throws Error{kUnknownEntity} when the
// stock is not a visible Company and Error{kEmptyRuleBank} when rule guidance
// is on with an empty bank.
ExploreResult explore(const kg::Snapshot& snap, kg::NodeId stock,
                      const rules::RuleBank& bank,
                      const RelationSelector& selector,
                      const ExplorerConfig& config);

}  // namespace tkgr::explore
