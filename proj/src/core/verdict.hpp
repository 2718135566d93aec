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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "explorer.hpp"

namespace tkgr::verdict {

using market::Direction;

struct ValidationContext {
  const kg::Snapshot& snap;
  std::span<const kg::NodeId> text_sources;
};

struct Validation {
  Direction label = Direction::kUp;
  double plausibility = 0.5;  // in [0, 1]
};

// Judges one completed (path, rule) pair.
class Validator {
 public:
  virtual ~Validator() = default;
  virtual Validation validate(const ValidationContext& context,
                              const explore::Path& path,
                              const rules::Rule& rule) const = 0;
  virtual bool concurrent() const { return true; }
  virtual std::string_view name() const = 0;
};

// Deterministic lexical stand-in: label = rule direction; plausibility
// 0.5 + 0.5 * (consistent - inconsistent) / max(1, total) over direction
// cues from the path's relation names (CAUSED_INCREASE / CAUSED_DECLINE) and
// words in its TextSources' title and name.
class DefaultValidator final : public Validator {
 public:
  Validation validate(const ValidationContext& context,
                      const explore::Path& path,
                      const rules::Rule& rule) const override;
  std::string_view name() const override { return "lexical"; }
};

enum class Aggregation { kMax, kSingleBest };

struct VerdictConfig {
  std::size_t evidence_budget = 5;  // M
  double alpha = 0.5;               // fusion weight on rule confidence
  Aggregation aggregation = Aggregation::kMax;
  int horizon = 1;

  // Throws Error{kConfig}.
  void validate() const;
};

// Portable evidence record; `path` is in-process only and empty after
// deserialization.
struct EvidenceItem {
  std::vector<std::string> nodes;
  std::vector<std::string> relations;
  rules::Rule rule;
  double rule_confidence = 0.0;
  Direction validator_label = Direction::kUp;
  double plausibility = 0.5;
  std::vector<std::string> text_sources;
  std::uint64_t tiebreak_hash = 0;
  explore::Path path;
};

struct Verdict {
  std::string ticker;
  Date date;
  int horizon = 1;
  Direction direction = Direction::kDown;
  double confidence = 0.0;
  std::vector<EvidenceItem> evidence;
  // Search summary.
  std::size_t hypotheses = 0;
  std::size_t rule_patterns = 0;  // distinct rule bodies among hypotheses
  std::size_t scored_paths = 0;
  std::size_t scored_rule_matched = 0;  // scored paths equal to a rule body
};

// Max-per-direction aggregation with ties going UP; empty input yields
// (DOWN, 0, no evidence). Evidence keeps validator-agreeing hypotheses of the
// verdict direction ranked by alpha*conf + (1-alpha)*p, ties by path hash.
// Ticker and date are left for the caller.
Verdict decide(std::span<const explore::Hypothesis> hypotheses,
               const Validator& validator, const kg::Snapshot& snap,
               const VerdictConfig& config);

struct PredictRequest {
  kg::NodeId stock;
  Date date;
};

struct PredictFailure {
  std::string ticker;
  Date date;
  ErrorCode code;
  std::string message;
};

struct PredictionRun {
  std::vector<Verdict> verdicts;  // request order
  std::vector<PredictFailure> failures;
};

// explore + decide for one instance on a prepared snapshot.
Verdict predict_one(const kg::Snapshot& snap, kg::NodeId stock,
                    const rules::RuleBank& bank,
                    const explore::RelationSelector& selector,
                    const Validator& validator,
                    const explore::ExplorerConfig& explorer_config,
                    const VerdictConfig& verdict_config);

// Walk-forward prediction, one as-of snapshot per request date. Requests
// failing with a library Error are skipped and reported. Plugins declaring
// themselves serial are called under a lock; results do not depend on jobs.
PredictionRun predict_all(const kg::Graph& graph,
                          std::span<const PredictRequest> requests,
                          const rules::RuleBank& bank,
                          const explore::RelationSelector& selector,
                          const Validator& validator,
                          const explore::ExplorerConfig& explorer_config,
                          const VerdictConfig& verdict_config,
                          unsigned jobs = 1);

nlohmann::ordered_json verdict_to_json(const Verdict& v);
// Throws ParseError.
Verdict verdict_from_json(const nlohmann::json& j);

void write_verdicts_jsonl(std::ostream& os, std::span<const Verdict> verdicts,
                          const nlohmann::ordered_json* meta = nullptr);
// Skips a leading meta line. Throws ParseError with the line number.
std::vector<Verdict> read_verdicts_jsonl(std::istream& is);

}  // namespace tkgr::verdict
