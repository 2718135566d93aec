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
#include <string_view>
#include <vector>

#include "evaluation.hpp"

namespace tkgr::cf {

enum class MaskKind { kText, kEdge };

std::string_view to_string(MaskKind kind);  // "MaskText" / "MaskEdge"
// Accepts the names above and "text" / "edge". Throws Error{kConfig}.
MaskKind parse_mask_kind(std::string_view name);

struct Perturbation {
  MaskKind kind = MaskKind::kText;
  std::string ticker;
  Date date;
  std::vector<kg::TripleId> triples;
  std::vector<kg::NodeId> entities;
};

// Rebuilds an evidence path in `snap`. Uses the in-process path when present,
// otherwise matches consecutive node uids to a visible triple with the
// recorded relation. Throws Error{kUnknownEntity | kUnknownTriple}.
explore::Path resolve_path(const verdict::EvidenceItem& item,
                           const kg::Snapshot& snap);

// Top path = evidence[0]. Suppresses its TextSource (the terminal node, or
// the first anchoring one) plus the EXTRACTED_FROM edge joining it to the
// path. Throws Error{kNoTextEvidence}.
Perturbation mask_text(const verdict::Verdict& v, const kg::Snapshot& snap);

// Suppresses the first edge of the top path whose relation occurs in the
// matched rule body. Throws Error{kNoMatchedRule}.
Perturbation mask_edge(const verdict::Verdict& v, const kg::Snapshot& snap);

Perturbation make_perturbation(MaskKind kind, const verdict::Verdict& v,
                               const kg::Snapshot& snap);

inline const std::vector<int> kDefaultRatios = {0, 20, 40, 60, 80, 100};

struct SweepResult {
  MaskKind kind = MaskKind::kText;
  int ratio = 0;  // percent
  eval::ClassificationReport report;
  std::size_t n_perturbed = 0;
  std::size_t failures = 0;  // re-predictions that raised an Error
  std::uint64_t seed = 0;
};

struct SweepInputs {
  const kg::Graph& graph;
  std::span<const verdict::PredictRequest> requests;
  std::span<const verdict::Verdict> baseline;  // parallel to requests
  const market::LabelTable& labels;
  const rules::RuleBank& bank;
  const explore::RelationSelector& selector;
  const verdict::Validator& validator;
  const explore::ExplorerConfig& explorer_config;
  const verdict::VerdictConfig& verdict_config;
};

struct SweepOutput {
  std::vector<SweepResult> rows;
  // Per kind, instances excluded from the eligible pool (no evidence or no
  // constructible perturbation).
  std::vector<std::size_t> excluded;
  std::vector<std::size_t> eligible;
};

// For each kind and ratio r, perturbs floor(r * N / 100) instances sampled
// without replacement from the N eligible ones, using an independent stream
// derived from `seed`, and re-evaluates. Unselected instances keep their
// baseline verdict. Throws Error{kInvalidArgument} on mismatched inputs or
// ratios outside [0, 100].
SweepOutput sweep(const SweepInputs& in, std::span<const MaskKind> kinds,
                  std::span<const int> ratios, std::uint64_t seed,
                  unsigned jobs = 1);

void write_counterfactual_csv(std::ostream& os,
                              std::span<const SweepResult> rows,
                              const std::string* config_hash = nullptr);

}  // namespace tkgr::cf
