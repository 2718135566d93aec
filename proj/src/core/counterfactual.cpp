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

#include "counterfactual.hpp"

#include <algorithm>
#include <ostream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "error.hpp"
#include "util.hpp"

namespace tkgr::cf {

std::string_view to_string(MaskKind kind) {
  return kind == MaskKind::kText ? "MaskText" : "MaskEdge";
}

MaskKind parse_mask_kind(std::string_view name) {
  if (name == "MaskText" || name == "text") return MaskKind::kText;
  if (name == "MaskEdge" || name == "edge") return MaskKind::kEdge;
  throw Error(ErrorCode::kConfig,
              "unknown mask kind '" + std::string(name) + "'");
}

explore::Path resolve_path(const verdict::EvidenceItem& item,
                           const kg::Snapshot& snap) {
  if (!item.path.nodes.empty()) return item.path;
  const kg::Graph& g = snap.graph();
  if (item.nodes.empty() || item.relations.size() + 1 != item.nodes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "malformed evidence path");
  }
  explore::Path path;
  path.nodes.push_back(g.require(item.nodes.front()));
  for (std::size_t i = 0; i < item.relations.size(); ++i) {
    const kg::NodeId from = path.nodes.back();
    const kg::NodeId to = g.require(item.nodes[i + 1]);
    const auto rel = g.find_relation(item.relations[i]);
    std::optional<explore::Step> found;
    if (rel) {
      for (const auto& nb : snap.neighbors(from, kg::Direction::kBoth)) {
        if (nb.relation == *rel && nb.node == to) {
          found = explore::Step{nb.triple, !nb.outgoing};
          break;
        }
      }
    }
    if (!found) {
      throw Error(ErrorCode::kUnknownTriple,
                  "no visible " + item.relations[i] + " triple between " +
                      item.nodes[i] + " and " + item.nodes[i + 1]);
    }
    path = path.extended(*found, to, item.relations[i]);
  }
  return path;
}

namespace {

const verdict::EvidenceItem& top_item(const verdict::Verdict& v,
                                      ErrorCode missing) {
  if (v.evidence.empty()) {
    throw Error(missing, "verdict for " + v.ticker + " on " + v.date.iso() +
                             " has no evidence");
  }
  return v.evidence.front();
}

Perturbation blank(MaskKind kind, const verdict::Verdict& v) {
  Perturbation p;
  p.kind = kind;
  p.ticker = v.ticker;
  p.date = v.date;
  return p;
}

}  // namespace

Perturbation mask_text(const verdict::Verdict& v, const kg::Snapshot& snap) {
  const auto& item = top_item(v, ErrorCode::kNoTextEvidence);
  const kg::Graph& g = snap.graph();
  const auto path = resolve_path(item, snap);
  auto p = blank(MaskKind::kText, v);

  // A TextSource on the path itself is always its terminal node, except for
  // a text seed at position 0.
  for (std::size_t i = path.nodes.size(); i-- > 0;) {
    if (!g.is_text_source(path.nodes[i])) continue;
    p.entities.push_back(path.nodes[i]);
    if (i > 0) p.triples.push_back(path.steps[i - 1].triple);
    else if (!path.steps.empty()) p.triples.push_back(path.steps[0].triple);
    return p;
  }

  const auto extracted = g.find_relation(kg::kExtractedFrom);
  for (const auto& uid : item.text_sources) {
    const auto text = g.find(uid);
    if (!text || !extracted) continue;
    // Prefer the anchoring edge from a non-seed node, as the explorer does.
    std::optional<kg::TripleId> edge;
    for (std::size_t i = path.nodes.size(); i-- > 0 && !edge;) {
      for (const auto& nb : snap.neighbors(path.nodes[i], kg::Direction::kBoth)) {
        if (nb.relation == *extracted && nb.node == *text) {
          edge = nb.triple;
          break;
        }
      }
    }
    p.entities.push_back(*text);
    if (edge) p.triples.push_back(*edge);
    return p;
  }
  throw Error(ErrorCode::kNoTextEvidence,
              "top path for " + v.ticker + " on " + v.date.iso() +
                  " has no TextSource");
}

Perturbation mask_edge(const verdict::Verdict& v, const kg::Snapshot& snap) {
  const auto& item = top_item(v, ErrorCode::kNoMatchedRule);
  const auto& body = item.rule.body;
  if (body.empty()) {
    throw Error(ErrorCode::kNoMatchedRule,
                "top path for " + v.ticker + " on " + v.date.iso() +
                    " has no matched rule");
  }
  const auto path = resolve_path(item, snap);
  auto p = blank(MaskKind::kEdge, v);
  for (const auto& relation : body) {
    for (std::size_t i = 0; i < path.relations.size(); ++i) {
      if (path.relations[i] == relation) {
        p.triples.push_back(path.steps[i].triple);
        return p;
      }
    }
  }
  throw Error(ErrorCode::kNoMatchedRule,
              "no edge of the top path occurs in its rule body");
}

Perturbation make_perturbation(MaskKind kind, const verdict::Verdict& v,
                               const kg::Snapshot& snap) {
  return kind == MaskKind::kText ? mask_text(v, snap) : mask_edge(v, snap);
}

namespace {

kg::Snapshot base_snapshot(const SweepInputs& in, std::size_t i) {
  return kg::Snapshot(in.graph, in.requests[i].date);
}

// Partial Fisher-Yates; returns the chosen pool positions in ascending order.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t k,
                                                    std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  boost::random::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    boost::random::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

SweepOutput sweep(const SweepInputs& in, std::span<const MaskKind> kinds,
                  std::span<const int> ratios, std::uint64_t seed,
                  unsigned jobs) {
  if (in.baseline.size() != in.requests.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "baseline verdicts do not match requests");
  }
  for (int r : ratios) {
    if (r < 0 || r > 100) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mask ratio " + std::to_string(r) + " outside [0, 100]");
    }
  }
  SweepOutput out;
  for (MaskKind kind : kinds) {
    // Eligible pool and its perturbations, in request order.
    std::vector<std::size_t> pool;
    std::vector<Perturbation> perturbations;
    std::size_t excluded = 0;
    for (std::size_t i = 0; i < in.requests.size(); ++i) {
      try {
        auto snap = base_snapshot(in, i);
        if (!in.explorer_config.ablation.temporal_constraints) {
          snap = snap.without_time_filter();
        }
        perturbations.push_back(make_perturbation(kind, in.baseline[i], snap));
        pool.push_back(i);
      } catch (const Error&) {
        ++excluded;
      }
    }
    out.eligible.push_back(pool.size());
    out.excluded.push_back(excluded);

    for (int ratio : ratios) {
      const std::size_t k =
          static_cast<std::size_t>(ratio) * pool.size() / 100;
      const auto stream = derive_seed(
          seed, "counterfactual/" + std::string(to_string(kind)) + "/" +
                    std::to_string(ratio));
      const auto chosen = sample_without_replacement(pool.size(), k, stream);

      std::vector<verdict::Verdict> verdicts(in.baseline.begin(),
                                             in.baseline.end());
      std::vector<char> failed(chosen.size(), 0);
      parallel_for(chosen.size(), jobs, [&](std::size_t c) {
        const std::size_t i = pool[chosen[c]];
        const auto& pert = perturbations[chosen[c]];
        try {
          const auto snap = base_snapshot(in, i).apply_deletions(
              pert.triples, pert.entities);
          auto v = verdict::predict_one(snap, in.requests[i].stock, in.bank,
                                        in.selector, in.validator,
                                        in.explorer_config, in.verdict_config);
          verdicts[i] = std::move(v);
        } catch (const Error&) {
          failed[c] = 1;
        }
      });

      SweepResult row;
      row.kind = kind;
      row.ratio = ratio;
      row.n_perturbed = k;
      row.seed = seed;
      std::vector<verdict::Verdict> kept;
      kept.reserve(verdicts.size());
      std::vector<char> drop(verdicts.size(), 0);
      for (std::size_t c = 0; c < chosen.size(); ++c) {
        if (failed[c]) {
          drop[pool[chosen[c]]] = 1;
          ++row.failures;
        }
      }
      for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (!drop[i]) kept.push_back(std::move(verdicts[i]));
      }
      row.report = eval::classify_metrics(kept, in.labels);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

void write_counterfactual_csv(std::ostream& os,
                              std::span<const SweepResult> rows,
                              const std::string* config_hash) {
  if (config_hash) os << "# config_hash=" << *config_hash << '\n';
  os << "kind,ratio,accuracy,f1,n_perturbed,seed\n";
  for (const auto& r : rows) {
    os << to_string(r.kind) << ',' << r.ratio << ','
       << format_double(r.report.accuracy) << ',' << format_double(r.report.f1)
       << ',' << r.n_perturbed << ',' << r.seed << '\n';
  }
}

}  // namespace tkgr::cf
