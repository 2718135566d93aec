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

#include "explorer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>

#include "error.hpp"
#include "util.hpp"

namespace tkgr::explore {

bool Path::contains(kg::NodeId n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

Path Path::extended(Step step, kg::NodeId target,
                    std::string_view relation) const {
  Path p = *this;
  p.nodes.push_back(target);
  p.steps.push_back(step);
  p.relations.emplace_back(relation);
  return p;
}

std::vector<std::string> node_uids(const Path& path, const kg::Graph& g) {
  std::vector<std::string> out;
  out.reserve(path.nodes.size());
  for (kg::NodeId n : path.nodes) out.push_back(g.entity(n).uid);
  return out;
}

std::vector<Date> edge_dates(const Path& path, const kg::Graph& g) {
  std::vector<Date> out;
  out.reserve(path.steps.size());
  for (const Step& s : path.steps) out.push_back(g.edge(s.triple).valid_from);
  return out;
}

bool terminal_is_text(const Path& path, const kg::Graph& g) {
  return !path.nodes.empty() && g.is_text_source(path.head());
}

std::uint64_t tiebreak_hash(std::span<const std::string> uids) {
  std::uint64_t h = kFnvOffsetBasis;
  for (std::size_t i = 0; i < uids.size(); ++i) {
    if (i > 0) h = fnv1a64("\x1f", h);
    h = fnv1a64(uids[i], h);
  }
  return h;
}

std::uint64_t tiebreak_hash(const Path& path, const kg::Graph& g) {
  std::uint64_t h = kFnvOffsetBasis;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    if (i > 0) h = fnv1a64("\x1f", h);
    h = fnv1a64(g.entity(path.nodes[i]).uid, h);
  }
  return h;
}

void ExplorerConfig::validate() const {
  if (beam_width < 1) throw Error(ErrorCode::kConfig, "beam_width must be >= 1");
  if (max_depth < 1) throw Error(ErrorCode::kConfig, "max_depth must be >= 1");
  if (max_depth > rules::kMaxBodyLength) {
    throw Error(ErrorCode::kConfig, "max_depth must be <= 4");
  }
  if (!(tau_hyp >= 0.0 && tau_hyp <= 1.0)) {
    throw Error(ErrorCode::kConfig, "tau_hyp must lie in [0, 1]");
  }
  if (text_seed_lookback_days < 0) {
    throw Error(ErrorCode::kConfig, "text_seed_lookback_days must be >= 0");
  }
}

kg::Snapshot effective_snapshot(const kg::Snapshot& snap,
                                const ExplorerConfig& config) {
  return config.ablation.temporal_constraints ? snap
                                              : snap.without_time_filter();
}

namespace {

// Visible neighbors of `node` that a path may step to, ignoring rules.
std::vector<kg::Neighbor> traversable_neighbors(const kg::Snapshot& snap,
                                                kg::NodeId node,
                                                const ExplorerConfig& config) {
  const kg::Graph& g = snap.graph();
  const auto extracted = g.find_relation(kg::kExtractedFrom);
  auto all = snap.neighbors(node, config.inverse_extracted_from
                                      ? kg::Direction::kBoth
                                      : kg::Direction::kOut);
  std::erase_if(all, [&](const kg::Neighbor& n) {
    return !n.outgoing && (!extracted || n.relation != *extracted);
  });
  return all;
}

}  // namespace

std::vector<Extension> admissible_extensions(const kg::Snapshot& snap,
                                             const Path& path,
                                             const rules::RuleBank& bank,
                                             const ExplorerConfig& config) {
  std::vector<Extension> out;
  const kg::Graph& g = snap.graph();
  if (path.length() >= config.effective_depth()) return out;
  if (path.length() > 0 && g.is_text_source(path.head())) return out;
  std::vector<std::string> relations = path.relations;
  relations.emplace_back();
  for (const auto& n : traversable_neighbors(snap, path.head(), config)) {
    if (path.contains(n.node)) continue;
    if (config.ablation.rule_guidance) {
      relations.back() = g.relation_name(n.relation);
      if (!bank.is_prefix(relations)) continue;
    }
    out.push_back(Extension{Step{n.triple, !n.outgoing}, n.node, n.relation});
  }
  return out;
}

std::vector<int> PassThroughSelector::score(
    const SelectionContext& context) const {
  return std::vector<int>(context.candidates.size(), 2);
}

std::vector<int> HeuristicSelector::score(
    const SelectionContext& context) const {
  std::map<std::string_view, std::size_t> freq;
  for (const auto& c : context.candidates) freq[c.relation] = c.relation_frequency;
  std::vector<std::size_t> counts;
  for (const auto& [rel, n] : freq) counts.push_back(n);
  std::sort(counts.rbegin(), counts.rend());
  std::size_t threshold = 0;
  if (!counts.empty()) {
    const auto cut = static_cast<std::size_t>(std::ceil(
        frequent_fraction_ * static_cast<double>(counts.size())));
    threshold = counts[std::clamp<std::size_t>(cut, 1, counts.size()) - 1];
  }
  std::vector<int> scores;
  scores.reserve(context.candidates.size());
  for (const auto& c : context.candidates) {
    const bool frequent = c.relation_frequency >= threshold;
    const bool recent = context.as_of - c.edge_date <= recency_days_;
    scores.push_back(int(frequent) + int(recent));
  }
  return scores;
}

bool ranks_before(const PathScore& a, const PathScore& b) {
  if (a.hyp != b.hyp) return a.hyp > b.hyp;
  if (a.cov != b.cov) return a.cov > b.cov;
  if (a.rec != b.rec) return a.rec > b.rec;
  if (a.ahub != b.ahub) return a.ahub > b.ahub;
  if (a.len != b.len) return a.len < b.len;
  return a.tiebreak_hash < b.tiebreak_hash;
}

std::vector<double> percentiles(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> out(n, 1.0);
  if (n <= 1) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // 1-based ranks i+1 .. j+1 share their average.
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      out[order[k]] = (avg_rank - 1.0) / static_cast<double>(n - 1);
    }
    i = j + 1;
  }
  return out;
}

std::vector<ScoredPath> score_candidates(std::span<const Path> candidates,
                                         const rules::RuleBank& bank,
                                         const kg::Snapshot& snap,
                                         const ExplorerConfig& config) {
  const kg::Graph& g = snap.graph();
  const std::size_t n = candidates.size();
  std::vector<ScoredPath> out(n);
  std::vector<double> cov(n), rec(n), ahub(n);
  std::map<kg::NodeId, std::size_t> degree_cache;
  auto degree = [&](kg::NodeId node) {
    auto [it, inserted] = degree_cache.try_emplace(node, 0);
    if (inserted) it->second = snap.degree(node);
    return it->second;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Path& p = candidates[i];
    PathScore& s = out[i].score;
    for (const rules::Rule* r : bank.exact_matches(p.relations)) {
      if (r->confidence >= config.tau_hyp) s.hyp = 1;
    }
    if (const auto shortest = bank.shortest_extension(p.relations)) {
      s.raw_cov = static_cast<double>(p.length()) /
                  static_cast<double>(std::max<std::size_t>(*shortest, 1));
    }
    Date freshest{std::numeric_limits<std::int32_t>::min()};
    for (const Step& st : p.steps) {
      freshest = std::max(freshest, g.edge(st.triple).valid_from);
    }
    if (terminal_is_text(p, g)) {
      freshest = std::max(freshest, *g.entity(p.head()).published_at);
    }
    s.raw_rec = freshest.days();
    std::size_t max_degree = 0;
    for (kg::NodeId node : p.nodes) max_degree = std::max(max_degree, degree(node));
    s.raw_ahub = -static_cast<std::int64_t>(max_degree);
    s.len = p.length();
    s.tiebreak_hash = tiebreak_hash(p, g);
    cov[i] = s.raw_cov;
    rec[i] = static_cast<double>(s.raw_rec);
    ahub[i] = static_cast<double>(s.raw_ahub);
    out[i].path = p;
    out[i].depth = p.length();
  }
  const auto cov_p = percentiles(cov);
  const auto rec_p = percentiles(rec);
  const auto ahub_p = percentiles(ahub);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].score.cov = cov_p[i];
    out[i].score.rec = rec_p[i];
    out[i].score.ahub = ahub_p[i];
  }
  std::sort(out.begin(), out.end(), [](const ScoredPath& a, const ScoredPath& b) {
    return ranks_before(a.score, b.score);
  });
  for (std::size_t i = 0; i < n; ++i) out[i].rank = i;
  return out;
}

std::vector<kg::NodeId> anchor_text_sources(const kg::Snapshot& snap,
                                            const Path& path) {
  const kg::Graph& g = snap.graph();
  std::vector<kg::NodeId> out;
  const auto extracted = g.find_relation(kg::kExtractedFrom);
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const kg::NodeId node = path.nodes[i];
    if (g.is_text_source(node)) {
      out.push_back(node);
      continue;
    }
    if (i == 0 || !extracted) continue;
    for (kg::TripleId t : g.out_edges(node, *extracted)) {
      if (!snap.edge_visible(t)) continue;
      const kg::NodeId tail = g.edge(t).tail;
      if (g.is_text_source(tail)) out.push_back(tail);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

struct BeamEntry {
  Path path;
  bool stopped = false;
};

std::vector<kg::NodeId> seed_nodes(const kg::Snapshot& snap, kg::NodeId stock,
                                   const ExplorerConfig& config) {
  if (config.seed_mode == SeedMode::kCompany) return {stock};
  const kg::Graph& g = snap.graph();
  std::vector<kg::NodeId> seeds;
  const auto extracted = g.find_relation(kg::kExtractedFrom);
  if (!extracted) return seeds;
  for (kg::TripleId t : g.out_edges(stock, *extracted)) {
    if (!snap.edge_visible(t)) continue;
    const kg::NodeId tail = g.edge(t).tail;
    if (!g.is_text_source(tail)) continue;
    const Date published = *g.entity(tail).published_at;
    if (snap.as_of() - published <= config.text_seed_lookback_days) {
      seeds.push_back(tail);
    }
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

}  // namespace

ExploreResult explore(const kg::Snapshot& snap, kg::NodeId stock,
                      const rules::RuleBank& bank,
                      const RelationSelector& selector,
                      const ExplorerConfig& config) {
  config.validate();
  const kg::Graph& g = snap.graph();
  if (stock >= g.entity_count() ||
      g.entity(stock).kind != kg::EntityKind::kCompany ||
      !snap.node_visible(stock)) {
    throw Error(ErrorCode::kUnknownEntity,
                stock < g.entity_count() ? g.entity(stock).uid
                                         : "node " + std::to_string(stock));
  }
  if (config.ablation.rule_guidance && bank.empty()) {
    throw Error(ErrorCode::kEmptyRuleBank, "rule guidance needs a rule bank");
  }

  const kg::Snapshot view = effective_snapshot(snap, config);
  const PassThroughSelector pass_through;
  const RelationSelector& active =
      config.ablation.llm_selection ? selector
                                    : static_cast<const RelationSelector&>(pass_through);

  ExploreResult result;
  std::vector<ScoredPath> all_scored;
  std::vector<BeamEntry> beam;
  for (kg::NodeId seed : seed_nodes(view, stock, config)) {
    beam.push_back(BeamEntry{Path{{seed}, {}, {}}, false});
  }

  for (std::size_t depth = 1; depth <= config.effective_depth(); ++depth) {
    std::vector<Path> survivors;
    for (const BeamEntry& entry : beam) {
      if (entry.stopped) continue;
      const auto exts = admissible_extensions(view, entry.path, bank, config);
      if (exts.empty()) continue;
      result.stats.candidates += exts.size();

      const auto head_neighbors =
          traversable_neighbors(view, entry.path.head(), config);
      std::map<kg::RelationId, std::size_t> freq;
      for (const auto& n : head_neighbors) ++freq[n.relation];
      std::vector<CandidateInfo> infos;
      infos.reserve(exts.size());
      for (const auto& e : exts) {
        infos.push_back(CandidateInfo{
            e.target, g.entity(e.target).kind, g.relation_name(e.relation),
            g.edge(e.step.triple).valid_from, view.degree(e.target),
            freq[e.relation]});
      }
      const SelectionContext ctx{view, entry.path, snap.as_of(),
                                 head_neighbors.size(), infos};
      const auto scores = active.score(ctx);
      if (scores.size() != exts.size()) {
        throw Error(ErrorCode::kInternal,
                    std::string(active.name()) + " returned wrong score count");
      }
      for (std::size_t i = 0; i < exts.size(); ++i) {
        if (scores[i] <= 0) {
          ++result.stats.selector_dropped;
          continue;
        }
        survivors.push_back(entry.path.extended(
            exts[i].step, exts[i].target, g.relation_name(exts[i].relation)));
      }
    }
    if (survivors.empty()) break;
    result.stats.depth_reached = depth;

    auto ranked = score_candidates(survivors, bank, view, config);
    for (ScoredPath& sp : ranked) {
      sp.depth = depth;
      std::vector<kg::NodeId> texts;
      bool anchored_checked = false;
      for (const rules::Rule* r : bank.exact_matches(sp.path.relations)) {
        if (!(r->confidence > config.tau_hyp)) continue;
        if (!anchored_checked) {
          texts = anchor_text_sources(view, sp.path);
          anchored_checked = true;
        }
        if (texts.empty()) break;
        result.hypotheses.push_back(
            Hypothesis{sp.path, *r, r->confidence, r->direction, texts});
        sp.forms_hypothesis = true;
      }
      if (sp.forms_hypothesis) ++result.stats.early_stops;
    }

    beam.clear();
    for (std::size_t i = 0; i < ranked.size() && i < config.beam_width; ++i) {
      beam.push_back(BeamEntry{ranked[i].path, ranked[i].forms_hypothesis});
    }
    for (auto& sp : ranked) all_scored.push_back(std::move(sp));
  }

  std::stable_sort(all_scored.begin(), all_scored.end(),
                   [](const ScoredPath& a, const ScoredPath& b) {
                     if (a.forms_hypothesis != b.forms_hypothesis) {
                       return a.forms_hypothesis;
                     }
                     if (a.depth != b.depth) return a.depth < b.depth;
                     return a.rank < b.rank;
                   });
  if (all_scored.size() > config.max_scored_paths) {
    all_scored.resize(config.max_scored_paths);
  }
  result.scored_paths = std::move(all_scored);
  return result;
}

}  // namespace tkgr::explore
