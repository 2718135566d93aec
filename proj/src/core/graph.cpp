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

#include "graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "error.hpp"

namespace tkgr::kg {

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::kTextSource: return "TextSource";
    case EntityKind::kEvent: return "Event";
    case EntityKind::kProduct: return "Product";
    case EntityKind::kFinancial: return "Financial";
    case EntityKind::kCompany: return "Company";
    case EntityKind::kPerson: return "Person";
  }
  return "Event";
}

std::optional<EntityKind> parse_entity_kind(std::string_view text) {
  for (auto kind : {EntityKind::kTextSource, EntityKind::kEvent,
                    EntityKind::kProduct, EntityKind::kFinancial,
                    EntityKind::kCompany, EntityKind::kPerson}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

const std::vector<std::string>& seeded_relations() {
  static const std::vector<std::string> kSeeded = {
      "EXTRACTED_FROM", "SELLS",     "INVESTED_IN", "CAUSED_INCREASE",
      "CAUSED_DECLINE", "PARTNERED", "DIVESTED",    "ACQUIRED",
      "WORKS_FOR",      "LICENSED",  "SETTLED",     "SUED"};
  return kSeeded;
}

bool is_seeded_relation(std::string_view name) {
  const auto& seeded = seeded_relations();
  return std::find(seeded.begin(), seeded.end(), name) != seeded.end();
}

bool is_valid_relation_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || c == '_';
  });
}

namespace {

void check_entity(const Entity& e) {
  if (e.uid.empty()) {
    throw Error(ErrorCode::kInvariantViolation, "entity with empty uid");
  }
  if (e.kind == EntityKind::kTextSource && !e.published_at) {
    throw Error(ErrorCode::kInvariantViolation,
                "TextSource '" + e.uid + "' has no published_at");
  }
  if (e.ticker && e.kind != EntityKind::kCompany) {
    throw Error(ErrorCode::kInvariantViolation,
                "ticker on non-Company entity '" + e.uid + "'");
  }
}

}  // namespace

Graph Graph::build(std::vector<Entity> entities,
                   std::vector<TemporalTriple> triples,
                   const BuildOptions& options) {
  Graph g;
  for (const auto& e : entities) check_entity(e);
  std::sort(entities.begin(), entities.end(),
            [](const Entity& a, const Entity& b) { return a.uid < b.uid; });
  for (std::size_t i = 1; i < entities.size(); ++i) {
    if (entities[i].uid == entities[i - 1].uid) {
      throw Error(ErrorCode::kDuplicateUid, entities[i].uid);
    }
  }
  g.entities_ = std::move(entities);
  g.uid_index_.reserve(g.entities_.size());
  for (NodeId i = 0; i < g.entities_.size(); ++i) {
    g.uid_index_.emplace(g.entities_[i].uid, i);
    if (const auto& ticker = g.entities_[i].ticker) {
      if (!g.ticker_index_.emplace(*ticker, i).second) {
        throw Error(ErrorCode::kInvariantViolation,
                    "ticker '" + *ticker + "' mapped to several companies");
      }
    }
  }

  std::set<std::string> names;
  for (const auto& t : triples) {
    if (!is_valid_relation_name(t.relation)) {
      throw Error(ErrorCode::kInvariantViolation,
                  "relation name '" + t.relation + "' must match [A-Z_]+");
    }
    names.insert(t.relation);
  }
  g.relation_names_.assign(names.begin(), names.end());

  g.edges_.reserve(triples.size());
  for (const auto& t : triples) {
    const auto head = g.find(t.head);
    if (!head) throw Error(ErrorCode::kDanglingEndpoint, t.head);
    const auto tail = g.find(t.tail);
    if (!tail) throw Error(ErrorCode::kDanglingEndpoint, t.tail);
    if (t.valid_to && *t.valid_to < t.valid_from) {
      throw Error(ErrorCode::kInvariantViolation,
                  "valid_to before valid_from on " + t.head + " " +
                      t.relation + " " + t.tail);
    }
    if (*head == *tail &&
        std::find(options.self_loop_relations.begin(),
                  options.self_loop_relations.end(),
                  t.relation) == options.self_loop_relations.end()) {
      throw Error(ErrorCode::kInvariantViolation,
                  "self-loop " + t.relation + " on " + t.head);
    }
    g.edges_.push_back(Edge{*head, *tail, *g.find_relation(t.relation),
                            t.valid_from, t.valid_to});
  }

  // CSR adjacency, sorted so that per-(node, relation) ranges are contiguous.
  const std::size_t n = g.entities_.size();
  auto build_index = [&](bool outgoing, std::vector<std::uint32_t>& offsets,
                         std::vector<TripleId>& index) {
    offsets.assign(n + 1, 0);
    for (const auto& e : g.edges_) ++offsets[(outgoing ? e.head : e.tail) + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    index.resize(g.edges_.size());
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (TripleId id = 0; id < g.edges_.size(); ++id) {
      const auto& e = g.edges_[id];
      index[cursor[outgoing ? e.head : e.tail]++] = id;
    }
    for (std::size_t v = 0; v < n; ++v) {
      std::sort(index.begin() + offsets[v], index.begin() + offsets[v + 1],
                [&](TripleId a, TripleId b) {
                  const auto& ea = g.edges_[a];
                  const auto& eb = g.edges_[b];
                  const NodeId oa = outgoing ? ea.tail : ea.head;
                  const NodeId ob = outgoing ? eb.tail : eb.head;
                  return std::tie(ea.relation, oa, ea.valid_from, a) <
                         std::tie(eb.relation, ob, eb.valid_from, b);
                });
    }
  };
  build_index(true, g.out_offsets_, g.out_index_);
  build_index(false, g.in_offsets_, g.in_index_);
  return g;
}

std::optional<NodeId> Graph::find(std::string_view uid) const {
  const auto it = uid_index_.find(std::string(uid));
  if (it == uid_index_.end()) return std::nullopt;
  return it->second;
}

NodeId Graph::require(std::string_view uid) const {
  if (auto id = find(uid)) return *id;
  throw Error(ErrorCode::kUnknownEntity, std::string(uid));
}

TemporalTriple Graph::triple(TripleId id) const {
  const Edge& e = edges_[id];
  return TemporalTriple{entities_[e.head].uid,
                        std::string(relation_name(e.relation)),
                        entities_[e.tail].uid, e.valid_from, e.valid_to};
}

std::optional<TripleId> Graph::find_triple(const TemporalTriple& t) const {
  const auto head = find(t.head);
  const auto tail = find(t.tail);
  const auto rel = find_relation(t.relation);
  if (!head || !tail || !rel) return std::nullopt;
  for (TripleId id : out_edges(*head, *rel)) {
    const Edge& e = edges_[id];
    if (e.tail == *tail && e.valid_from == t.valid_from &&
        e.valid_to == t.valid_to) {
      return id;
    }
  }
  return std::nullopt;
}

std::optional<RelationId> Graph::find_relation(std::string_view name) const {
  const auto it =
      std::lower_bound(relation_names_.begin(), relation_names_.end(), name);
  if (it == relation_names_.end() || *it != name) return std::nullopt;
  return static_cast<RelationId>(it - relation_names_.begin());
}

std::span<const TripleId> Graph::out_edges(NodeId id) const {
  return std::span<const TripleId>(out_index_)
      .subspan(out_offsets_[id], out_offsets_[id + 1] - out_offsets_[id]);
}

std::span<const TripleId> Graph::out_edges(NodeId id,
                                           RelationId relation) const {
  const auto all = out_edges(id);
  const auto lo = std::partition_point(all.begin(), all.end(), [&](TripleId t) {
    return edges_[t].relation < relation;
  });
  const auto hi = std::partition_point(lo, all.end(), [&](TripleId t) {
    return edges_[t].relation == relation;
  });
  return all.subspan(lo - all.begin(), hi - lo);
}

std::span<const TripleId> Graph::in_edges(NodeId id) const {
  return std::span<const TripleId>(in_index_)
      .subspan(in_offsets_[id], in_offsets_[id + 1] - in_offsets_[id]);
}

std::optional<NodeId> Graph::find_ticker(std::string_view ticker) const {
  const auto it = ticker_index_.find(std::string(ticker));
  if (it == ticker_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> Graph::stocks() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < entities_.size(); ++i) {
    if (entities_[i].kind == EntityKind::kCompany && entities_[i].ticker) {
      out.push_back(i);
    }
  }
  return out;
}

Snapshot Snapshot::without_time_filter() const {
  Snapshot copy = *this;
  copy.time_filtered_ = false;
  return copy;
}

bool Snapshot::triple_suppressed(TripleId id) const {
  return overlay_ && std::binary_search(overlay_->triples.begin(),
                                        overlay_->triples.end(), id);
}

bool Snapshot::entity_suppressed(NodeId id) const {
  return overlay_ && std::binary_search(overlay_->entities.begin(),
                                        overlay_->entities.end(), id);
}

bool Snapshot::node_visible(NodeId id) const {
  if (entity_suppressed(id)) return false;
  if (!time_filtered_) return true;
  const Entity& e = graph_->entity(id);
  return e.kind != EntityKind::kTextSource || *e.published_at <= as_of_;
}

bool Snapshot::edge_visible(TripleId id) const {
  const Edge& e = graph_->edge(id);
  if (time_filtered_ && !e.valid_at(as_of_)) return false;
  if (triple_suppressed(id)) return false;
  return node_visible(e.head) && node_visible(e.tail);
}

std::vector<Neighbor> Snapshot::neighbors(NodeId id,
                                          Direction direction) const {
  std::vector<Neighbor> out;
  if (!node_visible(id)) return out;
  auto collect = [&](std::span<const TripleId> edges, bool outgoing) {
    std::vector<Neighbor> part;
    for (TripleId t : edges) {
      if (!edge_visible(t)) continue;
      const Edge& e = graph_->edge(t);
      part.push_back(Neighbor{e.relation, outgoing ? e.tail : e.head, t,
                              outgoing});
    }
    return part;
  };
  if (direction == Direction::kOut) return collect(graph_->out_edges(id), true);
  if (direction == Direction::kIn) return collect(graph_->in_edges(id), false);
  auto outs = collect(graph_->out_edges(id), true);
  auto ins = collect(graph_->in_edges(id), false);
  out.reserve(outs.size() + ins.size());
  std::merge(outs.begin(), outs.end(), ins.begin(), ins.end(),
             std::back_inserter(out), [&](const Neighbor& a, const Neighbor& b) {
               const Date da = graph_->edge(a.triple).valid_from;
               const Date db = graph_->edge(b.triple).valid_from;
               return std::make_tuple(a.relation, a.node, da, !a.outgoing,
                                      a.triple) <
                      std::make_tuple(b.relation, b.node, db, !b.outgoing,
                                      b.triple);
             });
  return out;
}

std::vector<Neighbor> Snapshot::neighbors(std::string_view uid,
                                          Direction direction) const {
  return neighbors(graph_->require(uid), direction);
}

std::size_t Snapshot::degree(NodeId id) const {
  if (!node_visible(id)) return 0;
  std::size_t count = 0;
  for (TripleId t : graph_->out_edges(id)) count += edge_visible(t);
  for (TripleId t : graph_->in_edges(id)) count += edge_visible(t);
  return count;
}

std::size_t Snapshot::degree(std::string_view uid) const {
  return degree(graph_->require(uid));
}

Snapshot Snapshot::apply_deletions(std::span<const TripleId> triples,
                                   std::span<const NodeId> entities) const {
  for (TripleId t : triples) {
    if (t >= graph_->triple_count()) {
      throw Error(ErrorCode::kUnknownTriple,
                  "triple id " + std::to_string(t));
    }
  }
  for (NodeId n : entities) {
    if (n >= graph_->entity_count()) {
      throw Error(ErrorCode::kUnknownEntity,
                  "entity id " + std::to_string(n));
    }
  }
  auto merged = std::make_shared<Overlay>();
  if (overlay_) *merged = *overlay_;
  merged->triples.insert(merged->triples.end(), triples.begin(), triples.end());
  merged->entities.insert(merged->entities.end(), entities.begin(),
                          entities.end());
  for (auto* v : {&merged->triples, &merged->entities}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  Snapshot copy = *this;
  copy.overlay_ = std::move(merged);
  return copy;
}

}  // namespace tkgr::kg
