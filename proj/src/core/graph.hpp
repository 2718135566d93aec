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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "date.hpp"

namespace tkgr::kg {

enum class EntityKind : std::uint8_t {
  kTextSource,
  kEvent,
  kProduct,
  kFinancial,
  kCompany,
  kPerson,
};

std::string_view to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view text);

struct Entity {
  std::string uid;
  EntityKind kind = EntityKind::kEvent;
  std::string name;
  std::optional<std::string> ticker;  // Company only
  std::optional<Date> published_at;   // TextSource only, required there
  std::map<std::string, std::string> metadata;

  friend bool operator==(const Entity&, const Entity&) = default;
};

// Relation names form an open registry; these are the seeded members.
const std::vector<std::string>& seeded_relations();
bool is_seeded_relation(std::string_view name);
// Matches [A-Z_]+.
bool is_valid_relation_name(std::string_view name);

inline constexpr std::string_view kExtractedFrom = "EXTRACTED_FROM";

struct TemporalTriple {
  std::string head;
  std::string relation;
  std::string tail;
  Date valid_from;
  std::optional<Date> valid_to;

  friend bool operator==(const TemporalTriple&, const TemporalTriple&) =
      default;
};

// Ids are dense indices. NodeIds follow uid order and RelationIds follow name
// order, so integer comparisons reproduce the lexicographic orderings.
using NodeId = std::uint32_t;
using TripleId = std::uint32_t;
using RelationId = std::uint16_t;

struct Edge {
  NodeId head;
  NodeId tail;
  RelationId relation;
  Date valid_from;
  std::optional<Date> valid_to;

  bool valid_at(Date d) const {
    return valid_from <= d && (!valid_to || *valid_to >= d);
  }
};

struct BuildOptions {
  // Relations permitted to form head == tail triples.
  std::vector<std::string> self_loop_relations;
};

// Temporal knowledge graph; immutable once built.
class Graph {
 public:
  // Throws Error{kDuplicateUid | kDanglingEndpoint | kInvariantViolation}.
  static Graph build(std::vector<Entity> entities,
                     std::vector<TemporalTriple> triples,
                     const BuildOptions& options = {});

  Graph() = default;

  std::size_t entity_count() const { return entities_.size(); }
  std::size_t triple_count() const { return edges_.size(); }
  std::size_t relation_count() const { return relation_names_.size(); }

  std::optional<NodeId> find(std::string_view uid) const;
  // Throws Error{kUnknownEntity}.
  NodeId require(std::string_view uid) const;
  const Entity& entity(NodeId id) const { return entities_[id]; }
  std::span<const Entity> entities() const { return entities_; }
  bool is_text_source(NodeId id) const {
    return entities_[id].kind == EntityKind::kTextSource;
  }

  const Edge& edge(TripleId id) const { return edges_[id]; }
  TemporalTriple triple(TripleId id) const;
  std::optional<TripleId> find_triple(const TemporalTriple& t) const;

  std::string_view relation_name(RelationId id) const {
    return relation_names_[id];
  }
  std::optional<RelationId> find_relation(std::string_view name) const;
  std::span<const std::string> relation_names() const {
    return relation_names_;
  }

  // Sorted by (relation name, tail uid, valid_from, id).
  std::span<const TripleId> out_edges(NodeId id) const;
  std::span<const TripleId> out_edges(NodeId id, RelationId relation) const;
  // Sorted by (relation name, head uid, valid_from, id).
  std::span<const TripleId> in_edges(NodeId id) const;

  std::optional<NodeId> find_ticker(std::string_view ticker) const;
  // Company nodes that carry a ticker, in uid order.
  std::vector<NodeId> stocks() const;

 private:
  std::vector<Entity> entities_;
  std::unordered_map<std::string, NodeId> uid_index_;
  std::unordered_map<std::string, NodeId> ticker_index_;
  std::vector<Edge> edges_;
  std::vector<std::string> relation_names_;
  std::vector<std::uint32_t> out_offsets_;
  std::vector<TripleId> out_index_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<TripleId> in_index_;
};

enum class Direction { kOut, kIn, kBoth };

struct Neighbor {
  RelationId relation;
  NodeId node;  // the endpoint other than the queried node
  TripleId triple;
  bool outgoing;
};

// As-of view over a Graph. Non-owning: the Graph must outlive every Snapshot
// derived from it. Snapshots are cheap values; deletion overlays are shared
// immutable state.
class Snapshot {
 public:
  Snapshot(const Graph& graph, Date as_of) : graph_(&graph), as_of_(as_of) {}

  const Graph& graph() const { return *graph_; }
  Date as_of() const { return as_of_; }
  bool time_filtered() const { return time_filtered_; }

  // Same overlay, no as-of filtering (temporal-constraint ablation).
  Snapshot without_time_filter() const;

  bool node_visible(NodeId id) const;
  bool edge_visible(TripleId id) const;

  // Sorted by (relation name, other uid, valid_from, outgoing first).
  std::vector<Neighbor> neighbors(NodeId id, Direction direction) const;
  // Throws Error{kUnknownEntity}.
  std::vector<Neighbor> neighbors(std::string_view uid,
                                  Direction direction) const;

  std::size_t degree(NodeId id) const;
  std::size_t degree(std::string_view uid) const;

  // Throws Error{kUnknownTriple | kUnknownEntity} for out-of-range ids.
  Snapshot apply_deletions(std::span<const TripleId> triples,
                           std::span<const NodeId> entities) const;

  bool triple_suppressed(TripleId id) const;
  bool entity_suppressed(NodeId id) const;

 private:
  struct Overlay {
    std::vector<TripleId> triples;  // sorted, unique
    std::vector<NodeId> entities;   // sorted, unique
  };

  const Graph* graph_;
  Date as_of_;
  bool time_filtered_ = true;
  std::shared_ptr<const Overlay> overlay_;
};

}  // namespace tkgr::kg
