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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graph.hpp"

namespace tkgr::kg {

struct RejectedLine {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t entities_accepted = 0;
  std::size_t edges_accepted = 0;
  std::map<std::string, std::size_t> entities_per_kind;
  std::map<std::string, std::size_t> edges_per_relation;
  // Relation names outside the seeded registry (accepted, flagged).
  std::vector<std::string> unregistered_relations;
  std::vector<RejectedLine> rejected;

  nlohmann::ordered_json to_json() const;
};

struct GraphInput {
  std::vector<Entity> entities;
  std::vector<TemporalTriple> triples;
  IngestReport report;
};

nlohmann::ordered_json entity_to_json(const Entity& e);
nlohmann::ordered_json triple_to_json(const TemporalTriple& t);
// Throw ParseError on missing/ill-typed fields.
Entity entity_from_json(const nlohmann::json& j);
TemporalTriple triple_from_json(const nlohmann::json& j);

// Line-tolerant ingestion: malformed or inconsistent lines are rejected into
// the report, so the returned input always builds. Throws Error{kIo} when a
// file cannot be opened.
GraphInput read_graph_files(const std::filesystem::path& entities_path,
                            const std::filesystem::path& edges_path);
GraphInput read_graph_streams(std::istream& entities, std::istream& edges,
                              const std::string& entities_name = "entities",
                              const std::string& edges_name = "edges");

void write_entities_jsonl(std::ostream& os, std::span<const Entity> entities);
void write_edges_jsonl(std::ostream& os,
                       std::span<const TemporalTriple> triples);

}  // namespace tkgr::kg
