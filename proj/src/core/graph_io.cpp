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

#include "graph_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "error.hpp"

namespace tkgr::kg {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(0, std::string("missing field '") + key + "'");
  }
  return *it;
}

std::string string_field(const nlohmann::json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) {
    throw ParseError(0, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& j,
                                           const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ParseError(0, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

nlohmann::ordered_json entity_to_json(const Entity& e) {
  nlohmann::ordered_json j;
  j["uid"] = e.uid;
  j["kind"] = to_string(e.kind);
  j["name"] = e.name;
  if (e.ticker) j["ticker"] = *e.ticker;
  if (e.published_at) j["published_at"] = e.published_at->iso();
  if (!e.metadata.empty()) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : e.metadata) meta[k] = v;
    j["metadata"] = std::move(meta);
  }
  return j;
}

nlohmann::ordered_json triple_to_json(const TemporalTriple& t) {
  nlohmann::ordered_json j;
  j["head"] = t.head;
  j["relation"] = t.relation;
  j["tail"] = t.tail;
  j["valid_from"] = t.valid_from.iso();
  if (t.valid_to) j["valid_to"] = t.valid_to->iso();
  return j;
}

Entity entity_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError(0, "expected a JSON object");
  Entity e;
  e.uid = string_field(j, "uid");
  const std::string kind = string_field(j, "kind");
  const auto parsed = parse_entity_kind(kind);
  if (!parsed) throw ParseError(0, "unknown entity kind '" + kind + "'");
  e.kind = *parsed;
  e.name = string_field(j, "name");
  e.ticker = optional_string(j, "ticker");
  if (auto published = optional_string(j, "published_at")) {
    e.published_at = Date::parse(*published);
  }
  if (const auto it = j.find("metadata"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw ParseError(0, "metadata must be an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) {
        throw ParseError(0, "metadata value for '" + k + "' must be a string");
      }
      e.metadata.emplace(k, v.get<std::string>());
    }
  }
  return e;
}

TemporalTriple triple_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError(0, "expected a JSON object");
  TemporalTriple t;
  t.head = string_field(j, "head");
  t.relation = string_field(j, "relation");
  t.tail = string_field(j, "tail");
  t.valid_from = Date::parse(string_field(j, "valid_from"));
  if (auto to = optional_string(j, "valid_to")) t.valid_to = Date::parse(*to);
  return t;
}

nlohmann::ordered_json IngestReport::to_json() const {
  nlohmann::ordered_json j;
  j["entities_accepted"] = entities_accepted;
  j["edges_accepted"] = edges_accepted;
  j["entities_per_kind"] = entities_per_kind;
  j["edges_per_relation"] = edges_per_relation;
  j["unregistered_relations"] = unregistered_relations;
  auto rejected_json = nlohmann::ordered_json::array();
  for (const auto& r : rejected) {
    rejected_json.push_back(
        {{"file", r.file}, {"line", r.line}, {"reason", r.reason}});
  }
  j["rejected"] = std::move(rejected_json);
  return j;
}

GraphInput read_graph_streams(std::istream& entities, std::istream& edges,
                              const std::string& entities_name,
                              const std::string& edges_name) {
  GraphInput in;
  auto& report = in.report;
  std::unordered_set<std::string> uids;
  std::unordered_set<std::string> text_sources;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(entities, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Entity e = entity_from_json(nlohmann::json::parse(line));
      if (e.uid.empty()) throw ParseError(0, "empty uid");
      if (e.kind == EntityKind::kTextSource && !e.published_at) {
        throw ParseError(0, "TextSource without published_at");
      }
      if (e.kind != EntityKind::kTextSource && e.published_at) {
        throw ParseError(0, "published_at on non-TextSource");
      }
      if (e.ticker && e.kind != EntityKind::kCompany) {
        throw ParseError(0, "ticker on non-Company");
      }
      if (!uids.insert(e.uid).second) {
        throw ParseError(0, "duplicate uid '" + e.uid + "'");
      }
      ++report.entities_per_kind[std::string(to_string(e.kind))];
      in.entities.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      report.rejected.push_back({entities_name, line_no, ex.what()});
    } catch (const ParseError& ex) {
      report.rejected.push_back({entities_name, line_no, ex.what()});
    }
  }
  report.entities_accepted = in.entities.size();

  std::set<std::string> unregistered;
  line_no = 0;
  while (std::getline(edges, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      TemporalTriple t = triple_from_json(nlohmann::json::parse(line));
      if (!is_valid_relation_name(t.relation)) {
        throw ParseError(0, "relation '" + t.relation + "' must match [A-Z_]+");
      }
      if (!uids.contains(t.head)) {
        throw ParseError(0, "dangling endpoint '" + t.head + "'");
      }
      if (!uids.contains(t.tail)) {
        throw ParseError(0, "dangling endpoint '" + t.tail + "'");
      }
      if (t.head == t.tail) throw ParseError(0, "self-loop");
      if (t.valid_to && *t.valid_to < t.valid_from) {
        throw ParseError(0, "valid_to before valid_from");
      }
      if (!is_seeded_relation(t.relation)) unregistered.insert(t.relation);
      ++report.edges_per_relation[t.relation];
      in.triples.push_back(std::move(t));
    } catch (const nlohmann::json::exception& ex) {
      report.rejected.push_back({edges_name, line_no, ex.what()});
    } catch (const ParseError& ex) {
      report.rejected.push_back({edges_name, line_no, ex.what()});
    }
  }
  report.edges_accepted = in.triples.size();
  report.unregistered_relations.assign(unregistered.begin(), unregistered.end());
  return in;
}

GraphInput read_graph_files(const std::filesystem::path& entities_path,
                            const std::filesystem::path& edges_path) {
  std::ifstream entities(entities_path);
  if (!entities) {
    throw Error(ErrorCode::kIo, "cannot open " + entities_path.string());
  }
  std::ifstream edges(edges_path);
  if (!edges) throw Error(ErrorCode::kIo, "cannot open " + edges_path.string());
  return read_graph_streams(entities, edges, entities_path.filename().string(),
                            edges_path.filename().string());
}

void write_entities_jsonl(std::ostream& os, std::span<const Entity> entities) {
  for (const auto& e : entities) os << entity_to_json(e).dump() << '\n';
}

void write_edges_jsonl(std::ostream& os,
                       std::span<const TemporalTriple> triples) {
  for (const auto& t : triples) os << triple_to_json(t).dump() << '\n';
}

}  // namespace tkgr::kg
