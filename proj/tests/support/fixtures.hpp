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

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graph.hpp"

namespace tkgr::testing {

inline Date d(const char* iso) { return Date::parse(iso); }

// Small graphs written inline.
struct GraphSpec {
  std::vector<kg::Entity> entities;
  std::vector<kg::TemporalTriple> triples;

  GraphSpec& company(const std::string& uid,
                     std::optional<std::string> ticker = std::nullopt) {
    entities.push_back({uid, kg::EntityKind::kCompany, uid, std::move(ticker),
                        std::nullopt, {}});
    return *this;
  }
  GraphSpec& node(const std::string& uid, kg::EntityKind kind) {
    entities.push_back({uid, kind, uid, std::nullopt, std::nullopt, {}});
    return *this;
  }
  GraphSpec& text(const std::string& uid, const char* published,
                  const std::string& title = "") {
    kg::Entity e{uid, kg::EntityKind::kTextSource, uid, std::nullopt,
                 d(published), {}};
    if (!title.empty()) e.metadata["title"] = title;
    entities.push_back(std::move(e));
    return *this;
  }
  GraphSpec& edge(const std::string& h, const std::string& r,
                  const std::string& t, const char* from,
                  const char* to = nullptr) {
    triples.push_back({h, r, t, d(from),
                       to ? std::optional<Date>(d(to)) : std::nullopt});
    return *this;
  }
  kg::Graph build() const { return kg::Graph::build(entities, triples); }
};

// Scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* root = std::getenv("TKGR_TEST_TMP");
  std::filesystem::path dir =
      std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string()) /
      name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tkgr::testing
