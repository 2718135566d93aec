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
#include <memory>
#include <string>

#include "verdict.hpp"

namespace tkgr::plugins {

// Remote scorer reached over HTTP with a JSON body. Any transport failure,
// non-200 status or malformed reply falls back to the local default and bumps
// fallbacks().
struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // request path, "/" when absent
  int timeout_ms = 2000;
};

// Throws Error{kConfig} on anything but http://host[:port][/path].
Endpoint parse_endpoint(const std::string& url, int timeout_ms);

// Request: {"as_of", "path": [uids], "candidates": [{"target", "kind",
// "relation", "edge_date", "degree"}]}. Reply: {"scores": [int, ...]}.
class HttpSelector final : public explore::RelationSelector {
 public:
  explicit HttpSelector(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::vector<int> score(const explore::SelectionContext& context) const override;
  std::string_view name() const override { return "http"; }
  std::size_t fallbacks() const { return fallbacks_.load(); }

 private:
  Endpoint endpoint_;
  explore::HeuristicSelector fallback_;
  mutable std::atomic<std::size_t> fallbacks_{0};
};

// Request: {"as_of", "nodes", "relations", "rule": {...}, "text_sources":
// [{"uid", "title", "published_at"}]}. Reply: {"label": "UP"|"DOWN",
// "plausibility": p}.
class HttpValidator final : public verdict::Validator {
 public:
  explicit HttpValidator(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
  verdict::Validation validate(const verdict::ValidationContext& context,
                               const explore::Path& path,
                               const rules::Rule& rule) const override;
  std::string_view name() const override { return "http"; }
  std::size_t fallbacks() const { return fallbacks_.load(); }

 private:
  Endpoint endpoint_;
  verdict::DefaultValidator fallback_;
  mutable std::atomic<std::size_t> fallbacks_{0};
};

}  // namespace tkgr::plugins
