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

#include "http_plugins.hpp"

#include <httplib.h>

#include <optional>

#include "error.hpp"

namespace tkgr::plugins {

Endpoint parse_endpoint(const std::string& url, int timeout_ms) {
  constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0 || url.size() == kScheme.size()) {
    throw Error(ErrorCode::kConfig,
                "llm_endpoint must look like http://host[:port][/path], got '" +
                    url + "'");
  }
  const auto slash = url.find('/', kScheme.size());
  Endpoint e;
  e.base = url.substr(0, slash);
  e.path = slash == std::string::npos ? "/" : url.substr(slash);
  e.timeout_ms = timeout_ms;
  return e;
}

namespace {

std::optional<nlohmann::json> post(const Endpoint& e,
                                   const nlohmann::ordered_json& body) {
  httplib::Client client(e.base);
  const auto sec = e.timeout_ms / 1000;
  const auto usec = (e.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  const auto res = client.Post(e.path, body.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) return std::nullopt;
  return parsed;
}

}  // namespace

std::vector<int> HttpSelector::score(
    const explore::SelectionContext& context) const {
  const kg::Graph& g = context.snap.graph();
  nlohmann::ordered_json body;
  body["as_of"] = context.as_of.iso();
  body["path"] = explore::node_uids(context.parent, g);
  body["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : context.candidates) {
    nlohmann::ordered_json cj;
    cj["target"] = g.entity(c.target).uid;
    cj["kind"] = kg::to_string(c.target_kind);
    cj["relation"] = c.relation;
    cj["edge_date"] = c.edge_date.iso();
    cj["degree"] = c.target_degree;
    body["candidates"].push_back(std::move(cj));
  }
  if (const auto reply = post(endpoint_, body)) {
    const auto it = reply->find("scores");
    if (it != reply->end() && it->is_array() &&
        it->size() == context.candidates.size()) {
      std::vector<int> scores;
      bool ok = true;
      for (const auto& s : *it) {
        ok = ok && s.is_number_integer() && s.get<int>() >= 0 && s.get<int>() <= 2;
        if (ok) scores.push_back(s.get<int>());
      }
      if (ok) return scores;
    }
  }
  ++fallbacks_;
  return fallback_.score(context);
}

verdict::Validation HttpValidator::validate(
    const verdict::ValidationContext& context, const explore::Path& path,
    const rules::Rule& rule) const {
  const kg::Graph& g = context.snap.graph();
  nlohmann::ordered_json body;
  body["as_of"] = context.snap.as_of().iso();
  body["nodes"] = explore::node_uids(path, g);
  body["relations"] = path.relations;
  body["rule"] = rules::rule_to_json(rule);
  body["text_sources"] = nlohmann::ordered_json::array();
  for (kg::NodeId id : context.text_sources) {
    const auto& e = g.entity(id);
    nlohmann::ordered_json tj;
    tj["uid"] = e.uid;
    const auto title = e.metadata.find("title");
    tj["title"] = title == e.metadata.end() ? e.name : title->second;
    if (e.published_at) tj["published_at"] = e.published_at->iso();
    body["text_sources"].push_back(std::move(tj));
  }
  if (const auto reply = post(endpoint_, body)) {
    const auto label = reply->find("label");
    const auto p = reply->find("plausibility");
    if (label != reply->end() && label->is_string() && p != reply->end() &&
        p->is_number()) {
      const auto direction = market::parse_direction(label->get<std::string>());
      const double plausibility = p->get<double>();
      if (direction && plausibility >= 0.0 && plausibility <= 1.0) {
        return verdict::Validation{*direction, plausibility};
      }
    }
  }
  ++fallbacks_;
  return fallback_.validate(context, path, rule);
}

}  // namespace tkgr::plugins
