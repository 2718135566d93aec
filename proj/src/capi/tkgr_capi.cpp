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

#define TKGR_BUILDING 1
#include "tkgr/tkgr.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "graph_io.hpp"
#include "pipeline.hpp"

struct tkgr_config {
  tkgr::RunConfig value;
};

struct tkgr_graph {
  tkgr::kg::Graph value;
};

struct tkgr_rulebank {
  tkgr::rules::RuleBank value;
};

namespace {

thread_local std::string last_error;

int fail(tkgr::ErrorCode code, const std::string& message) {
  last_error = message;
  return static_cast<int>(code);
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return TKGR_OK;
  } catch (const tkgr::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(tkgr::ErrorCode::kInternal, "out of memory");
  } catch (const std::exception& e) {
    return fail(tkgr::ErrorCode::kInternal, e.what());
  } catch (...) {
    return fail(tkgr::ErrorCode::kInternal, "unknown exception");
  }
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) {
    throw tkgr::Error(tkgr::ErrorCode::kInvalidArgument,
                      std::string(what) + " must not be null");
  }
}

}  // namespace

extern "C" {

const char* tkgr_version(void) { return tkgr::pipeline::kVersion.data(); }

const char* tkgr_status_name(int status) {
  if (status < 0 || status > static_cast<int>(tkgr::ErrorCode::kInternal)) {
    return "Unknown";
  }
  return tkgr::error_code_name(static_cast<tkgr::ErrorCode>(status)).data();
}

const char* tkgr_last_error(void) { return last_error.c_str(); }

void tkgr_string_free(char* s) { std::free(s); }

const char* tkgr_command_name(size_t index) {
  const auto& names = tkgr::pipeline::commands();
  return index < names.size() ? names[index].c_str() : nullptr;
}

int tkgr_config_new(tkgr_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tkgr_config{};
  });
}

void tkgr_config_free(tkgr_config* config) { delete config; }

int tkgr_config_load(tkgr_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    tkgr::load_config_file(config->value, path);
  });
}

int tkgr_config_set(tkgr_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    config->value.set(key, value);
  });
}

int tkgr_config_get(const tkgr_config* config, const char* key, char** out) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(out, "out");
    *out = copy_out(config->value.get(key));
  });
}

int tkgr_config_apply_ablation(tkgr_config* config, const char* name) {
  return guarded([&] {
    require(config, "config");
    require(name, "name");
    tkgr::apply_ablation(config->value, name);
  });
}

int tkgr_config_validate(const tkgr_config* config) {
  return guarded([&] {
    require(config, "config");
    config->value.validate();
  });
}

int tkgr_config_dump(const tkgr_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = copy_out(config->value.dump());
  });
}

int tkgr_config_hash(const tkgr_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = copy_out(config->value.hash());
  });
}

int tkgr_run(const tkgr_config* config, const char* command, char** report) {
  return guarded([&] {
    require(config, "config");
    require(command, "command");
    const auto r = tkgr::pipeline::run_command(command, config->value);
    if (report) *report = copy_out(r.dump(2));
  });
}

int tkgr_graph_load(const char* entities_path, const char* edges_path,
                    tkgr_graph** out, char** ingest_report) {
  return guarded([&] {
    require(entities_path, "entities_path");
    require(edges_path, "edges_path");
    require(out, "out");
    auto input = tkgr::kg::read_graph_files(entities_path, edges_path);
    auto graph = std::make_unique<tkgr_graph>();
    graph->value = tkgr::kg::Graph::build(std::move(input.entities),
                                          std::move(input.triples));
    if (ingest_report) *ingest_report = copy_out(input.report.to_json().dump(2));
    *out = graph.release();
  });
}

void tkgr_graph_free(tkgr_graph* graph) { delete graph; }

int tkgr_graph_counts(const tkgr_graph* graph, size_t* entities,
                      size_t* triples) {
  return guarded([&] {
    require(graph, "graph");
    if (entities) *entities = graph->value.entity_count();
    if (triples) *triples = graph->value.triple_count();
  });
}

int tkgr_graph_neighbors(const tkgr_graph* graph, const char* uid,
                         const char* as_of, char** out) {
  return guarded([&] {
    require(graph, "graph");
    require(uid, "uid");
    require(as_of, "as_of");
    require(out, "out");
    const auto& g = graph->value;
    const tkgr::kg::Snapshot snap(g, tkgr::Date::parse(as_of));
    auto arr = nlohmann::ordered_json::array();
    for (const auto& nb : snap.neighbors(uid, tkgr::kg::Direction::kBoth)) {
      nlohmann::ordered_json j;
      j["relation"] = g.relation_name(nb.relation);
      j["node"] = g.entity(nb.node).uid;
      j["triple"] = nb.triple;
      j["outgoing"] = nb.outgoing;
      arr.push_back(std::move(j));
    }
    *out = copy_out(arr.dump());
  });
}

int tkgr_rulebank_load(const char* path, tkgr_rulebank** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto bank = std::make_unique<tkgr_rulebank>();
    bank->value = tkgr::rules::load_bank_file(path);
    *out = bank.release();
  });
}

void tkgr_rulebank_free(tkgr_rulebank* bank) { delete bank; }

size_t tkgr_rulebank_size(const tkgr_rulebank* bank) {
  return bank ? bank->value.rules().size() : 0;
}

int tkgr_rulebank_rule(const tkgr_rulebank* bank, size_t index, char** out) {
  return guarded([&] {
    require(bank, "bank");
    require(out, "out");
    const auto rules = bank->value.rules();
    if (index >= rules.size()) {
      throw tkgr::Error(tkgr::ErrorCode::kInvalidArgument,
                        "rule index " + std::to_string(index) + " out of range");
    }
    *out = copy_out(tkgr::rules::rule_to_json(rules[index]).dump());
  });
}

int tkgr_predict(const tkgr_graph* graph, const tkgr_rulebank* bank,
                 const tkgr_config* config, const char* ticker,
                 const char* date, char** verdict) {
  return guarded([&] {
    require(graph, "graph");
    require(bank, "bank");
    require(config, "config");
    require(ticker, "ticker");
    require(date, "date");
    require(verdict, "verdict");
    const auto& g = graph->value;
    const auto stock = g.find_ticker(ticker);
    if (!stock) {
      throw tkgr::Error(tkgr::ErrorCode::kUnknownEntity,
                        std::string("unknown ticker ") + ticker);
    }
    const auto& cfg = config->value;
    const auto plugins = tkgr::pipeline::make_plugins(cfg);
    const tkgr::kg::Snapshot snap(g, tkgr::Date::parse(date));
    const auto v = tkgr::verdict::predict_one(snap, *stock, bank->value,
                                              *plugins.selector, *plugins.validator,
                                              cfg.explorer, cfg.verdict);
    *verdict = copy_out(tkgr::verdict::verdict_to_json(v).dump());
  });
}

}  // extern "C"
