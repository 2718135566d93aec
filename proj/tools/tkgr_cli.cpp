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

// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "tkgr/tkgr.h"

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Prints the error object for the failed call and returns its status.
int report_error(int status) {
  std::cerr << "{\"status\":\"error\",\"error\":\"" << tkgr_status_name(status)
            << "\",\"code\":" << status << ",\"message\":\""
            << json_escape(tkgr_last_error()) << "\"}\n";
  return status;
}

struct ConfigDeleter {
  void operator()(tkgr_config* c) const { tkgr_config_free(c); }
};

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { tkgr_string_free(p); }
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> commands;
  for (size_t i = 0; tkgr_command_name(i); ++i) commands.emplace_back(tkgr_command_name(i));

  CLI::App app{"Rule-guided temporal knowledge-graph reasoning for stock movement "
               "prediction.\n\nCommands:\n"
               "  synth           generate a synthetic graph, prices and manifest\n"
               "  ingest          validate graph and price files, write ingest_report.json\n"
               "  mine            mine the rule bank over the train window\n"
               "  predict         walk-forward verdicts over the test window\n"
               "  evaluate        classification, interpretability and backtest report\n"
               "  backtest        top-basket backtest and equity curve only\n"
               "  counterfactual  Mask-Text / Mask-Edge ratio sweep\n"
               "  ablate          ablation table\n",
               "tkgr"};
  std::string command;
  std::string config_file;
  std::vector<std::string> overrides;
  std::vector<std::string> ablations;
  std::string out_dir, entities, edges, prices, rules, verdicts, seed, jobs;
  bool dump_config = false;
  bool version = false;

  app.add_option("command", command, "Command to run")
      ->check(CLI::IsMember(commands));
  app.add_option("-c,--config", config_file, "Flat key = value config file");
  app.add_option("-s,--set", overrides, "Override one setting, key=value (repeatable)");
  app.add_option("--ablate", ablations,
                 "Disable a component: no-temporal, no-rules, no-multihop, "
                 "no-aggregation, no-llm (repeatable)");
  app.add_option("-o,--out-dir", out_dir, "Output directory (out_dir)");
  app.add_option("--entities", entities, "Entities JSONL (entities_path)");
  app.add_option("--edges", edges, "Edges JSONL (edges_path)");
  app.add_option("--prices", prices, "Prices CSV (prices_path)");
  app.add_option("--rules", rules, "Rule bank JSONL (rules_path)");
  app.add_option("--verdicts", verdicts, "Verdicts JSONL (verdicts_path)");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("-j,--jobs", jobs, "Worker threads; 0 = available cores");
  app.add_flag("--dump-config", dump_config,
               "Print the effective configuration and exit");
  app.add_flag("--version", version, "Print the version and exit");

  CLI11_PARSE(app, argc, argv);

  if (version) {
    std::cout << tkgr_version() << '\n';
    return 0;
  }

  tkgr_config* raw = nullptr;
  if (int st = tkgr_config_new(&raw)) return report_error(st);
  std::unique_ptr<tkgr_config, ConfigDeleter> config(raw);

  if (!config_file.empty()) {
    if (int st = tkgr_config_load(config.get(), config_file.c_str())) {
      return report_error(st);
    }
  }
  const std::pair<const char*, const std::string*> flag_keys[] = {
      {"out_dir", &out_dir},   {"entities_path", &entities},
      {"edges_path", &edges},  {"prices_path", &prices},
      {"rules_path", &rules},  {"verdicts_path", &verdicts},
      {"seed", &seed},         {"jobs", &jobs},
  };
  for (const auto& [key, value] : flag_keys) {
    if (value->empty()) continue;
    if (int st = tkgr_config_set(config.get(), key, value->c_str())) {
      return report_error(st);
    }
  }
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "{\"status\":\"error\",\"error\":\"ConfigError\",\"code\":1,"
                   "\"message\":\"--set expects key=value, got '"
                << json_escape(kv) << "'\"}\n";
      return TKGR_ERR_CONFIG;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (int st = tkgr_config_set(config.get(), key.c_str(), value.c_str())) {
      return report_error(st);
    }
  }
  for (const auto& name : ablations) {
    if (int st = tkgr_config_apply_ablation(config.get(), name.c_str())) {
      return report_error(st);
    }
  }

  if (dump_config) {
    OwnedString text;
    if (int st = tkgr_config_dump(config.get(), &text.p)) return report_error(st);
    std::cout << text.p;
    return 0;
  }
  if (command.empty()) {
    std::cerr << app.help();
    return TKGR_ERR_CONFIG;
  }

  OwnedString report;
  if (int st = tkgr_run(config.get(), command.c_str(), &report.p)) {
    return report_error(st);
  }
  std::cout << report.p << '\n';
  return 0;
}
