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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "counterfactual.hpp"
#include "evaluation.hpp"
#include "synthetic.hpp"

namespace tkgr {

// Flat key = value settings for every command. Precedence: explicit set()
// calls (flags) over the config file over defaults.
struct RunConfig {
  std::filesystem::path out_dir = ".";
  // Empty paths resolve to the conventional file name inside out_dir.
  std::filesystem::path entities_path;
  std::filesystem::path edges_path;
  std::filesystem::path prices_path;
  std::filesystem::path rules_path;
  std::filesystem::path verdicts_path;

  DateRange train{Date::from_ymd(2022, 1, 1), Date::from_ymd(2023, 1, 1)};
  DateRange test{Date::from_ymd(2023, 1, 1), Date::from_ymd(2024, 1, 1)};

  rules::MiningConfig mining;
  explore::ExplorerConfig explorer;
  verdict::VerdictConfig verdict;
  eval::BacktestConfig backtest;
  std::vector<cf::MaskKind> cf_kinds = {cf::MaskKind::kText,
                                        cf::MaskKind::kEdge};
  std::vector<int> cf_ratios = cf::kDefaultRatios;
  synth::GeneratorSpec synth;

  std::string selector = "heuristic";  // heuristic | pass-through | http
  std::string validator = "lexical";   // lexical | http
  std::string llm_endpoint;
  int llm_timeout_ms = 2000;

  std::uint64_t seed = 42;
  unsigned jobs = 0;  // 0 = available cores

  // Throws Error{kConfig} for an unknown key or an unparsable value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  static const std::vector<std::string>& keys();

  // Throws Error{kConfig}.
  void validate() const;

  // Every key in a fixed order, as a file load() accepts.
  std::string dump() const;
  // Digest of the settings that can change results; paths and jobs excluded.
  std::string hash() const;

  std::filesystem::path entities() const;
  std::filesystem::path edges() const;
  std::filesystem::path prices() const;
  std::filesystem::path rules() const;
  std::filesystem::path verdicts() const;
  unsigned effective_jobs() const;
};

// Throws Error{kConfig} when the file is missing or malformed.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

// Maps an ablation flag name (no-temporal, no-rules, no-multihop,
// no-aggregation, no-llm) onto the config. Throws Error{kConfig}.
void apply_ablation(RunConfig& config, std::string_view name);

}  // namespace tkgr
