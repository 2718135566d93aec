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

#include "config.hpp"

#include <charconv>
#include <functional>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "error.hpp"
#include "util.hpp"

namespace tkgr {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw Error(ErrorCode::kConfig, std::string(key) + ": expected " +
                                      std::string(expected) + ", got '" +
                                      std::string(value) + "'");
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "an integer");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string s(value);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, value, "a number");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "true or false");
}

Date parse_date(std::string_view key, std::string_view value) {
  try {
    return Date::parse(value);
  } catch (const Error&) {
    bad_value(key, value, "a YYYY-MM-DD date");
  }
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const auto item = text.substr(start, pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Field {
  std::string key;
  bool hashed;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

#define PATH_FIELD(name)                                                   \
  Field {                                                                  \
    #name, false, [](const RunConfig& c) { return c.name.string(); },      \
        [](RunConfig& c, std::string_view v) { c.name = std::string(v); } \
  }

#define SIZE_FIELD(name, member)                                               \
  Field {                                                                      \
    name, true, [](const RunConfig& c) { return std::to_string(c.member); },   \
        [](RunConfig& c, std::string_view v) {                                 \
          c.member = parse_integer<std::size_t>(name, v);                      \
        }                                                                      \
  }

#define REAL_FIELD(name, member)                                               \
  Field {                                                                      \
    name, true, [](const RunConfig& c) { return format_double(c.member); },    \
        [](RunConfig& c, std::string_view v) { c.member = parse_real(name, v); } \
  }

#define BOOL_FIELD(name, member)                                               \
  Field {                                                                      \
    name, true,                                                                \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
        [](RunConfig& c, std::string_view v) { c.member = parse_bool(name, v); } \
  }

#define DATE_FIELD(name, member)                                               \
  Field {                                                                      \
    name, true, [](const RunConfig& c) { return c.member.iso(); },             \
        [](RunConfig& c, std::string_view v) { c.member = parse_date(name, v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      PATH_FIELD(out_dir),
      PATH_FIELD(entities_path),
      PATH_FIELD(edges_path),
      PATH_FIELD(prices_path),
      PATH_FIELD(rules_path),
      PATH_FIELD(verdicts_path),
      DATE_FIELD("train_start", train.start),
      DATE_FIELD("train_end", train.end),
      DATE_FIELD("test_start", test.start),
      DATE_FIELD("test_end", test.end),
      Field{"horizon", true,
            [](const RunConfig& c) { return std::to_string(c.verdict.horizon); },
            [](RunConfig& c, std::string_view v) {
              c.verdict.horizon = c.mining.horizon = parse_integer<int>("horizon", v);
            }},
      REAL_FIELD("tau_mine", mining.tau_mine),
      SIZE_FIELD("min_support", mining.min_support),
      SIZE_FIELD("max_body_len", mining.max_body_len),
      BOOL_FIELD("unary_bodies", mining.unary_bodies),
      SIZE_FIELD("beam_width", explorer.beam_width),
      SIZE_FIELD("max_depth", explorer.max_depth),
      REAL_FIELD("tau_hyp", explorer.tau_hyp),
      SIZE_FIELD("max_scored_paths", explorer.max_scored_paths),
      Field{"seed_mode", true,
            [](const RunConfig& c) {
              return std::string(c.explorer.seed_mode == explore::SeedMode::kCompany
                                     ? "company"
                                     : "text_source");
            },
            [](RunConfig& c, std::string_view v) {
              if (v == "company") c.explorer.seed_mode = explore::SeedMode::kCompany;
              else if (v == "text_source") c.explorer.seed_mode = explore::SeedMode::kTextSource;
              else bad_value("seed_mode", v, "company or text_source");
            }},
      Field{"text_seed_lookback_days", true,
            [](const RunConfig& c) {
              return std::to_string(c.explorer.text_seed_lookback_days);
            },
            [](RunConfig& c, std::string_view v) {
              c.explorer.text_seed_lookback_days =
                  parse_integer<int>("text_seed_lookback_days", v);
            }},
      BOOL_FIELD("inverse_extracted_from", explorer.inverse_extracted_from),
      BOOL_FIELD("temporal_constraints", explorer.ablation.temporal_constraints),
      BOOL_FIELD("rule_guidance", explorer.ablation.rule_guidance),
      BOOL_FIELD("multi_hop", explorer.ablation.multi_hop),
      BOOL_FIELD("llm_selection", explorer.ablation.llm_selection),
      SIZE_FIELD("evidence_budget", verdict.evidence_budget),
      REAL_FIELD("alpha", verdict.alpha),
      Field{"aggregation", true,
            [](const RunConfig& c) {
              return std::string(c.verdict.aggregation == verdict::Aggregation::kMax
                                     ? "max"
                                     : "single_best");
            },
            [](RunConfig& c, std::string_view v) {
              if (v == "max") c.verdict.aggregation = verdict::Aggregation::kMax;
              else if (v == "single_best") c.verdict.aggregation = verdict::Aggregation::kSingleBest;
              else bad_value("aggregation", v, "max or single_best");
            }},
      SIZE_FIELD("basket_size", backtest.basket_size),
      Field{"basket_ranking", true,
            [](const RunConfig& c) {
              return std::string(c.backtest.ranking == eval::BasketRanking::kConfidence
                                     ? "confidence"
                                     : "up_confidence");
            },
            [](RunConfig& c, std::string_view v) {
              if (v == "confidence") c.backtest.ranking = eval::BasketRanking::kConfidence;
              else if (v == "up_confidence") c.backtest.ranking = eval::BasketRanking::kUpConfidence;
              else bad_value("basket_ranking", v, "confidence or up_confidence");
            }},
      REAL_FIELD("risk_free_daily", backtest.risk_free_daily),
      Field{"cf_kinds", true,
            [](const RunConfig& c) {
              std::string out;
              for (auto k : c.cf_kinds) {
                if (!out.empty()) out += ',';
                out += cf::to_string(k);
              }
              return out;
            },
            [](RunConfig& c, std::string_view v) {
              c.cf_kinds.clear();
              for (auto item : split_list(v)) {
                try {
                  c.cf_kinds.push_back(cf::parse_mask_kind(item));
                } catch (const Error&) {
                  bad_value("cf_kinds", v, "MaskText and/or MaskEdge");
                }
              }
            }},
      Field{"cf_ratios", true, [](const RunConfig& c) { return join_ints(c.cf_ratios); },
            [](RunConfig& c, std::string_view v) {
              c.cf_ratios.clear();
              for (auto item : split_list(v)) {
                c.cf_ratios.push_back(parse_integer<int>("cf_ratios", item));
              }
            }},
      SIZE_FIELD("synth_companies", synth.n_companies),
      SIZE_FIELD("synth_text_sources", synth.n_text_sources),
      SIZE_FIELD("synth_events", synth.n_events),
      SIZE_FIELD("synth_products", synth.n_products),
      SIZE_FIELD("synth_persons", synth.n_persons),
      DATE_FIELD("synth_start", synth.dates.start),
      DATE_FIELD("synth_end", synth.dates.end),
      Field{"synth_rules", true,
            [](const RunConfig& c) { return synth::format_planted_rules(c.synth.rules); },
            [](RunConfig& c, std::string_view v) {
              try {
                c.synth.rules = synth::parse_planted_rules(v);
              } catch (const Error& e) {
                throw Error(ErrorCode::kConfig, std::string("synth_rules: ") + e.what());
              }
            }},
      REAL_FIELD("synth_noise_edge_rate", synth.noise_edge_rate),
      REAL_FIELD("synth_decoy_ratio", synth.decoy_ratio),
      REAL_FIELD("synth_recency_fraction", synth.recency_fraction),
      Field{"selector", true, [](const RunConfig& c) { return c.selector; },
            [](RunConfig& c, std::string_view v) {
              if (v != "heuristic" && v != "pass-through" && v != "http") {
                bad_value("selector", v, "heuristic, pass-through or http");
              }
              c.selector = std::string(v);
            }},
      Field{"validator", true, [](const RunConfig& c) { return c.validator; },
            [](RunConfig& c, std::string_view v) {
              if (v != "lexical" && v != "http") bad_value("validator", v, "lexical or http");
              c.validator = std::string(v);
            }},
      Field{"llm_endpoint", true, [](const RunConfig& c) { return c.llm_endpoint; },
            [](RunConfig& c, std::string_view v) { c.llm_endpoint = std::string(v); }},
      Field{"llm_timeout_ms", false,
            [](const RunConfig& c) { return std::to_string(c.llm_timeout_ms); },
            [](RunConfig& c, std::string_view v) {
              c.llm_timeout_ms = parse_integer<int>("llm_timeout_ms", v);
            }},
      Field{"seed", true, [](const RunConfig& c) { return std::to_string(c.seed); },
            [](RunConfig& c, std::string_view v) {
              c.seed = parse_integer<std::uint64_t>("seed", v);
            }},
      Field{"jobs", false, [](const RunConfig& c) { return std::to_string(c.jobs); },
            [](RunConfig& c, std::string_view v) {
              c.jobs = parse_integer<unsigned>("jobs", v);
            }},
  };
  return kFields;
}

#undef PATH_FIELD
#undef SIZE_FIELD
#undef REAL_FIELD
#undef BOOL_FIELD
#undef DATE_FIELD

const Field& field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw Error(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  field(key).set(*this, value);
}

std::string RunConfig::get(std::string_view key) const {
  return field(key).get(*this);
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return kKeys;
}

void RunConfig::validate() const {
  if (train.empty() || test.empty()) {
    throw Error(ErrorCode::kConfig, "train and test windows must be non-empty");
  }
  if (train.end > test.start) {
    throw Error(ErrorCode::kConfig,
                "train window must end before the test window starts");
  }
  if (cf_kinds.empty()) throw Error(ErrorCode::kConfig, "cf_kinds is empty");
  for (int r : cf_ratios) {
    if (r < 0 || r > 100) {
      throw Error(ErrorCode::kConfig, "cf_ratios entries must lie in [0, 100]");
    }
  }
  if ((selector == "http" || validator == "http") && llm_endpoint.empty()) {
    throw Error(ErrorCode::kConfig, "http plugins need llm_endpoint");
  }
  if (backtest.basket_size == 0) {
    throw Error(ErrorCode::kConfig, "basket_size must be positive");
  }
  mining.validate();
  explorer.validate();
  verdict.validate();
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = kFnvOffsetBasis;
  for (const auto& f : fields()) {
    if (!f.hashed) continue;
    h = fnv1a64(f.key + "=" + f.get(*this) + "\n", h);
  }
  return hex64(h);
}

std::filesystem::path RunConfig::entities() const {
  return entities_path.empty() ? out_dir / "entities.jsonl" : entities_path;
}
std::filesystem::path RunConfig::edges() const {
  return edges_path.empty() ? out_dir / "edges.jsonl" : edges_path;
}
std::filesystem::path RunConfig::prices() const {
  return prices_path.empty() ? out_dir / "prices.csv" : prices_path;
}
std::filesystem::path RunConfig::rules() const {
  return rules_path.empty() ? out_dir / "rules.jsonl" : rules_path;
}
std::filesystem::path RunConfig::verdicts() const {
  return verdicts_path.empty() ? out_dir / "verdicts.jsonl" : verdicts_path;
}

unsigned RunConfig::effective_jobs() const {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, "config file not found: " + path.string());
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, "cannot parse " + path.string() + ": " +
                                        e.message() + " (line " +
                                        std::to_string(e.line()) + ")");
  }
  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      throw Error(ErrorCode::kConfig,
                  path.string() + ": sections are not supported ('" + key + "')");
    }
    config.set(key, node.data());
  }
}

void apply_ablation(RunConfig& config, std::string_view name) {
  auto& a = config.explorer.ablation;
  if (name == "no-temporal") a.temporal_constraints = false;
  else if (name == "no-rules") a.rule_guidance = false;
  else if (name == "no-multihop") a.multi_hop = false;
  else if (name == "no-aggregation") config.verdict.aggregation = verdict::Aggregation::kSingleBest;
  else if (name == "no-llm") a.llm_selection = false;
  else {
    throw Error(ErrorCode::kConfig,
                "unknown ablation '" + std::string(name) +
                    "' (no-temporal, no-rules, no-multihop, no-aggregation, no-llm)");
  }
}

}  // namespace tkgr
