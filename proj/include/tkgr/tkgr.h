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

#ifndef TKGR_TKGR_H_
#define TKGR_TKGR_H_

#include <stddef.h>

#if defined(TKGR_BUILDING) && defined(__GNUC__)
#define TKGR_API __attribute__((visibility("default")))
#else
#define TKGR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum tkgr_status {
  TKGR_OK = 0,
  TKGR_ERR_CONFIG = 1,
  TKGR_ERR_IO = 2,
  TKGR_ERR_PARSE = 3,
  TKGR_ERR_INVALID_ARGUMENT = 4,
  TKGR_ERR_DANGLING_ENDPOINT = 5,
  TKGR_ERR_DUPLICATE_UID = 6,
  TKGR_ERR_INVARIANT_VIOLATION = 7,
  TKGR_ERR_UNKNOWN_ENTITY = 8,
  TKGR_ERR_UNKNOWN_TRIPLE = 9,
  TKGR_ERR_MISSING_DATE = 10,
  TKGR_ERR_INSUFFICIENT_HISTORY = 11,
  TKGR_ERR_EMPTY_LABEL_TABLE = 12,
  TKGR_ERR_EMPTY_RULE_BANK = 13,
  TKGR_ERR_EMPTY_INTERSECTION = 14,
  TKGR_ERR_INSUFFICIENT_TICKERS = 15,
  TKGR_ERR_ZERO_VARIANCE = 16,
  TKGR_ERR_NO_TEXT_EVIDENCE = 17,
  TKGR_ERR_NO_MATCHED_RULE = 18,
  TKGR_ERR_SPEC_INVALID = 19,
  TKGR_ERR_INTERNAL = 20
} tkgr_status;

typedef struct tkgr_config tkgr_config;
typedef struct tkgr_graph tkgr_graph;
typedef struct tkgr_rulebank tkgr_rulebank;

TKGR_API const char* tkgr_version(void);
/* Stable name such as "ConfigError"; "Unknown" for out-of-range values. */
TKGR_API const char* tkgr_status_name(int status);
/* Message of the last failed call on this thread; "" after a success. */
TKGR_API const char* tkgr_last_error(void);
/* Frees strings returned through char** out-parameters. */
TKGR_API void tkgr_string_free(char* s);

/* Commands understood by tkgr_run, by index; NULL past the end. */
TKGR_API const char* tkgr_command_name(size_t index);

TKGR_API int tkgr_config_new(tkgr_config** out);
TKGR_API void tkgr_config_free(tkgr_config* config);
TKGR_API int tkgr_config_load(tkgr_config* config, const char* path);
TKGR_API int tkgr_config_set(tkgr_config* config, const char* key,
                             const char* value);
TKGR_API int tkgr_config_get(const tkgr_config* config, const char* key,
                             char** out);
/* no-temporal, no-rules, no-multihop, no-aggregation or no-llm. */
TKGR_API int tkgr_config_apply_ablation(tkgr_config* config, const char* name);
TKGR_API int tkgr_config_validate(const tkgr_config* config);
TKGR_API int tkgr_config_dump(const tkgr_config* config, char** out);
TKGR_API int tkgr_config_hash(const tkgr_config* config, char** out);

/* Runs one pipeline command; *report receives the run report as JSON. */
TKGR_API int tkgr_run(const tkgr_config* config, const char* command,
                      char** report);

TKGR_API int tkgr_graph_load(const char* entities_path, const char* edges_path,
                             tkgr_graph** out, char** ingest_report);
TKGR_API void tkgr_graph_free(tkgr_graph* graph);
TKGR_API int tkgr_graph_counts(const tkgr_graph* graph, size_t* entities,
                               size_t* triples);
/* JSON array of {relation, node, triple, outgoing} visible on as_of. */
TKGR_API int tkgr_graph_neighbors(const tkgr_graph* graph, const char* uid,
                                  const char* as_of, char** out);

TKGR_API int tkgr_rulebank_load(const char* path, tkgr_rulebank** out);
TKGR_API void tkgr_rulebank_free(tkgr_rulebank* bank);
TKGR_API size_t tkgr_rulebank_size(const tkgr_rulebank* bank);
TKGR_API int tkgr_rulebank_rule(const tkgr_rulebank* bank, size_t index,
                                char** out);

/* Verdict JSON for one (ticker, date) using the config's explorer, verdict
 * and plugin settings. */
TKGR_API int tkgr_predict(const tkgr_graph* graph, const tkgr_rulebank* bank,
                          const tkgr_config* config, const char* ticker,
                          const char* date, char** verdict);

#ifdef __cplusplus
}
#endif

#endif /* TKGR_TKGR_H_ */
