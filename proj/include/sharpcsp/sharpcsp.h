// Copyright 2026 The sharpcsp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the sharpcsp library.
 *
 * Handles are opaque. Every call that can fail returns a status code; the
 * message of the last failure on the calling thread is available from
 * sharpcsp_last_error(). Strings returned through char** are owned by the
 * caller and released with sharpcsp_string_free().
 *
 * A structure handle may be shared between threads for read-only calls; it
 * caches its Mal'tsev operation and analysis verdicts internally under a lock.
 */

#ifndef SHARPCSP_SHARPCSP_H_
#define SHARPCSP_SHARPCSP_H_

#include <stdint.h>

#if defined(_WIN32)
#define SHARPCSP_API __declspec(dllexport)
#else
#define SHARPCSP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sharpcsp_status {
  SHARPCSP_OK = 0,
  SHARPCSP_ERR_INVALID_ARGUMENT = 1,
  SHARPCSP_ERR_PARSE = 2,
  SHARPCSP_ERR_PRECONDITION = 3,
  SHARPCSP_ERR_CAP_EXCEEDED = 4,
  SHARPCSP_ERR_NOT_BALANCED = 5,
  SHARPCSP_ERR_IO = 6,
  SHARPCSP_ERR_INTERNAL = 7
} sharpcsp_status;

typedef enum sharpcsp_verdict {
  SHARPCSP_NOT_STRONGLY_RECTANGULAR = 0,
  SHARPCSP_NOT_BALANCED = 1,
  SHARPCSP_BALANCED = 2,
  SHARPCSP_TIMEOUT = 3
} sharpcsp_verdict;

typedef struct sharpcsp_structure sharpcsp_structure;
typedef struct sharpcsp_instance sharpcsp_instance;

SHARPCSP_API const char* sharpcsp_version(void);
SHARPCSP_API const char* sharpcsp_status_name(sharpcsp_status status);
/* Empty string when the last call succeeded. */
SHARPCSP_API const char* sharpcsp_last_error(void);
/* 1-based line of the last parse error, 0 if none. */
SHARPCSP_API int sharpcsp_last_error_line(void);
SHARPCSP_API void sharpcsp_string_free(char* s);

SHARPCSP_API sharpcsp_status sharpcsp_structure_parse(const char* text, sharpcsp_structure** out);
SHARPCSP_API sharpcsp_status sharpcsp_structure_load(const char* path, sharpcsp_structure** out);
SHARPCSP_API void sharpcsp_structure_free(sharpcsp_structure* s);
SHARPCSP_API int sharpcsp_structure_domain_size(const sharpcsp_structure* s);
SHARPCSP_API sharpcsp_status sharpcsp_structure_format(const sharpcsp_structure* s, char** out);

SHARPCSP_API sharpcsp_status sharpcsp_instance_parse(const sharpcsp_structure* s, const char* text,
                                                     sharpcsp_instance** out);
SHARPCSP_API sharpcsp_status sharpcsp_instance_load(const sharpcsp_structure* s, const char* path,
                                                    sharpcsp_instance** out);
SHARPCSP_API void sharpcsp_instance_free(sharpcsp_instance* inst);
SHARPCSP_API int sharpcsp_instance_vars(const sharpcsp_instance* inst);

/* *found is 1 with the table in *text ("a b c -> v" lines), or 0 with the
 * violated pattern in *text. */
SHARPCSP_API sharpcsp_status sharpcsp_find_maltsev(sharpcsp_structure* s, int* found, char** text);

typedef struct sharpcsp_decide_options {
  uint64_t maltsev_max_nodes;    /* 0 = unlimited */
  uint64_t quadruple_max_nodes;  /* per quadruple, 0 = unlimited */
  double quadruple_max_seconds;  /* per quadruple, 0 = unlimited */
  uint64_t max_power_domain;
  int run_refuter;
  int refute_formulas;
  uint64_t refute_seed;
  int parallel;
  unsigned threads; /* 0 = hardware concurrency */
} sharpcsp_decide_options;

SHARPCSP_API void sharpcsp_decide_options_init(sharpcsp_decide_options* opts);

/* Runs the dichotomy. *report holds the verdict lines and, when a Mal'tsev
 * operation exists, its table. opts may be NULL for defaults. */
SHARPCSP_API sharpcsp_status sharpcsp_analyze(sharpcsp_structure* s, const sharpcsp_decide_options* opts,
                                              sharpcsp_verdict* verdict, char** report);

/* Satisfiability through frames. PRECONDITION when there is no Mal'tsev
 * polymorphism. */
SHARPCSP_API sharpcsp_status sharpcsp_decide(sharpcsp_structure* s, const sharpcsp_instance* inst,
                                             int* satisfiable);

/* Exact count as a decimal string. Without force the structure must analyze
 * as BALANCED, otherwise PRECONDITION. */
SHARPCSP_API sharpcsp_status sharpcsp_count(sharpcsp_structure* s, const sharpcsp_instance* inst, int force,
                                            const sharpcsp_decide_options* opts, char** decimal);

/* Brute force over all q^n assignments; CAP_EXCEEDED past cap (0 = default). */
SHARPCSP_API sharpcsp_status sharpcsp_oracle_count(const sharpcsp_structure* s, const sharpcsp_instance* inst,
                                                   uint64_t cap, char** decimal);
/* One solution per line, 0-based values, lexicographic order. */
SHARPCSP_API sharpcsp_status sharpcsp_oracle_solutions(const sharpcsp_structure* s,
                                                       const sharpcsp_instance* inst, uint64_t cap,
                                                       char** text);

/* The instance's frame; requires a Mal'tsev polymorphism. */
SHARPCSP_API sharpcsp_status sharpcsp_frame_dump(sharpcsp_structure* s, const sharpcsp_instance* inst,
                                                 int split, char** text);

typedef struct sharpcsp_selftest_options {
  uint64_t seed;
  int trials;
  int max_vars;
  int max_constraints;
  uint64_t cap;
  int inject_wrong;
} sharpcsp_selftest_options;

SHARPCSP_API void sharpcsp_selftest_options_init(sharpcsp_selftest_options* opts);

/* fixture may be NULL for random affine fixtures. *failed is the number of
 * mismatching trials. */
SHARPCSP_API sharpcsp_status sharpcsp_selftest(const sharpcsp_structure* fixture,
                                               const sharpcsp_selftest_options* opts, int* failed,
                                               char** report);

#ifdef __cplusplus
}
#endif

#endif /* SHARPCSP_SHARPCSP_H_ */
