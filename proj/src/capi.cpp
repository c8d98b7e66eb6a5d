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

#include "sharpcsp/sharpcsp.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

#include "sharpcsp/counting.hpp"
#include "sharpcsp/dichotomy.hpp"
#include "sharpcsp/io.hpp"
#include "sharpcsp/maltsev.hpp"
#include "sharpcsp/oracle.hpp"
#include "sharpcsp/selftest.hpp"

using namespace sharpcsp;

struct sharpcsp_structure {
  explicit sharpcsp_structure(RelationalStructure s) : value(std::move(s)) {}
  RelationalStructure value;
  std::mutex lock;
  std::optional<MaltsevSearch> maltsev;
  using Key = std::tuple<std::uint64_t, std::uint64_t, double, std::uint64_t, int, int, std::uint64_t>;
  std::map<Key, DichotomyVerdict> verdicts;
};

struct sharpcsp_instance {
  Instance value;
};

namespace {

thread_local std::string last_error;
thread_local int last_line = 0;

sharpcsp_status fail(sharpcsp_status status, const std::string& what, int line = 0) {
  last_error = what;
  last_line = line;
  return status;
}

// Runs body and maps exceptions to status codes.
template <class Body>
sharpcsp_status guarded(Body&& body) {
  last_error.clear();
  last_line = 0;
  try {
    return body();
  } catch (const ParseError& e) {
    return fail(SHARPCSP_ERR_PARSE, e.what(), e.line());
  } catch (const InvalidArgument& e) {
    return fail(SHARPCSP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const PreconditionError& e) {
    return fail(SHARPCSP_ERR_PRECONDITION, e.what());
  } catch (const CapExceeded& e) {
    return fail(SHARPCSP_ERR_CAP_EXCEEDED, e.what());
  } catch (const NotBalancedError& e) {
    return fail(SHARPCSP_ERR_NOT_BALANCED, e.what());
  } catch (const Error& e) {
    return fail(SHARPCSP_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SHARPCSP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SHARPCSP_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

const MaltsevSearch& maltsev_of(sharpcsp_structure* s) {
  std::lock_guard<std::mutex> g(s->lock);
  if (!s->maltsev) s->maltsev = search_maltsev(s->value);
  return *s->maltsev;
}

const MaltsevOp& require_maltsev(sharpcsp_structure* s) {
  const MaltsevSearch& m = maltsev_of(s);
  if (!m.op) {
    std::string why = "the structure has no Mal'tsev polymorphism";
    if (m.certificate) why += ": " + to_string(*m.certificate);
    throw PreconditionError(why);
  }
  return *m.op;
}

DecideOptions to_options(const sharpcsp_decide_options* in) {
  sharpcsp_decide_options c;
  sharpcsp_decide_options_init(&c);
  if (in) c = *in;
  DecideOptions o;
  o.maltsev.max_nodes = c.maltsev_max_nodes;
  o.per_quadruple.max_nodes = c.quadruple_max_nodes;
  o.per_quadruple.max_seconds = c.quadruple_max_seconds;
  o.max_power_domain = c.max_power_domain;
  o.run_refuter = c.run_refuter != 0;
  o.refute.random_formulas = c.refute_formulas;
  o.refute.seed = c.refute_seed;
  o.parallel = c.parallel != 0;
  o.threads = c.threads;
  return o;
}

const DichotomyVerdict& verdict_of(sharpcsp_structure* s, const DecideOptions& o) {
  const sharpcsp_structure::Key key{o.maltsev.max_nodes, o.per_quadruple.max_nodes,
                                    o.per_quadruple.max_seconds, o.max_power_domain,
                                    o.run_refuter, o.refute.random_formulas, o.refute.seed};
  {
    std::lock_guard<std::mutex> g(s->lock);
    if (auto it = s->verdicts.find(key); it != s->verdicts.end()) return it->second;
  }
  DichotomyVerdict v = decide_strong_balance(s->value, o);
  std::lock_guard<std::mutex> g(s->lock);
  return s->verdicts.emplace(key, std::move(v)).first->second;
}

sharpcsp_verdict to_c(VerdictKind k) {
  switch (k) {
    case VerdictKind::kNotStronglyRectangular: return SHARPCSP_NOT_STRONGLY_RECTANGULAR;
    case VerdictKind::kNotBalanced: return SHARPCSP_NOT_BALANCED;
    case VerdictKind::kBalanced: return SHARPCSP_BALANCED;
    case VerdictKind::kTimeout: return SHARPCSP_TIMEOUT;
  }
  return SHARPCSP_TIMEOUT;
}

}  // namespace

extern "C" {

const char* sharpcsp_version(void) { return "1.0.0"; }

const char* sharpcsp_status_name(sharpcsp_status status) {
  switch (status) {
    case SHARPCSP_OK: return "ok";
    case SHARPCSP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SHARPCSP_ERR_PARSE: return "parse error";
    case SHARPCSP_ERR_PRECONDITION: return "precondition failed";
    case SHARPCSP_ERR_CAP_EXCEEDED: return "cap exceeded";
    case SHARPCSP_ERR_NOT_BALANCED: return "not balanced";
    case SHARPCSP_ERR_IO: return "error";
    case SHARPCSP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sharpcsp_last_error(void) { return last_error.c_str(); }
int sharpcsp_last_error_line(void) { return last_line; }
void sharpcsp_string_free(char* s) { std::free(s); }

sharpcsp_status sharpcsp_structure_parse(const char* text, sharpcsp_structure** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new sharpcsp_structure(parse_structure(text));
    return SHARPCSP_OK;
  });
}

sharpcsp_status sharpcsp_structure_load(const char* path, sharpcsp_structure** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new sharpcsp_structure(parse_structure(read_file(path)));
    return SHARPCSP_OK;
  });
}

void sharpcsp_structure_free(sharpcsp_structure* s) { delete s; }

int sharpcsp_structure_domain_size(const sharpcsp_structure* s) { return s ? s->value.domain_size() : 0; }

sharpcsp_status sharpcsp_structure_format(const sharpcsp_structure* s, char** out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = dup(format_structure(s->value));
    return SHARPCSP_OK;
  });
}

sharpcsp_status sharpcsp_instance_parse(const sharpcsp_structure* s, const char* text,
                                        sharpcsp_instance** out) {
  return guarded([&] {
    require(s && text && out, "null argument");
    *out = new sharpcsp_instance{parse_instance(text, s->value)};
    return SHARPCSP_OK;
  });
}

sharpcsp_status sharpcsp_instance_load(const sharpcsp_structure* s, const char* path,
                                       sharpcsp_instance** out) {
  return guarded([&] {
    require(s && path && out, "null argument");
    *out = new sharpcsp_instance{parse_instance(read_file(path), s->value)};
    return SHARPCSP_OK;
  });
}

void sharpcsp_instance_free(sharpcsp_instance* inst) { delete inst; }

int sharpcsp_instance_vars(const sharpcsp_instance* inst) { return inst ? inst->value.n : 0; }

sharpcsp_status sharpcsp_find_maltsev(sharpcsp_structure* s, int* found, char** text) {
  return guarded([&] {
    require(s && found && text, "null argument");
    const MaltsevSearch& m = maltsev_of(s);
    *found = m.op ? 1 : 0;
    if (m.op) {
      *text = dup(format_table(*m.op));
    } else {
      *text = dup(m.certificate ? to_string(*m.certificate) + "\n" : std::string("no Mal'tsev polymorphism\n"));
    }
    return SHARPCSP_OK;
  });
}

void sharpcsp_decide_options_init(sharpcsp_decide_options* opts) {
  if (!opts) return;
  const DecideOptions d;
  opts->maltsev_max_nodes = d.maltsev.max_nodes;
  opts->quadruple_max_nodes = d.per_quadruple.max_nodes;
  opts->quadruple_max_seconds = d.per_quadruple.max_seconds;
  opts->max_power_domain = d.max_power_domain;
  opts->run_refuter = d.run_refuter ? 1 : 0;
  opts->refute_formulas = d.refute.random_formulas;
  opts->refute_seed = d.refute.seed;
  opts->parallel = d.parallel ? 1 : 0;
  opts->threads = d.threads;
}

sharpcsp_status sharpcsp_analyze(sharpcsp_structure* s, const sharpcsp_decide_options* opts,
                                 sharpcsp_verdict* verdict, char** report) {
  return guarded([&] {
    require(s && verdict && report, "null argument");
    const DichotomyVerdict& v = verdict_of(s, to_options(opts));
    *verdict = to_c(v.kind);
    *report = dup(format_verdict(v));
    return SHARPCSP_OK;
  });
}

sharpcsp_status sharpcsp_decide(sharpcsp_structure* s, const sharpcsp_instance* inst, int* satisfiable) {
  return guarded([&] {
    require(s && inst && satisfiable, "null argument");
    const MaltsevOp& phi = require_maltsev(s);
    *satisfiable = build_frame(s->value, phi, inst->value).empty() ? 0 : 1;
    return SHARPCSP_OK;
  });
}

sharpcsp_status sharpcsp_count(sharpcsp_structure* s, const sharpcsp_instance* inst, int force,
                               const sharpcsp_decide_options* opts, char** decimal) {
  return guarded([&] {
    require(s && inst && decimal, "null argument");
    const MaltsevOp& phi = require_maltsev(s);
    if (!force) {
      const DichotomyVerdict& v = verdict_of(s, to_options(opts));
      if (v.kind != VerdictKind::kBalanced) {
        throw PreconditionError(std::string("the language analyzes as ") + to_string(v.kind) +
                                "; counting needs BALANCED or force");
      }
    }
    *decimal = dup(count(s->value, phi, inst->value).str());
    return SHARPCSP_OK;
  });
}

sharpcsp_status sharpcsp_oracle_count(const sharpcsp_structure* s, const sharpcsp_instance* inst,
                                      uint64_t cap, char** decimal) {
  return guarded([&] {
    require(s && inst && decimal, "null argument");
    *decimal = dup(oracle_count(s->value, inst->value, cap ? cap : kOracleCap).str());
    return SHARPCSP_OK;
  });
}

sharpcsp_status sharpcsp_oracle_solutions(const sharpcsp_structure* s, const sharpcsp_instance* inst,
                                          uint64_t cap, char** text) {
  return guarded([&] {
    require(s && inst && text, "null argument");
    const Relation sols = enumerate_solutions(s->value, inst->value, cap ? cap : kOracleCap);
    std::string out;
    for (const auto& t : sols) {
      for (std::size_t p = 0; p < t.size(); ++p) out += (p ? " " : "") + std::to_string(t[p]);
      out += "\n";
    }
    *text = dup(out);
    return SHARPCSP_OK;
  });
}

sharpcsp_status sharpcsp_frame_dump(sharpcsp_structure* s, const sharpcsp_instance* inst, int split,
                                    char** text) {
  return guarded([&] {
    require(s && inst && text, "null argument");
    const MaltsevOp& phi = require_maltsev(s);
    *text = dup(dump(build_frame(s->value, phi, inst->value, split != 0)));
    return SHARPCSP_OK;
  });
}

void sharpcsp_selftest_options_init(sharpcsp_selftest_options* opts) {
  if (!opts) return;
  const SelftestOptions d;
  opts->seed = d.seed;
  opts->trials = d.trials;
  opts->max_vars = d.max_vars;
  opts->max_constraints = d.max_constraints;
  opts->cap = d.cap;
  opts->inject_wrong = d.inject_wrong ? 1 : 0;
}

sharpcsp_status sharpcsp_selftest(const sharpcsp_structure* fixture, const sharpcsp_selftest_options* opts,
                                  int* failed, char** report) {
  return guarded([&] {
    require(failed && report, "null argument");
    sharpcsp_selftest_options c;
    sharpcsp_selftest_options_init(&c);
    if (opts) c = *opts;
    require(c.trials >= 0 && c.max_vars >= 1 && c.max_constraints >= 0 && c.cap >= 1,
            "selftest options out of range");
    SelftestOptions o;
    o.seed = c.seed;
    o.trials = c.trials;
    o.max_vars = c.max_vars;
    o.max_constraints = c.max_constraints;
    o.cap = c.cap;
    o.inject_wrong = c.inject_wrong != 0;
    if (fixture) o.fixture = fixture->value;
    const SelftestReport r = run_selftest(o);
    *failed = r.failed;
    *report = dup(r.text);
    return SHARPCSP_OK;
  });
}

}  // extern "C"
