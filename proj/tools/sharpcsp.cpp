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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "sharpcsp/sharpcsp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNo = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitParse = 64;
constexpr int kExitRefused = 65;

struct StructureDeleter {
  void operator()(sharpcsp_structure* s) const { sharpcsp_structure_free(s); }
};
struct InstanceDeleter {
  void operator()(sharpcsp_instance* i) const { sharpcsp_instance_free(i); }
};
using StructurePtr = std::unique_ptr<sharpcsp_structure, StructureDeleter>;
using InstancePtr = std::unique_ptr<sharpcsp_instance, InstanceDeleter>;

// Thrown with the exit code once the message has been printed.
struct Exit {
  int code;
};

int exit_code_for(sharpcsp_status st) {
  switch (st) {
    case SHARPCSP_ERR_PARSE:
    case SHARPCSP_ERR_IO:
      return kExitParse;
    case SHARPCSP_ERR_PRECONDITION:
    case SHARPCSP_ERR_CAP_EXCEEDED:
    case SHARPCSP_ERR_NOT_BALANCED:
    case SHARPCSP_ERR_INVALID_ARGUMENT:
      return kExitRefused;
    default:
      return 70;
  }
}

void check(sharpcsp_status st) {
  if (st == SHARPCSP_OK) return;
  std::cerr << "sharpcsp: " << sharpcsp_status_name(st) << ": " << sharpcsp_last_error() << "\n";
  throw Exit{exit_code_for(st)};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  sharpcsp_string_free(s);
  return out;
}

StructurePtr load_structure(const std::string& path) {
  sharpcsp_structure* s = nullptr;
  check(sharpcsp_structure_load(path.c_str(), &s));
  return StructurePtr(s);
}

InstancePtr load_instance(const sharpcsp_structure* s, const std::string& path) {
  sharpcsp_instance* i = nullptr;
  check(sharpcsp_instance_load(s, path.c_str(), &i));
  return InstancePtr(i);
}

struct DecideFlags {
  sharpcsp_decide_options opts{};
  bool no_refuter = false;

  void attach(CLI::App* app) {
    sharpcsp_decide_options_init(&opts);
    app->add_flag("--parallel", opts.parallel, "Check quadruples on several threads");
    app->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
    app->add_flag("--no-refuter", no_refuter, "Skip the balance-matrix refuter");
    app->add_option("--refute-formulas", opts.refute_formulas, "Random formulas tried by the refuter");
    app->add_option("--refute-seed", opts.refute_seed, "Seed for the refuter");
    app->add_option("--maltsev-nodes", opts.maltsev_max_nodes, "Node budget of the Mal'tsev search (0 = none)");
    app->add_option("--quad-nodes", opts.quadruple_max_nodes, "Node budget per quadruple (0 = none)");
    app->add_option("--quad-seconds", opts.quadruple_max_seconds, "Time budget per quadruple (0 = none)");
    app->add_option("--max-power-domain", opts.max_power_domain, "Largest q^6 the sweep attempts");
  }
  const sharpcsp_decide_options* get() {
    opts.run_refuter = no_refuter ? 0 : 1;
    return &opts;
  }
};

int cmd_analyze(const std::string& path, DecideFlags& flags) {
  auto s = load_structure(path);
  sharpcsp_verdict v;
  char* report = nullptr;
  check(sharpcsp_analyze(s.get(), flags.get(), &v, &report));
  const std::string text = take(report);
  switch (v) {
    case SHARPCSP_BALANCED:
      std::cout << "result=FP\n" << text;
      return kExitOk;
    case SHARPCSP_NOT_STRONGLY_RECTANGULAR:
    case SHARPCSP_NOT_BALANCED:
      std::cout << "result=SHARP_P_COMPLETE\n" << text;
      return kExitNo;
    case SHARPCSP_TIMEOUT:
      break;
  }
  std::cout << "result=TIMEOUT\n" << text;
  return kExitTimeout;
}

int cmd_decide(const std::string& spath, const std::string& ipath) {
  auto s = load_structure(spath);
  auto inst = load_instance(s.get(), ipath);
  int sat = 0;
  check(sharpcsp_decide(s.get(), inst.get(), &sat));
  std::cout << (sat ? "SAT" : "UNSAT") << "\n";
  return sat ? kExitOk : kExitNo;
}

int cmd_count(const std::string& spath, const std::string& ipath, bool force, DecideFlags& flags) {
  auto s = load_structure(spath);
  auto inst = load_instance(s.get(), ipath);
  if (!force) {
    sharpcsp_verdict v;
    char* report = nullptr;
    check(sharpcsp_analyze(s.get(), flags.get(), &v, &report));
    sharpcsp_string_free(report);
    if (v == SHARPCSP_TIMEOUT) {
      std::cerr << "sharpcsp: the dichotomy check timed out; rerun with --force to count anyway\n";
      return kExitTimeout;
    }
  }
  char* out = nullptr;
  check(sharpcsp_count(s.get(), inst.get(), force ? 1 : 0, flags.get(), &out));
  std::cout << take(out) << "\n";
  return kExitOk;
}

int cmd_oracle(const std::string& spath, const std::string& ipath, std::uint64_t cap, bool list) {
  auto s = load_structure(spath);
  auto inst = load_instance(s.get(), ipath);
  char* out = nullptr;
  if (list) {
    check(sharpcsp_oracle_solutions(s.get(), inst.get(), cap, &out));
    std::cout << take(out);
  } else {
    check(sharpcsp_oracle_count(s.get(), inst.get(), cap, &out));
    std::cout << take(out) << "\n";
  }
  return kExitOk;
}

int cmd_frame(const std::string& spath, const std::string& ipath, bool split) {
  auto s = load_structure(spath);
  auto inst = load_instance(s.get(), ipath);
  char* out = nullptr;
  check(sharpcsp_frame_dump(s.get(), inst.get(), split ? 1 : 0, &out));
  std::cout << take(out);
  return kExitOk;
}

int cmd_maltsev(const std::string& spath) {
  auto s = load_structure(spath);
  int found = 0;
  char* out = nullptr;
  check(sharpcsp_find_maltsev(s.get(), &found, &out));
  std::cout << (found ? "maltsev=\n" : "none ") << take(out);
  return found ? kExitOk : kExitNo;
}

int cmd_selftest(const std::string& spath, sharpcsp_selftest_options& opts) {
  StructurePtr s;
  if (!spath.empty()) s = load_structure(spath);
  int failed = 0;
  char* out = nullptr;
  check(sharpcsp_selftest(s.get(), &opts, &failed, &out));
  std::cout << take(out);
  return failed ? kExitNo : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact counting for constraint languages with a Mal'tsev polymorphism"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sharpcsp_version());

  std::string structure, instance;
  bool force = false, list = false, split = false;
  std::uint64_t cap = 0;
  DecideFlags analyze_flags, count_flags;
  sharpcsp_selftest_options self{};
  sharpcsp_selftest_options_init(&self);
  bool inject = false;

  auto* analyze = app.add_subcommand("analyze", "Decide which side of the dichotomy a language is on");
  analyze->add_option("structure", structure, "Structure file")->required();
  analyze_flags.attach(analyze);

  auto* decide = app.add_subcommand("decide", "Satisfiability of an instance");
  decide->add_option("structure", structure, "Structure file")->required();
  decide->add_option("instance", instance, "Instance file")->required();

  auto* count = app.add_subcommand("count", "Exact number of solutions");
  count->add_option("structure", structure, "Structure file")->required();
  count->add_option("instance", instance, "Instance file")->required();
  count->add_flag("--force", force, "Count without requiring a BALANCED verdict");
  count_flags.attach(count);

  auto* oracle = app.add_subcommand("oracle", "Brute-force count");
  oracle->add_option("structure", structure, "Structure file")->required();
  oracle->add_option("instance", instance, "Instance file")->required();
  oracle->add_option("--cap", cap, "Largest q^n enumerated (0 = default)");
  oracle->add_flag("--list", list, "Print the solutions instead of their number");

  auto* frame = app.add_subcommand("frame", "Print the frame of an instance");
  frame->add_option("structure", structure, "Structure file")->required();
  frame->add_option("instance", instance, "Instance file")->required();
  frame->add_flag("--split", split, "Add constraints through the split variant");

  auto* maltsev = app.add_subcommand("maltsev", "Find a Mal'tsev polymorphism");
  maltsev->add_option("structure", structure, "Structure file")->required();

  auto* selftest = app.add_subcommand("selftest", "Compare the fast paths with the oracle on random cases");
  selftest->add_option("--structure", structure, "Fixed structure instead of random fixtures");
  selftest->add_option("--seed", self.seed, "Random seed");
  selftest->add_option("--trials", self.trials, "Number of cases");
  selftest->add_option("--max-vars", self.max_vars, "Largest instance");
  selftest->add_option("--max-constraints", self.max_constraints, "Most constraints per instance");
  selftest->add_option("--cap", self.cap, "Largest q^n checked");
  selftest->add_flag("--inject-wrong", inject, "Corrupt the oracle's copy of each fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  try {
    if (*analyze) return cmd_analyze(structure, analyze_flags);
    if (*decide) return cmd_decide(structure, instance);
    if (*count) return cmd_count(structure, instance, force, count_flags);
    if (*oracle) return cmd_oracle(structure, instance, cap, list);
    if (*frame) return cmd_frame(structure, instance, split);
    if (*maltsev) return cmd_maltsev(structure);
    if (*selftest) {
      self.inject_wrong = inject ? 1 : 0;
      return cmd_selftest(structure, self);
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitParse;
}
