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

// Deciding the counting dichotomy: strong rectangularity, then (almost)
// strong balance through automorphisms of the sixth power, with a direct
// balance-matrix refuter run first.

#ifndef SHARPCSP_DICHOTOMY_HPP_
#define SHARPCSP_DICHOTOMY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sharpcsp/frames.hpp"
#include "sharpcsp/maltsev.hpp"
#include "sharpcsp/relations.hpp"

namespace sharpcsp {

// Elements of D^6, encoded base q with the first coordinate most significant.
struct PatternTriple {
  std::uint64_t abar = 0, cbar = 0, dbar = 0;
  friend bool operator==(const PatternTriple&, const PatternTriple&) = default;
};

// (a,a,a,b,b,b), (c,c,d,d,d,c), (d,d,c,c,c,d).
PatternTriple patterns(int q, Element a, Element b, Element c, Element d);

struct SearchBudget {
  std::uint64_t max_nodes = 0;  // 0 = unlimited
  double max_seconds = 0;       // 0 = unlimited
};

struct AutomorphismResult {
  std::optional<std::vector<std::uint64_t>> map;  // image of each element of D^k
  bool exhausted_budget = false;
  std::uint64_t nodes = 0;
};

// Precomputed search over bijections of D^k preserving every R^k.
class AutomorphismSearch {
 public:
  // Throws InvalidArgument when q^k or a relation's lookup tables are too big.
  AutomorphismSearch(int q, std::vector<Relation> relations, int k);

  std::uint64_t domain_size() const { return size_; }
  int power() const { return k_; }

  AutomorphismResult run(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fixes,
                         const SearchBudget& budget = {}) const;

  // Direct check: bijective, and every tuple of every R^k maps into R^k.
  bool is_automorphism(const std::vector<std::uint64_t>& map) const;

 private:
  struct RelData {
    std::vector<std::vector<std::vector<int>>> occ;  // [position][value] -> tuple indices
    std::vector<std::vector<char>> in_proj;           // [mask][key]
    std::vector<std::vector<std::uint64_t>> fill;     // [mask][key] -> digits for the rest
  };
  struct Runner;
  bool refine(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fixes,
              std::vector<int>& src, std::vector<int>& dst) const;

  int q_;
  int k_;
  std::uint64_t size_;
  std::vector<Relation> relations_;
  std::vector<RelData> data_;
  std::vector<int> digits_;  // digits_[e*k + c]
  std::vector<std::vector<std::uint64_t>> signature_;
};

// Uses the user relations of s; equality is preserved by every bijection.
AutomorphismResult find_automorphism(
    const RelationalStructure& s, int k,
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fixes,
    const SearchBudget& budget = {});

struct BalanceRefutation {
  Instance formula;
  int first = 0, second = 0;  // 0-based variables of the formula
  CountMatrix matrix;
};

struct RefuteOptions {
  int random_formulas = 8;
  std::uint64_t seed = 1;
  int max_vars = 4;
  int max_constraints = 3;
  std::size_t max_solutions = 4096;
};

// Counts (x_first, x_second) over the solutions of each relation of s
// itself, then of seeded random formulas, and reports the first count matrix
// that is not rank-one block. Sound but incomplete.
std::optional<BalanceRefutation> refute_balance(const RelationalStructure& s, const MaltsevOp& phi,
                                                const RefuteOptions& opts = {});

enum class VerdictKind { kNotStronglyRectangular, kNotBalanced, kBalanced, kTimeout };

const char* to_string(VerdictKind k);

struct Quadruple {
  Element a = 0, b = 0, c = 0, d = 0;
  friend bool operator==(const Quadruple&, const Quadruple&) = default;
};

struct DichotomyVerdict {
  VerdictKind kind = VerdictKind::kTimeout;
  std::optional<MaltsevOp> maltsev;
  std::optional<RectangularityViolation> rectangularity;
  std::optional<BalanceRefutation> refutation;
  std::optional<Quadruple> quadruple;  // no automorphism, or the one that ran out of budget
  std::uint64_t quadruples_checked = 0;
  std::string note;
};

struct DecideOptions {
  MaltsevSearchOptions maltsev;
  RefuteOptions refute;
  bool run_refuter = true;
  SearchBudget per_quadruple{2'000'000, 0};
  std::uint64_t max_power_domain = std::uint64_t{1} << 15;
  bool parallel = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

DichotomyVerdict decide_strong_balance(const RelationalStructure& s, const DecideOptions& opts = {});

// verdict=<KIND>, optional witness=..., optional maltsev= followed by the table.
std::string format_verdict(const DichotomyVerdict& v);
std::string format_formula(const Instance& inst);

}  // namespace sharpcsp

#endif  // SHARPCSP_DICHOTOMY_HPP_
