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

// Randomized comparison of the frame-based algorithms against the oracle.

#ifndef SHARPCSP_SELFTEST_HPP_
#define SHARPCSP_SELFTEST_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "sharpcsp/frames.hpp"
#include "sharpcsp/relations.hpp"

namespace sharpcsp {

struct SelftestOptions {
  std::uint64_t seed = 1;
  int trials = 100;
  int max_vars = 6;
  int max_constraints = 6;
  // Cases whose q^n exceeds this are skipped and reported.
  std::uint64_t cap = std::uint64_t{1} << 16;
  // Use this structure instead of random affine fixtures.
  std::optional<RelationalStructure> fixture;
  // Test of the tester: the oracle sees each fixture with one tuple removed.
  bool inject_wrong = false;
};

struct SelftestReport {
  int trials = 0;
  int passed = 0;
  int skipped = 0;
  int failed = 0;
  std::string text;
  bool ok() const { return failed == 0; }
};

// A random structure whose relations are cosets of subgroups of Z_p^r.
RelationalStructure random_affine_structure(std::uint64_t seed);
Instance random_instance(const RelationalStructure& s, std::uint64_t seed, int max_vars,
                         int max_constraints, std::uint64_t cap);

// Compares count, frame shape, membership and congruences with brute force.
// Returns a description of the first disagreement.
std::optional<std::string> check_case(const RelationalStructure& s,
                                      const RelationalStructure& oracle_view,
                                      const Instance& inst, std::uint64_t cap);

SelftestReport run_selftest(const SelftestOptions& opts);

}  // namespace sharpcsp

#endif  // SHARPCSP_SELFTEST_HPP_
