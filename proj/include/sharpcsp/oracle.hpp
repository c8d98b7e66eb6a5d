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

// Brute-force reference implementations. Nothing here uses frames,
// Mal'tsev operations or rank-one reconstruction.

#ifndef SHARPCSP_ORACLE_HPP_
#define SHARPCSP_ORACLE_HPP_

#include <cstdint>

#include "sharpcsp/counting.hpp"
#include "sharpcsp/frames.hpp"
#include "sharpcsp/relations.hpp"

namespace sharpcsp {

// Default: n * log2(q) <= 24.
inline constexpr std::uint64_t kOracleCap = std::uint64_t{1} << 24;

// Checks all q^n assignments. Throws CapExceeded when q^n > cap.
Relation enumerate_solutions(const RelationalStructure& s, const Instance& inst,
                             std::uint64_t cap = kOracleCap);
BigInt oracle_count(const RelationalStructure& s, const Instance& inst,
                    std::uint64_t cap = kOracleCap);

struct OracleBalance {
  CountMatrix matrix;
  bool rank_one = false;
};

// Rows are the first k coordinates, columns the next l, entries count the
// remaining m coordinates. Slices are labelled base (max element + 1), so a
// single coordinate is labelled by its value.
OracleBalance oracle_balance(const Relation& r, int k, int l, int m);

// Values at position i related by a common prefix, transitively closed.
Partition oracle_congruence(const Relation& r, int i);
// The pair of partitions used by the counting recursion, from their
// definitions; 1 <= i < j < arity.
CongruencePair oracle_congruence_pair(const Relation& r, int i, int j);

// #{u : (u, x, y) in the projection on (0..i-1, i, j)}.
CountMatrix oracle_prefix_matrix(const Relation& r, int i, int j);
// N_{i,j}: the number of distinct (t_0..t_i, t_j) per value of t_j.
PrefixCounts oracle_prefix_counts(const Relation& r, int i, int j);

// Rank-one block test from the definition: connected components of the
// support, every component full, exact rank one over the rationals.
bool oracle_rank_one_block(const CountMatrix& m);

}  // namespace sharpcsp

#endif  // SHARPCSP_ORACLE_HPP_
