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

// Exact counting for strongly balanced languages: prefix counts propagated
// through rank-one block reconstruction of balance matrices.
//
// Positions are 0-based. The recursion runs over 1 <= i < j < n.

#ifndef SHARPCSP_COUNTING_HPP_
#define SHARPCSP_COUNTING_HPP_

#include <map>
#include <utility>
#include <vector>

#include "sharpcsp/frames.hpp"

namespace sharpcsp {

// N_{i,j}(a): the number of distinct (t_0..t_i, a) with t in R and t_j = a.
struct PrefixCounts {
  int i = 0, j = 0;
  std::map<Element, BigInt> values;
  friend bool operator==(const PrefixCounts&, const PrefixCounts&) = default;
};

// tij partitions the j-th projection (values sharing t_0..t_i);
// tji partitions the i-th projection (values sharing t_0..t_{i-1} and t_j).
struct CongruencePair {
  int i = 0, j = 0;
  Partition tij;
  Partition tji;
  friend bool operator==(const CongruencePair&, const CongruencePair&) = default;
};

// Caches the frames with one position pinned to a constant.
class CountingContext {
 public:
  CountingContext(const Frame& f, const MaltsevOp& phi) : f_(&f), phi_(&phi), fixer_(f, phi) {}

  const Frame& frame() const { return *f_; }
  const MaltsevOp& op() const { return *phi_; }
  PrefixFixer& fixer() { return fixer_; }
  // Frame of R with x_j = a.
  const Frame& pinned(int j, Element a);

 private:
  const Frame* f_;
  const MaltsevOp* phi_;
  PrefixFixer fixer_;
  std::map<std::pair<int, Element>, Frame> pinned_;
};

// Requires 1 <= i < j < arity.
CongruencePair congruences(const Frame& f, const MaltsevOp& phi, int i, int j);
CongruencePair congruences(CountingContext& ctx, int i, int j);

struct CountStep {
  int i = 0, j = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;  // projection on (i, j)
  CongruencePair congruence;
  PrefixCounts row_margin;  // N_{i-1,i}
  PrefixCounts col_margin;  // N_{i-1,j}
  CountMatrix quotient;     // on class representatives
  CountMatrix matrix;       // rows x in pr_i, columns y in pr_j
  PrefixCounts result;      // N_{i,j}
};

struct CountTrace {
  std::vector<int> kept;  // instance variables that occur in some constraint
  int unconstrained = 0;
  std::vector<PrefixCounts> seeds;  // N_{0,j}
  std::vector<CountStep> steps;
  BigInt total;
};

// |R| for the relation generated by a frame.
BigInt count_frame(const Frame& f, const MaltsevOp& phi, CountTrace* trace = nullptr);

// |R_Phi|. Variables in no constraint contribute a factor q each; the rest
// are counted on the frame of the instance restricted to them.
BigInt count(const RelationalStructure& s, const MaltsevOp& phi, const Instance& inst,
             CountTrace* trace = nullptr);

// M(x,y) = #{t in R : t_i = x, t_j = y}, labels the projections on i and j.
CountMatrix balance_matrix(const RelationalStructure& s, const MaltsevOp& phi,
                           const Instance& inst, int i, int j);

// M(x,y) = #{u : (u, x, y) in the projection on (0..i-1, i, j)}, i < j. The
// matrix whose margins drive the counting recursion.
CountMatrix prefix_balance_matrix(const RelationalStructure& s, const MaltsevOp& phi,
                                  const Instance& inst, int i, int j);

}  // namespace sharpcsp

#endif  // SHARPCSP_COUNTING_HPP_
