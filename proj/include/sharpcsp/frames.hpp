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

// Frames: small sub-relations with a witness function that generate a
// strongly rectangular relation under a Mal'tsev operation, and their
// construction for CSP instances.
//
// Positions are 0-based here; the instance file format and the frame dump
// use 1-based variables.

#ifndef SHARPCSP_FRAMES_HPP_
#define SHARPCSP_FRAMES_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sharpcsp/maltsev.hpp"
#include "sharpcsp/relations.hpp"

namespace sharpcsp {

struct Constraint {
  std::string relation;
  std::vector<int> scope;  // 0-based variables
};

struct Instance {
  int n = 0;
  std::vector<Constraint> constraints;
};

// A constraint with its relation resolved and repeated variables collapsed.
struct BoundConstraint {
  Relation relation;
  std::vector<int> scope;  // distinct
};

// Keeps the tuples whose entries agree wherever the scope repeats a variable
// and projects onto first occurrences.
BoundConstraint collapse_scope(const Relation& h, std::span<const int> scope);

// Resolves names against S (including EQ and CONST_<a>). Throws
// InvalidArgument on unknown names, arity mismatches or bad variables.
std::vector<BoundConstraint> bind(const RelationalStructure& s, const Instance& phi);

class Frame {
 public:
  Frame() = default;
  // Rows and an explicit witness table (q*n entries, -1 = undefined,
  // indexed a*n + i). Only shapes are checked.
  Frame(int n, int q, std::vector<Tuple> rows, std::vector<int> witness);

  // The frame of the empty n-ary relation.
  static Frame empty_relation(int n, int q);
  // Rows that already form a frame of the relation they generate; the
  // witness function is recovered from common prefixes. Throws
  // InvalidArgument if some prefix class has no common prefix.
  static Frame from_rows(int n, int q, std::vector<Tuple> rows);

  int arity() const { return n_; }
  int domain_size() const { return q_; }
  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }
  const std::vector<Tuple>& rows() const { return rows_; }
  const Tuple& row(std::size_t k) const { return rows_[k]; }

  // Row index witnessing (a, i), or -1 when a is not in the i-th projection.
  int witness(Element a, int i) const { return witness_[static_cast<std::size_t>(a) * n_ + i]; }
  const Tuple& witness_row(Element a, int i) const { return rows_[witness(a, i)]; }
  std::vector<Element> projection(int i) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int n_ = 0;
  int q_ = 0;
  std::vector<Tuple> rows_;
  std::vector<int> witness_;
};

// The listed Closure procedure, verbatim: new rows are appended when their
// image on `positions` is new.
std::vector<Tuple> closure_project(const std::vector<Tuple>& s, const MaltsevOp& phi,
                                   std::span<const int> positions);

// Closure after keeping one row per image on `positions`. Same projection,
// fewer triples.
std::vector<Tuple> generate_projection(const std::vector<Tuple>& s, const MaltsevOp& phi,
                                       std::span<const int> positions);

// The whole generated relation, by closing on every position.
Relation generated_relation(const Frame& f, const MaltsevOp& phi);

Frame shrink_to_small(const Frame& f, const MaltsevOp& phi);

bool member(const Frame& f, const MaltsevOp& phi, std::span<const Element> t);

// Frame of R(a, x_2, ..., x_n) on the remaining n-1 positions.
Frame fix_first(const Frame& f, const MaltsevOp& phi, Element a);
Frame fix_prefix(const Frame& f, const MaltsevOp& phi, std::span<const Element> values);

// Memoized fix_prefix for one base frame.
class PrefixFixer {
 public:
  PrefixFixer(const Frame& base, const MaltsevOp& phi) : base_(&base), phi_(&phi) {}
  const Frame& get(std::span<const Element> prefix);

 private:
  const Frame* base_;
  const MaltsevOp* phi_;
  std::map<Tuple, Frame> cache_;
};

Frame initial_frame(int n, int q);

Frame add_constraint(const Frame& f, const MaltsevOp& phi, const BoundConstraint& c);
Frame add_constraint_split(const Frame& f, const MaltsevOp& phi, const BoundConstraint& c);

Frame build_frame(const RelationalStructure& s, const MaltsevOp& phi, const Instance& inst,
                  bool split = false);

// Classes of values at position i that share a prefix, read off the witness
// function.
Partition frame_congruence(const Frame& f, int i);

// Every tuple of the generated relation, in lexicographic order, by prefix
// extension. Throws CapExceeded past `cap` tuples.
std::vector<Tuple> enumerate_frame(const Frame& f, const MaltsevOp& phi, std::size_t cap);

// "frame n=<n> rows=<k>", the rows, then "witness a=<a> i=<i> row=<r>" with
// 1-based i.
std::string dump(const Frame& f);

}  // namespace sharpcsp

#endif  // SHARPCSP_FRAMES_HPP_
