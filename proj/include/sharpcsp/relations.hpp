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

// Core data model: relations, relational structures, partitions, count
// matrices with their block structure, and implicit power structures.
//
// All positions in this API are 0-based. File formats use 1-based variables.

#ifndef SHARPCSP_RELATIONS_HPP_
#define SHARPCSP_RELATIONS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sharpcsp/common.hpp"

namespace sharpcsp {

// A finite set of equal-length tuples, kept sorted and duplicate-free.
class Relation {
 public:
  explicit Relation(int arity = 0) : arity_(arity) {}
  // Sorts and deduplicates; throws InvalidArgument on a length mismatch.
  Relation(int arity, std::vector<Tuple> tuples);

  int arity() const { return arity_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  const Tuple& operator[](std::size_t i) const { return tuples_[i]; }
  auto begin() const { return tuples_.begin(); }
  auto end() const { return tuples_.end(); }

  bool contains(std::span<const Element> t) const;
  // ‖H‖ = |H| * arity.
  std::size_t matrix_size() const { return tuples_.size() * arity_; }

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  int arity_;
  std::vector<Tuple> tuples_;
};

// Image of R on the given positions, in the given order.
Relation project(const Relation& r, std::span<const int> positions);

// Conjoins tuple-level selection; convenience for tests and the oracle.
Relation filter(const Relation& r, const std::function<bool(const Tuple&)>& keep);

// Relations of one structure, equality built in under the name "EQ" and the
// constants under "CONST_<a>". Neither may be redefined.
class RelationalStructure {
 public:
  static constexpr const char* kEquality = "EQ";
  static constexpr const char* kConstPrefix = "CONST_";

  explicit RelationalStructure(int domain_size);

  int domain_size() const { return q_; }

  // Throws InvalidArgument for reserved or duplicate names, empty relations,
  // or out-of-range elements.
  void add_relation(const std::string& name, Relation r);

  // User relations only, ordered by name.
  const std::map<std::string, Relation>& relations() const { return relations_; }
  // User relations plus EQ; this is Γ for the dichotomy.
  std::vector<std::pair<std::string, const Relation*>> language() const;

  // Resolves user relations, EQ and CONST_<a>.
  std::optional<Relation> find(const std::string& name) const;
  bool is_reserved(const std::string& name) const;

  const Relation& equality() const { return equality_; }
  // ‖Γ‖ including EQ.
  std::size_t size() const;

 private:
  int q_;
  Relation equality_;
  std::map<std::string, Relation> relations_;
};

// A partition of a finite ground set; classes sorted internally and ordered
// by their least element.
struct Partition {
  std::vector<std::vector<std::int64_t>> classes;

  static Partition from_classes(std::vector<std::vector<std::int64_t>> classes);
  std::vector<std::int64_t> ground() const;
  // Index of the class containing x, or -1.
  int class_of(std::int64_t x) const;
  friend bool operator==(const Partition&, const Partition&) = default;
};

std::string to_string(const Partition& p);

// One connected component of the bipartite support graph.
struct Block {
  std::vector<std::int64_t> rows;
  std::vector<std::int64_t> cols;
  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockDecomposition {
  std::vector<Block> blocks;
  friend bool operator==(const BlockDecomposition&, const BlockDecomposition&) = default;
};

// Connected components of the bipartite graph with the given edges. Rows and
// columns live in separate vertex namespaces. Blocks are ordered by their
// least row label.
BlockDecomposition block_decompose(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& edges);
// B must have arity 2.
BlockDecomposition block_decompose(const Relation& b);

// Rectangularity of R seen as a binary relation on D^k x D^(r-k), decided by
// checking that every block is a complete bipartite graph.
bool is_rectangular(const Relation& r, int split);

// Dense matrix of non-negative big integers with integer row/column labels.
// Rows index the first argument, columns the second.
class CountMatrix {
 public:
  CountMatrix() = default;
  CountMatrix(std::vector<std::int64_t> row_labels, std::vector<std::int64_t> col_labels);
  static CountMatrix from_rows(const std::vector<std::vector<long long>>& rows);

  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  const std::vector<std::int64_t>& row_labels() const { return row_labels_; }
  const std::vector<std::int64_t>& col_labels() const { return col_labels_; }

  const BigInt& at(std::size_t r, std::size_t c) const { return entries_[r * cols() + c]; }
  BigInt& at(std::size_t r, std::size_t c) { return entries_[r * cols() + c]; }
  // By label; absent labels read as 0.
  BigInt get(std::int64_t row_label, std::int64_t col_label) const;
  int row_index(std::int64_t label) const;
  int col_index(std::int64_t label) const;

  BigInt total() const;
  std::vector<BigInt> row_sums() const;
  std::vector<BigInt> col_sums() const;
  std::vector<std::pair<std::int64_t, std::int64_t>> support() const;

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

 private:
  std::vector<std::int64_t> row_labels_;
  std::vector<std::int64_t> col_labels_;
  std::vector<BigInt> entries_;
};

std::string to_string(const CountMatrix& m);

// Support rectangular and every block of rank one.
bool is_rank_one_block(const CountMatrix& m);

// a_ir^2 a_js^2 a_is a_jr == a_is^2 a_jr^2 a_ir a_js for all index quadruples.
// Equivalent to is_rank_one_block for matrices with rectangular support.
bool satisfies_rank_one_identity(const CountMatrix& m);

// Rebuilds the unique rank-one block matrix with the given support blocks and
// margins. Throws NotBalancedError when a block's margins disagree or an
// entry is not integral, InvalidArgument when a total is missing.
CountMatrix reconstruct_rank_one(const BlockDecomposition& blocks,
                                 const std::map<std::int64_t, BigInt>& row_totals,
                                 const std::map<std::int64_t, BigInt>& col_totals);

// Implicit k-th power of a structure. Elements of D^k are encoded base q with
// the first coordinate most significant. H^k is never materialized.
class PowerStructure {
 public:
  PowerStructure(const RelationalStructure& base, int k);

  const RelationalStructure& base() const { return *base_; }
  int power() const { return k_; }
  int base_domain_size() const { return base_->domain_size(); }
  std::uint64_t domain_size() const { return size_; }

  std::uint64_t encode(std::span<const Element> coords) const;
  Tuple decode(std::uint64_t element) const;

  // Componentwise membership of a tuple of power elements in H^k.
  bool contains(const Relation& h, std::span<const std::uint64_t> tuple) const;
  bool contains(const std::string& name, std::span<const std::uint64_t> tuple) const;

  // |H^k| = |H|^k.
  BigInt tuple_count(const Relation& h) const;

  // Lazily visits H^k as k-fold products of H. Stops when `visit` returns false;
  // returns false iff stopped early.
  bool for_each_tuple(const Relation& h,
                      const std::function<bool(std::span<const std::uint64_t>)>& visit) const;

 private:
  const RelationalStructure* base_;
  int k_;
  std::uint64_t size_;
};

PowerStructure power_structure(const RelationalStructure& s, int k);

}  // namespace sharpcsp

#endif  // SHARPCSP_RELATIONS_HPP_
