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

// Ternary Mal'tsev operations and the polymorphism search that decides strong
// rectangularity.

#ifndef SHARPCSP_MALTSEV_HPP_
#define SHARPCSP_MALTSEV_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sharpcsp/relations.hpp"

namespace sharpcsp {

// Total table D^3 -> D with phi(a,b,b) = phi(b,b,a) = a, indexed a*q*q + b*q + c.
class MaltsevOp {
 public:
  // Throws InvalidArgument if the table has the wrong size, leaves the
  // domain, or breaks the Mal'tsev identities.
  MaltsevOp(int q, std::vector<Element> table);

  // x - y + z mod q. For q = 2 this is the minority operation.
  static MaltsevOp affine(int q);

  int domain_size() const { return q_; }
  const std::vector<Element>& table() const { return table_; }
  Element operator()(Element a, Element b, Element c) const {
    return table_[(static_cast<std::size_t>(a) * q_ + b) * q_ + c];
  }

  friend bool operator==(const MaltsevOp&, const MaltsevOp&) = default;

 private:
  int q_;
  std::vector<Element> table_;
};

// Coordinatewise application; throws InvalidArgument on a length mismatch.
Tuple apply(const MaltsevOp& phi, std::span<const Element> t1, std::span<const Element> t2,
            std::span<const Element> t3);

bool preserves(const MaltsevOp& phi, const Relation& h);

// Three tuples of one relation whose image lies outside it under every
// Mal'tsev operation.
struct RectangularityViolation {
  std::string relation;
  Tuple t1, t2, t3;
  Tuple image;
};

std::string to_string(const RectangularityViolation& v);

struct MaltsevSearchOptions {
  std::uint64_t max_nodes = 0;  // 0 = unlimited
};

struct MaltsevSearch {
  std::optional<MaltsevOp> op;
  // Set when no operation exists and the failure is visible without search.
  std::optional<RectangularityViolation> certificate;
  bool exhausted_budget = false;
  std::uint64_t nodes = 0;
};

// Lexicographically least Mal'tsev polymorphism of the user relations
// (EQ and the constants are preserved by every such operation). Entries that
// no relation constrains are 0.
MaltsevSearch search_maltsev(const RelationalStructure& s, const MaltsevSearchOptions& opts = {});
std::optional<MaltsevOp> find_maltsev(const RelationalStructure& s);

// q^3 lines "a b c -> v".
std::string format_table(const MaltsevOp& phi);

}  // namespace sharpcsp

#endif  // SHARPCSP_MALTSEV_HPP_
