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

// Small structures shared by the tests.

#ifndef SHARPCSP_TESTS_FIXTURES_HPP_
#define SHARPCSP_TESTS_FIXTURES_HPP_

#include <vector>

#include "sharpcsp/relations.hpp"

namespace fixtures {

using sharpcsp::Relation;
using sharpcsp::RelationalStructure;
using sharpcsp::Tuple;

inline Relation xor3_relation() { return Relation(3, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}); }

inline RelationalStructure xor3() {
  RelationalStructure s(2);
  s.add_relation("XOR3", xor3_relation());
  return s;
}

inline RelationalStructure or2() {
  RelationalStructure s(2);
  s.add_relation("OR", Relation(2, {{0, 1}, {1, 0}, {1, 1}}));
  return s;
}

inline RelationalStructure neq3() {
  RelationalStructure s(3);
  std::vector<Tuple> t;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b) t.push_back({a, b});
  s.add_relation("NEQ", Relation(2, t));
  return s;
}

// Rectangular with a Mal'tsev polymorphism; (x,y)-counts [[2,1],[1,1]].
inline Relation unbalanced7_relation() {
  return Relation(3, {{0, 0, 2}, {0, 1, 3}, {1, 0, 4}, {1, 1, 5}, {0, 0, 6}});
}

inline RelationalStructure unbalanced7() {
  RelationalStructure s(7);
  s.add_relation("R", unbalanced7_relation());
  return s;
}

inline RelationalStructure diag3() {
  RelationalStructure s(3);
  s.add_relation("DIAG3", Relation(3, {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}));
  return s;
}

// Only the built-in EQ and constants.
inline RelationalStructure eqconst() { return RelationalStructure(2); }

inline RelationalStructure lin3() {
  RelationalStructure s(3);
  std::vector<Tuple> t;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) t.push_back({a, b, (a + b) % 3});
  s.add_relation("LIN3", Relation(3, t));
  return s;
}

}  // namespace fixtures

#endif  // SHARPCSP_TESTS_FIXTURES_HPP_
