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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "sharpcsp/maltsev.hpp"

using namespace sharpcsp;

namespace {

MaltsevOp minority() { return MaltsevOp::affine(2); }

// Walks every Mal'tsev table in lexicographic order of its free entries and
// returns the first one preserving all user relations.
std::optional<std::vector<Element>> brute_force_least(const RelationalStructure& s) {
  const int q = s.domain_size();
  std::vector<Element> table(static_cast<std::size_t>(q) * q * q, 0);
  std::vector<std::size_t> free;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c) {
        const std::size_t idx = (static_cast<std::size_t>(a) * q + b) * q + c;
        if (b == c) {
          table[idx] = a;
        } else if (a == b) {
          table[idx] = c;
        } else {
          free.push_back(idx);
        }
      }
  auto ok = [&] {
    for (const auto& [_, h] : s.relations())
      for (const auto& t1 : h)
        for (const auto& t2 : h)
          for (const auto& t3 : h) {
            Tuple img(h.arity());
            for (int p = 0; p < h.arity(); ++p) img[p] = table[(static_cast<std::size_t>(t1[p]) * q + t2[p]) * q + t3[p]];
            if (!h.contains(img)) return false;
          }
    return true;
  };
  while (true) {
    if (ok()) return table;
    int k = static_cast<int>(free.size()) - 1;
    while (k >= 0 && ++table[free[k]] == q) table[free[k--]] = 0;
    if (k < 0) return std::nullopt;
  }
}

RelationalStructure random_structure(std::mt19937_64& rng, int q) {
  RelationalStructure s(q);
  const int relations = 1 + static_cast<int>(rng() % 2);
  for (int k = 0; k < relations; ++k) {
    const int r = 1 + static_cast<int>(rng() % 3);
    std::vector<Tuple> ts;
    const int m = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < m; ++i) {
      Tuple t(r);
      for (auto& x : t) x = static_cast<Element>(rng() % q);
      ts.push_back(t);
    }
    s.add_relation("R" + std::to_string(k), Relation(r, ts));
  }
  return s;
}

}  // namespace

TEST_CASE("operation validation") {
  CHECK_THROWS_AS(MaltsevOp(2, {0, 1}), InvalidArgument);
  // phi(0,0,1) must be 1.
  CHECK_THROWS_AS(MaltsevOp(2, {0, 0, 1, 0, 1, 0, 0, 1}), InvalidArgument);
  CHECK_THROWS_AS(MaltsevOp(2, {0, 1, 1, 0, 1, 0, 0, 2}), InvalidArgument);
  auto m = minority();
  CHECK(m(0, 1, 1) == 0);
  CHECK(m(1, 1, 0) == 0);
  CHECK(m(0, 1, 0) == 1);
}

TEST_CASE("apply") {
  auto m = minority();
  CHECK(apply(m, Tuple{0, 0}, Tuple{0, 1}, Tuple{1, 1}) == Tuple{1, 0});
  CHECK(apply(m, Tuple{0, 0, 0}, Tuple{0, 1, 1}, Tuple{1, 1, 0}) == Tuple{1, 0, 1});
  auto a3 = MaltsevOp::affine(3);
  Tuple t{2, 0, 1};
  CHECK(apply(a3, t, t, t) == t);
  CHECK_THROWS_AS(apply(m, Tuple{0}, Tuple{0, 1}, Tuple{1}), InvalidArgument);
}

TEST_CASE("preserves") {
  auto m = minority();
  CHECK(preserves(m, fixtures::xor3_relation()));
  CHECK_FALSE(preserves(m, fixtures::or2().relations().at("OR")));
  auto a3 = MaltsevOp::affine(3);
  for (Element a = 0; a < 3; ++a) CHECK(preserves(a3, Relation(1, {{a}})));
  CHECK(preserves(a3, RelationalStructure(3).equality()));
}

TEST_CASE("find_maltsev on the fixtures") {
  auto x = find_maltsev(fixtures::xor3());
  REQUIRE(x);
  CHECK(*x == minority());

  auto o = search_maltsev(fixtures::or2());
  CHECK_FALSE(o.op);
  REQUIRE(o.certificate);
  CHECK(o.certificate->relation == "OR");
  CHECK_FALSE(fixtures::or2().relations().at("OR").contains(o.certificate->image));

  CHECK_FALSE(find_maltsev(fixtures::neq3()));

  auto u = find_maltsev(fixtures::unbalanced7());
  REQUIRE(u);
  CHECK(preserves(*u, fixtures::unbalanced7_relation()));

  // No user relations: every free entry is 0.
  auto e = find_maltsev(fixtures::eqconst());
  REQUIRE(e);
  CHECK((*e)(0, 1, 0) == 0);
  CHECK((*e)(1, 0, 1) == 0);
}

TEST_CASE("find_maltsev returns the lexicographically least table") {
  std::mt19937_64 rng(11);
  int with = 0, without = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int q = trial < 110 ? 2 : 3;
    const auto s = random_structure(rng, q);
    const auto expected = brute_force_least(s);
    const auto got = find_maltsev(s);
    REQUIRE(got.has_value() == expected.has_value());
    if (got) {
      CHECK(got->table() == *expected);
      ++with;
    } else {
      ++without;
    }
  }
  CHECK(with > 0);
  CHECK(without > 0);
}

TEST_CASE("node budget") {
  MaltsevSearchOptions opts;
  opts.max_nodes = 1;
  auto r = search_maltsev(fixtures::unbalanced7(), opts);
  CHECK(r.exhausted_budget);
  CHECK_FALSE(r.op);
}

TEST_CASE("table format") {
  const auto text = format_table(minority());
  CHECK(text.rfind("0 0 0 -> 0\n0 0 1 -> 1\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 8);
}
