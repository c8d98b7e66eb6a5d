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
#include "sharpcsp/oracle.hpp"
#include "sharpcsp/relations.hpp"

using namespace sharpcsp;

TEST_CASE("relation sorts and deduplicates") {
  Relation r(2, {{1, 0}, {0, 1}, {1, 0}});
  CHECK(r.size() == 2);
  CHECK(r[0] == Tuple{0, 1});
  CHECK(r.contains(Tuple{1, 0}));
  CHECK_FALSE(r.contains(Tuple{1, 1}));
  CHECK_THROWS_AS(Relation(2, {{0, 1, 2}}), InvalidArgument);
}

TEST_CASE("project") {
  Relation swap(2, {{0, 1}, {1, 0}});
  std::vector<int> first{0};
  CHECK(project(swap, first) == Relation(1, {{0}, {1}}));

  std::vector<int> tail{1, 2};
  CHECK(project(fixtures::xor3_relation(), tail) == Relation(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}));

  std::vector<int> all{0, 1, 2};
  CHECK(project(fixtures::xor3_relation(), all) == fixtures::xor3_relation());

  std::vector<int> reversed{1, 0};
  CHECK(project(Relation(2, {{0, 1}}), reversed) == Relation(2, {{1, 0}}));
}

TEST_CASE("structure resolves built-ins") {
  RelationalStructure s(3);
  CHECK(s.find("EQ")->size() == 3);
  CHECK(*s.find("CONST_2") == Relation(1, {{2}}));
  CHECK_FALSE(s.find("CONST_3"));
  CHECK_FALSE(s.find("R"));
  CHECK_THROWS_AS(s.add_relation("EQ", Relation(2, {{0, 0}})), InvalidArgument);
  CHECK_THROWS_AS(s.add_relation("CONST_0", Relation(1, {{0}})), InvalidArgument);
  CHECK_THROWS_AS(s.add_relation("R", Relation(1, {{3}})), InvalidArgument);
  CHECK_THROWS_AS(s.add_relation("R", Relation(1)), InvalidArgument);
  s.add_relation("R", Relation(1, {{0}}));
  CHECK_THROWS_AS(s.add_relation("R", Relation(1, {{1}})), InvalidArgument);
  CHECK(s.language().size() == 2);
}

TEST_CASE("block decomposition") {
  auto two = block_decompose(Relation(2, {{0, 0}, {1, 1}}));
  REQUIRE(two.blocks.size() == 2);
  CHECK(two.blocks[0] == Block{{0}, {0}});
  CHECK(two.blocks[1] == Block{{1}, {1}});

  auto full = block_decompose(Relation(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  REQUIRE(full.blocks.size() == 1);
  CHECK(full.blocks[0] == Block{{0, 1}, {0, 1}});

  auto mixed = block_decompose(Relation(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}}));
  REQUIRE(mixed.blocks.size() == 2);
  CHECK(mixed.blocks[0] == Block{{0, 1}, {0, 1}});
  CHECK(mixed.blocks[1] == Block{{2}, {2}});

  // A path 0-0, 1-0, 1-1 is one block even though it is not complete.
  auto path = block_decompose(Relation(2, {{0, 0}, {1, 0}, {1, 1}}));
  CHECK(path.blocks.size() == 1);
}

TEST_CASE("rectangularity") {
  CHECK_FALSE(is_rectangular(fixtures::or2().relations().at("OR"), 1));
  CHECK_FALSE(is_rectangular(fixtures::neq3().relations().at("NEQ"), 1));
  CHECK(is_rectangular(RelationalStructure(4).equality(), 1));
  CHECK(is_rectangular(fixtures::xor3_relation(), 1));
  CHECK(is_rectangular(fixtures::xor3_relation(), 2));
}

TEST_CASE("rank-one blocks") {
  CHECK_FALSE(is_rank_one_block(CountMatrix::from_rows({{2, 1}, {1, 1}})));
  CHECK(is_rank_one_block(CountMatrix::from_rows({{1, 0}, {0, 1}})));
  CHECK(is_rank_one_block(CountMatrix::from_rows({{1, 2}, {2, 4}})));
  // Support not rectangular.
  CHECK_FALSE(is_rank_one_block(CountMatrix::from_rows({{1, 1}, {0, 1}})));
  CHECK(is_rank_one_block(CountMatrix::from_rows({{0, 0}, {0, 0}})));
  CHECK_FALSE(satisfies_rank_one_identity(CountMatrix::from_rows({{2, 1}, {1, 1}})));
  CHECK(satisfies_rank_one_identity(CountMatrix::from_rows({{1, 2}, {2, 4}})));
}

TEST_CASE("rank-one tests agree with the definitional oracle on random matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = 1 + static_cast<int>(rng() % 4);
    std::vector<std::vector<long long>> m(rows, std::vector<long long>(cols));
    for (auto& row : m)
      for (auto& x : row) x = static_cast<long long>(rng() % 3);
    const auto cm = CountMatrix::from_rows(m);
    CAPTURE(to_string(cm));
    CHECK(is_rank_one_block(cm) == oracle_rank_one_block(cm));
  }
}

TEST_CASE("reconstruct rank-one matrices") {
  BlockDecomposition single{{Block{{0}, {1, 2}}}};
  auto row = reconstruct_rank_one(single, {{0, 3}}, {{1, 1}, {2, 2}});
  CHECK(row.get(0, 1) == 1);
  CHECK(row.get(0, 2) == 2);

  BlockDecomposition square{{Block{{0, 1}, {0, 1}}}};
  auto outer = reconstruct_rank_one(square, {{0, 3}, {1, 6}}, {{0, 3}, {1, 6}});
  CHECK(outer == CountMatrix::from_rows({{1, 2}, {2, 4}}));

  BlockDecomposition diag{{Block{{0}, {0}}, Block{{1}, {1}}}};
  auto d = reconstruct_rank_one(diag, {{0, 5}, {1, 7}}, {{0, 5}, {1, 7}});
  CHECK(d == CountMatrix::from_rows({{5, 0}, {0, 7}}));

  // Margins of one block that disagree in total.
  CHECK_THROWS_AS(reconstruct_rank_one(square, {{0, 3}, {1, 6}}, {{0, 3}, {1, 5}}), NotBalancedError);
  // 2*3/4 is not an integer.
  CHECK_THROWS_AS(reconstruct_rank_one(square, {{0, 2}, {1, 2}}, {{0, 3}, {1, 1}}), NotBalancedError);
  CHECK_THROWS_AS(reconstruct_rank_one(square, {{0, 3}}, {{0, 3}, {1, 6}}), InvalidArgument);
}

TEST_CASE("count matrix accessors") {
  auto m = CountMatrix::from_rows({{2, 1}, {1, 1}});
  CHECK(to_string(m) == "[[2,1],[1,1]]");
  CHECK(m.total() == 5);
  CHECK(m.row_sums() == std::vector<BigInt>{3, 2});
  CHECK(m.col_sums() == std::vector<BigInt>{3, 2});
  CHECK(m.get(5, 5) == 0);
}

TEST_CASE("partitions") {
  auto p = Partition::from_classes({{3, 1}, {0}});
  CHECK(p.classes[0] == std::vector<std::int64_t>{0});
  CHECK(p.classes[1] == std::vector<std::int64_t>{1, 3});
  CHECK(p.class_of(3) == 1);
  CHECK(p.class_of(2) == -1);
  CHECK(p.ground() == std::vector<std::int64_t>{0, 1, 3});
}

TEST_CASE("power structures") {
  RelationalStructure s(2);
  auto p2 = power_structure(s, 2);
  CHECK(p2.domain_size() == 4);
  for (std::uint64_t x = 0; x < 4; ++x)
    for (std::uint64_t y = 0; y < 4; ++y) {
      std::vector<std::uint64_t> t{x, y};
      CHECK(p2.contains("EQ", t) == (x == y));
    }
  std::vector<Element> coords{1, 0};
  CHECK(p2.encode(coords) == 2);
  CHECK(p2.decode(2) == Tuple{1, 0});

  const auto h = fixtures::xor3_relation();
  const auto x = fixtures::xor3();
  for (int k = 1; k <= 3; ++k) {
    auto pk = power_structure(x, k);
    BigInt visited = 0;
    pk.for_each_tuple(h, [&](std::span<const std::uint64_t> t) {
      CHECK(pk.contains(h, t));
      ++visited;
      return true;
    });
    CHECK(visited == pk.tuple_count(h));
    CHECK(visited == BigInt(4) * (k > 1 ? 4 : 1) * (k > 2 ? 4 : 1));
  }

  // k = 1 is the structure itself.
  auto p1 = power_structure(x, 1);
  for (std::uint64_t a = 0; a < 2; ++a)
    for (std::uint64_t b = 0; b < 2; ++b)
      for (std::uint64_t c = 0; c < 2; ++c) {
        std::vector<std::uint64_t> t{a, b, c};
        Tuple u{static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)};
        CHECK(p1.contains(h, t) == h.contains(u));
      }
}
