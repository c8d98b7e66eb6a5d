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

#include <map>
#include <set>

#include "fixtures.hpp"
#include "sharpcsp/dichotomy.hpp"
#include "sharpcsp/oracle.hpp"

using namespace sharpcsp;

namespace {

Tuple decode6(std::uint64_t x, int q) {
  Tuple t(6);
  for (int c = 5; c >= 0; --c) {
    t[c] = static_cast<Element>(x % q);
    x /= q;
  }
  return t;
}

// Independent check that a map on D^k sends every tuple of every H^k into H^k,
// by materializing H^k.
bool brute_force_automorphism(const RelationalStructure& s, int k, const std::vector<std::uint64_t>& map) {
  const std::uint64_t q = s.domain_size();
  std::vector<char> hit(map.size(), 0);
  for (auto v : map) {
    if (v >= map.size() || hit[v]) return false;
    hit[v] = 1;
  }
  for (const auto& [_, h] : s.relations()) {
    std::vector<std::vector<std::uint64_t>> power{std::vector<std::uint64_t>(h.arity(), 0)};
    for (int c = 0; c < k; ++c) {
      std::vector<std::vector<std::uint64_t>> next;
      for (const auto& partial : power)
        for (const auto& t : h) {
          auto grown = partial;
          for (int p = 0; p < h.arity(); ++p) grown[p] = grown[p] * q + static_cast<std::uint64_t>(t[p]);
          next.push_back(std::move(grown));
        }
      power = std::move(next);
    }
    std::set<std::vector<std::uint64_t>> members(power.begin(), power.end());
    for (const auto& t : power) {
      std::vector<std::uint64_t> img(t.size());
      for (std::size_t p = 0; p < t.size(); ++p) img[p] = map[t[p]];
      if (!members.count(img)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("patterns") {
  auto p = patterns(2, 0, 1, 0, 1);
  CHECK(decode6(p.abar, 2) == Tuple{0, 0, 0, 1, 1, 1});
  CHECK(decode6(p.cbar, 2) == Tuple{0, 0, 1, 1, 1, 0});
  CHECK(decode6(p.dbar, 2) == Tuple{1, 1, 0, 0, 0, 1});

  auto same = patterns(3, 2, 0, 1, 1);
  CHECK(same.cbar == same.dbar);

  auto flat = patterns(3, 2, 2, 2, 2);
  CHECK(decode6(flat.abar, 3) == Tuple(6, 2));
  CHECK(decode6(flat.cbar, 3) == Tuple(6, 2));
  CHECK(decode6(flat.dbar, 3) == Tuple(6, 2));
  CHECK_THROWS_AS(patterns(2, 0, 0, 0, 2), InvalidArgument);
}

TEST_CASE("find_automorphism on tiny structures") {
  RelationalStructure c0(2);
  c0.add_relation("C0", Relation(1, {{0}}));
  auto id = find_automorphism(c0, 1, {}, {});
  REQUIRE(id.map);
  CHECK(*id.map == std::vector<std::uint64_t>{0, 1});
  CHECK_FALSE(find_automorphism(c0, 1, {{0, 1}}, {}).map);

  auto swap = find_automorphism(fixtures::xor3(), 1, {{0, 1}}, {});
  // Complementing every coordinate sends XOR3 to x1+x2+x3 = 1, which is not XOR3.
  CHECK_FALSE(swap.map);

  RelationalStructure x3(2);
  x3.add_relation("X", Relation(3, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}, {0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}}));
  auto full = find_automorphism(x3, 1, {{0, 1}}, {});
  REQUIRE(full.map);
  CHECK(*full.map == std::vector<std::uint64_t>{1, 0});

  // Complement-closed relation: x1 != x2.
  RelationalStructure ne(2);
  ne.add_relation("NE", Relation(2, {{0, 1}, {1, 0}}));
  auto flip = find_automorphism(ne, 1, {{0, 1}}, {});
  REQUIRE(flip.map);
  CHECK(*flip.map == std::vector<std::uint64_t>{1, 0});

  // Contradictory requirements.
  CHECK_FALSE(find_automorphism(ne, 1, {{0, 1}, {0, 0}}, {}).map);
  CHECK_FALSE(find_automorphism(ne, 1, {{0, 1}, {1, 1}}, {}).map);
  CHECK_THROWS_AS(find_automorphism(ne, 1, {{0, 2}}, {}), InvalidArgument);
}

TEST_CASE("automorphisms found on powers are genuine") {
  const std::vector<RelationalStructure> langs{fixtures::xor3(), fixtures::diag3(), fixtures::unbalanced7()};
  const std::vector<int> powers{3, 2, 1};
  for (std::size_t l = 0; l < langs.size(); ++l) {
    const auto& s = langs[l];
    const int k = powers[l];
    AutomorphismSearch search(s.domain_size(), {s.relations().begin()->second}, k);
    const std::uint64_t n = search.domain_size();
    for (std::uint64_t x = 0; x < std::min<std::uint64_t>(n, 8); ++x)
      for (std::uint64_t y = 0; y < std::min<std::uint64_t>(n, 8); ++y) {
        auto r = search.run({{x, y}}, {});
        CHECK_FALSE(r.exhausted_budget);
        if (!r.map) continue;
        CHECK((*r.map)[x] == y);
        CHECK(search.is_automorphism(*r.map));
        CHECK(brute_force_automorphism(s, k, *r.map));
      }
  }
}

TEST_CASE("identity handles the skipped quadruples") {
  for (const auto& s : {fixtures::xor3(), fixtures::diag3()}) {
    const int q = s.domain_size();
    AutomorphismSearch search(q, {s.relations().begin()->second}, 6);
    std::vector<std::uint64_t> identity(search.domain_size());
    for (std::uint64_t e = 0; e < identity.size(); ++e) identity[e] = e;
    CHECK(search.is_automorphism(identity));
    for (Element a = 0; a < q; ++a)
      for (Element c = 0; c < q; ++c) {
        auto p = patterns(q, a, (a + 1) % q, c, c);
        CHECK(identity[p.cbar] == p.dbar);
        CHECK(identity[p.abar] == p.abar);
      }
  }
}

TEST_CASE("refute_balance") {
  auto u = fixtures::unbalanced7();
  auto phi = *find_maltsev(u);
  auto r = refute_balance(u, phi, {});
  REQUIRE(r);
  CHECK(to_string(r->matrix) == "[[2,1],[1,1]]");
  CHECK(r->first == 0);
  CHECK(r->second == 1);
  CHECK(format_formula(r->formula) == "R(x1,x2,x3)");
  CHECK(r->matrix == oracle_balance(fixtures::unbalanced7_relation(), 1, 1, 1).matrix);
  CHECK_FALSE(oracle_balance(fixtures::unbalanced7_relation(), 1, 1, 1).rank_one);

  for (int q : {2, 3, 4}) {
    RelationalStructure eq(q);
    RefuteOptions many;
    many.random_formulas = 64;
    many.max_vars = 5;
    CHECK_FALSE(refute_balance(eq, *find_maltsev(eq), many));
  }

  auto x = fixtures::xor3();
  CHECK_FALSE(refute_balance(x, *find_maltsev(x), {}));
}

TEST_CASE("dichotomy verdicts") {
  auto x = decide_strong_balance(fixtures::xor3(), {});
  CHECK(x.kind == VerdictKind::kBalanced);
  CHECK(x.quadruples_checked == 8);
  REQUIRE(x.maltsev);

  auto o = decide_strong_balance(fixtures::or2(), {});
  CHECK(o.kind == VerdictKind::kNotStronglyRectangular);
  CHECK(o.rectangularity);

  CHECK(decide_strong_balance(fixtures::neq3(), {}).kind == VerdictKind::kNotStronglyRectangular);

  auto u = decide_strong_balance(fixtures::unbalanced7(), {});
  CHECK(u.kind == VerdictKind::kNotBalanced);
  REQUIRE(u.refutation);
  CHECK(to_string(u.refutation->matrix) == "[[2,1],[1,1]]");

  auto d = decide_strong_balance(fixtures::diag3(), {});
  CHECK(d.kind == VerdictKind::kBalanced);
  CHECK(d.quadruples_checked == 54);

  CHECK(decide_strong_balance(fixtures::eqconst(), {}).kind == VerdictKind::kBalanced);
}

TEST_CASE("the automorphism sweep alone finds an unbalanced language") {
  // Strongly rectangular, refuted by the matrix of positions 2 and 3.
  RelationalStructure s(3);
  s.add_relation("R", Relation(3, {{0, 0, 2}, {0, 2, 1}, {1, 0, 1}, {1, 2, 2}, {2, 0, 2}, {2, 2, 1}}));
  auto phi = find_maltsev(s);
  REQUIRE(phi);
  REQUIRE(refute_balance(s, *phi, {}));

  DecideOptions no_refuter;
  no_refuter.run_refuter = false;
  auto v = decide_strong_balance(s, no_refuter);
  CHECK(v.kind == VerdictKind::kNotBalanced);
  REQUIRE(v.quadruple);
  CHECK_FALSE(v.refutation);

  no_refuter.parallel = true;
  no_refuter.threads = 3;
  auto p = decide_strong_balance(s, no_refuter);
  CHECK(p.kind == v.kind);
  CHECK(p.quadruples_checked == v.quadruples_checked);
  CHECK(format_verdict(p) == format_verdict(v));

  // The witness quadruple has no automorphism.
  const auto& qd = *v.quadruple;
  auto pt = patterns(3, qd.a, qd.b, qd.c, qd.d);
  CHECK_FALSE(find_automorphism(s, 6, {{pt.abar, pt.abar}, {pt.cbar, pt.dbar}}, {}).map);
}

TEST_CASE("budgets give TIMEOUT") {
  DecideOptions tight;
  tight.run_refuter = false;
  tight.per_quadruple.max_nodes = 1;
  RelationalStructure s(3);
  s.add_relation("R", Relation(3, {{0, 0, 2}, {0, 2, 1}, {1, 0, 1}, {1, 2, 2}, {2, 0, 2}, {2, 2, 1}}));
  auto v = decide_strong_balance(s, tight);
  CHECK(v.kind == VerdictKind::kTimeout);
  CHECK(v.quadruple);

  DecideOptions small;
  small.max_power_domain = 63;
  auto w = decide_strong_balance(fixtures::xor3(), small);
  CHECK(w.kind == VerdictKind::kTimeout);
  CHECK(w.note.find("64") != std::string::npos);

  DecideOptions maltsev_budget;
  maltsev_budget.maltsev.max_nodes = 1;
  CHECK(decide_strong_balance(fixtures::unbalanced7(), maltsev_budget).kind == VerdictKind::kTimeout);
}

TEST_CASE("verdicts are deterministic") {
  for (const auto& s : {fixtures::xor3(), fixtures::unbalanced7(), fixtures::or2(), fixtures::diag3()}) {
    CHECK(format_verdict(decide_strong_balance(s, {})) == format_verdict(decide_strong_balance(s, {})));
  }
  DecideOptions par;
  par.parallel = true;
  par.threads = 4;
  CHECK(format_verdict(decide_strong_balance(fixtures::diag3(), par)) ==
        format_verdict(decide_strong_balance(fixtures::diag3(), {})));
}

TEST_CASE("verdict format") {
  auto x = format_verdict(decide_strong_balance(fixtures::xor3(), {}));
  CHECK(x.rfind("verdict=BALANCED\n", 0) == 0);
  CHECK(x.find("maltsev=\n0 0 0 -> 0\n") != std::string::npos);
  auto u = format_verdict(decide_strong_balance(fixtures::unbalanced7(), {}));
  CHECK(u.find("witness=balance formula=R(x1,x2,x3) pair=(x1,x2) matrix=[[2,1],[1,1]]") != std::string::npos);
  const auto table_start = u.find("maltsev=\n");
  REQUIRE(table_start != std::string::npos);
  CHECK(std::count(u.begin() + static_cast<std::ptrdiff_t>(table_start), u.end(), '\n') == 1 + 343);
  auto o = format_verdict(decide_strong_balance(fixtures::or2(), {}));
  CHECK(o.find("witness=rectangularity OR") != std::string::npos);
  CHECK(o.find("maltsev=") == std::string::npos);
}
