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

#include "fixtures.hpp"
#include "sharpcsp/io.hpp"
#include "sharpcsp/maltsev.hpp"
#include "sharpcsp/selftest.hpp"

using namespace sharpcsp;

TEST_CASE("zero trials") {
  SelftestOptions o;
  o.trials = 0;
  auto r = run_selftest(o);
  CHECK(r.ok());
  CHECK(r.trials == 0);
  CHECK(r.text.find("summary trials=0 passed=0 skipped=0 failed=0") != std::string::npos);
}

TEST_CASE("random fixtures are affine and carry a Mal'tsev polymorphism") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto s = random_affine_structure(seed);
    CHECK((s.domain_size() == 2 || s.domain_size() == 3));
    CHECK_FALSE(s.relations().empty());
    CHECK(find_maltsev(s));
    auto inst = random_instance(s, seed, 5, 5, 1 << 16);
    CHECK(inst.n >= 1);
    CHECK(inst.n <= 5);
    CHECK(inst.constraints.size() <= 5);
    CHECK_FALSE(check_case(s, s, inst, 1 << 16));
  }
}

TEST_CASE("a passing run") {
  SelftestOptions o;
  o.trials = 40;
  auto r = run_selftest(o);
  CHECK(r.ok());
  CHECK(r.passed + r.skipped == 40);
  CHECK(r.text.rfind("selftest seed=1", 0) == 0);
}

TEST_CASE("runs are reproducible") {
  SelftestOptions o;
  o.seed = 7;
  o.trials = 25;
  CHECK(run_selftest(o).text == run_selftest(o).text);
  SelftestOptions other = o;
  other.seed = 8;
  CHECK(run_selftest(other).text != run_selftest(o).text);
}

TEST_CASE("a wrong oracle is caught and minimized") {
  SelftestOptions o;
  o.trials = 10;
  o.fixture = fixtures::xor3();
  o.inject_wrong = true;
  auto r = run_selftest(o);
  CHECK_FALSE(r.ok());
  CHECK(r.failed >= 1);
  CHECK(r.text.find("MISMATCH") != std::string::npos);
  const auto at = r.text.find("minimal failing case:");
  REQUIRE(at != std::string::npos);
  // The minimal case is one constraint long.
  const auto inst_at = r.text.find("vars ", at);
  REQUIRE(inst_at != std::string::npos);
  const auto end = r.text.find("trial ", inst_at);
  const std::string inst = r.text.substr(inst_at, end - inst_at);
  CHECK(std::count(inst.begin(), inst.end(), '\n') == 2);
}

TEST_CASE("fixed fixture passes") {
  for (const auto& s : {fixtures::xor3(), fixtures::diag3(), fixtures::eqconst(), fixtures::lin3()}) {
    SelftestOptions o;
    o.trials = 20;
    o.fixture = s;
    auto r = run_selftest(o);
    CHECK(r.ok());
  }
}

TEST_CASE("check_case reports differences") {
  RelationalStructure wrong(2);
  wrong.add_relation("XOR3", Relation(3, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
  Instance inst{3, {{"XOR3", {0, 1, 2}}}};
  auto msg = check_case(fixtures::xor3(), wrong, inst, 1 << 16);
  REQUIRE(msg);
  CHECK(msg->find("count") != std::string::npos);
  CHECK_FALSE(check_case(fixtures::xor3(), fixtures::xor3(), inst, 1 << 16));
}
