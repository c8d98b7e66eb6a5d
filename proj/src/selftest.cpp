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

#include "sharpcsp/selftest.hpp"

#include <random>
#include <sstream>

#include "sharpcsp/counting.hpp"
#include "sharpcsp/io.hpp"
#include "sharpcsp/maltsev.hpp"
#include "sharpcsp/oracle.hpp"

namespace sharpcsp {

namespace {

std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

// Solutions of A x = A x0 over Z_p.
Relation random_coset(std::mt19937_64& rng, int p, int r) {
  const int rank = static_cast<int>(pick(rng, r));
  std::vector<std::vector<int>> a(rank, std::vector<int>(r));
  for (auto& row : a)
    for (auto& x : row) x = static_cast<int>(pick(rng, p));
  Tuple x0(r);
  for (auto& x : x0) x = static_cast<Element>(pick(rng, p));
  std::vector<int> b(rank, 0);
  for (int k = 0; k < rank; ++k)
    for (int c = 0; c < r; ++c) b[k] = (b[k] + a[k][c] * x0[c]) % p;
  std::vector<Tuple> tuples;
  Tuple t(r, 0);
  while (true) {
    bool ok = true;
    for (int k = 0; k < rank && ok; ++k) {
      int sum = 0;
      for (int c = 0; c < r; ++c) sum += a[k][c] * t[c];
      ok = sum % p == b[k];
    }
    if (ok) tuples.push_back(t);
    int c = r - 1;
    while (c >= 0 && ++t[c] == p) t[c--] = 0;
    if (c < 0) break;
  }
  return Relation(r, std::move(tuples));
}

RelationalStructure without_first_tuples(const RelationalStructure& s) {
  RelationalStructure out(s.domain_size());
  for (const auto& [name, rel] : s.relations()) {
    std::vector<Tuple> rest(rel.begin(), rel.end());
    if (rest.size() > 1) rest.erase(rest.begin());
    out.add_relation(name, Relation(rel.arity(), std::move(rest)));
  }
  return out;
}

std::string describe_relations(const RelationalStructure& s) {
  std::string out;
  for (const auto& [name, rel] : s.relations()) {
    out += " " + name + "/" + std::to_string(rel.arity()) + ":" + std::to_string(rel.size());
  }
  return out.empty() ? " (none)" : out;
}

// Drops constraints, then unused variables, while the case still fails.
Instance minimize(const RelationalStructure& s, const RelationalStructure& view, Instance inst,
                  std::uint64_t cap) {
  auto fails = [&](const Instance& candidate) {
    try {
      return check_case(s, view, candidate, cap).has_value();
    } catch (const Error&) {
      return false;
    }
  };
  for (std::size_t k = 0; k < inst.constraints.size();) {
    Instance smaller = inst;
    smaller.constraints.erase(smaller.constraints.begin() + static_cast<std::ptrdiff_t>(k));
    if (fails(smaller)) {
      inst = std::move(smaller);
    } else {
      ++k;
    }
  }
  for (int v = inst.n - 1; v >= 0; --v) {
    bool used = false;
    for (const auto& c : inst.constraints)
      for (int x : c.scope) used |= x == v;
    if (used) continue;
    Instance smaller = inst;
    smaller.n -= 1;
    for (auto& c : smaller.constraints)
      for (int& x : c.scope)
        if (x > v) --x;
    if (fails(smaller)) inst = std::move(smaller);
  }
  return inst;
}

}  // namespace

RelationalStructure random_affine_structure(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int p = pick(rng, 2) ? 3 : 2;
  RelationalStructure s(p);
  const int relations = 1 + static_cast<int>(pick(rng, 2));
  for (int k = 0; k < relations; ++k) {
    const int r = 1 + static_cast<int>(pick(rng, 3));
    s.add_relation("R" + std::to_string(k + 1), random_coset(rng, p, r));
  }
  return s;
}

Instance random_instance(const RelationalStructure& s, std::uint64_t seed, int max_vars,
                         int max_constraints, std::uint64_t cap) {
  std::mt19937_64 rng(seed);
  int limit = 1;
  while (limit < max_vars && checked_power(s.domain_size(), limit + 1) <= cap) ++limit;
  Instance inst{1 + static_cast<int>(pick(rng, limit)), {}};
  std::vector<std::pair<std::string, int>> lang;
  for (const auto& [name, rel] : s.language()) lang.emplace_back(name, rel->arity());
  for (Element a = 0; a < s.domain_size(); ++a)
    lang.emplace_back(RelationalStructure::kConstPrefix + std::to_string(a), 1);
  const int m = static_cast<int>(pick(rng, max_constraints + 1));
  for (int k = 0; k < m; ++k) {
    // Constants are drawn less often so that most instances stay satisfiable.
    std::size_t idx = pick(rng, lang.size());
    if (lang[idx].first.rfind(RelationalStructure::kConstPrefix, 0) == 0 && pick(rng, 3)) {
      idx = pick(rng, lang.size() - s.domain_size());
    }
    Constraint c{lang[idx].first, {}};
    for (int p = 0; p < lang[idx].second; ++p) c.scope.push_back(static_cast<int>(pick(rng, inst.n)));
    inst.constraints.push_back(std::move(c));
  }
  return inst;
}

std::optional<std::string> check_case(const RelationalStructure& s,
                                      const RelationalStructure& oracle_view,
                                      const Instance& inst, std::uint64_t cap) {
  const auto phi = find_maltsev(s);
  if (!phi) return "no Mal'tsev polymorphism";
  const Relation sols = enumerate_solutions(oracle_view, inst, cap);
  const int n = inst.n;
  const int q = s.domain_size();

  const BigInt fast = count(s, *phi, inst);
  if (fast != sols.size()) {
    return "count " + fast.str() + " but the oracle finds " + std::to_string(sols.size());
  }

  const Frame f = build_frame(s, *phi, inst);
  if (f.size() > static_cast<std::size_t>(n) * (q - 1) + 1) {
    return "frame has " + std::to_string(f.size()) + " rows";
  }
  for (int i = 0; i < n; ++i) {
    std::vector<int> pos{i};
    std::vector<Element> expected;
    for (const auto& t : project(sols, pos)) expected.push_back(t[0]);
    if (f.projection(i) != expected) return "projection " + std::to_string(i + 1) + " differs";
  }
  if (checked_power(q, n) <= 4096) {
    Tuple t(n, 0);
    while (true) {
      if (member(f, *phi, t) != sols.contains(t)) return "membership differs on " + to_string(t);
      int c = n - 1;
      while (c >= 0 && ++t[c] == q) t[c--] = 0;
      if (c < 0) break;
    }
  }
  if (!sols.empty()) {
    for (int i = 1; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (congruences(f, *phi, i, j) != oracle_congruence_pair(sols, i, j)) {
          return "congruences differ at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
        }
      }
  }
  return std::nullopt;
}

SelftestReport run_selftest(const SelftestOptions& opts) {
  SelftestReport rep;
  std::ostringstream out;
  out << "selftest seed=" << opts.seed << " trials=" << opts.trials << "\n";
  std::mt19937_64 rng(opts.seed);
  constexpr int kTrialsPerFixture = 10;
  std::optional<RelationalStructure> s, view;
  bool reported = false;

  for (int trial = 0; trial < opts.trials; ++trial) {
    const bool fresh = trial % kTrialsPerFixture == 0;
    if (fresh) {
      s = opts.fixture ? *opts.fixture : random_affine_structure(rng());
      view = opts.inject_wrong ? without_first_tuples(*s) : *s;
      out << "fixture domain=" << s->domain_size() << describe_relations(*s) << "\n";
    }
    Instance inst;
    if (fresh && !s->relations().empty()) {
      // Each fixture opens with its first relation on distinct variables.
      const auto& [name, rel] = *s->relations().begin();
      inst.n = rel.arity();
      Constraint c{name, {}};
      for (int p = 0; p < rel.arity(); ++p) c.scope.push_back(p);
      inst.constraints.push_back(std::move(c));
      rng();
    } else {
      inst = random_instance(*s, rng(), opts.max_vars, opts.max_constraints, opts.cap);
    }
    ++rep.trials;
    out << "trial " << trial + 1 << " n=" << inst.n << " m=" << inst.constraints.size() << ": ";
    std::optional<std::string> problem;
    try {
      problem = check_case(*s, *view, inst, opts.cap);
    } catch (const CapExceeded&) {
      ++rep.skipped;
      out << "skipped (cap)\n";
      continue;
    } catch (const Error& e) {
      problem = std::string("error: ") + e.what();
    }
    if (!problem) {
      ++rep.passed;
      out << "ok\n";
      continue;
    }
    ++rep.failed;
    out << "MISMATCH " << *problem << "\n";
    if (!reported) {
      reported = true;
      const Instance small = minimize(*s, *view, inst, opts.cap);
      std::string why = *problem;
      try {
        if (auto p = check_case(*s, *view, small, opts.cap)) why = *p;
      } catch (const Error& e) {
        why = e.what();
      }
      out << "minimal failing case: " << why << "\n"
          << format_structure(*s) << format_instance(small);
    }
  }
  out << "summary trials=" << rep.trials << " passed=" << rep.passed << " skipped=" << rep.skipped
      << " failed=" << rep.failed << "\n";
  rep.text = out.str();
  return rep;
}

}  // namespace sharpcsp
