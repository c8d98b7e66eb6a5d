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

#include "sharpcsp/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

namespace sharpcsp {

Relation enumerate_solutions(const RelationalStructure& s, const Instance& inst,
                             std::uint64_t cap) {
  const int n = inst.n, q = s.domain_size();
  std::uint64_t total = 1;
  for (int v = 0; v < n; ++v) {
    if (total > cap / q) throw CapExceeded("q^n exceeds the oracle cap");
    total *= q;
  }
  if (total > cap) throw CapExceeded("q^n exceeds the oracle cap");

  std::vector<std::pair<Relation, std::vector<int>>> cons;
  for (const auto& c : inst.constraints) {
    auto rel = s.find(c.relation);
    if (!rel) throw InvalidArgument("unknown relation '" + c.relation + "'");
    if (static_cast<int>(c.scope.size()) != rel->arity()) throw InvalidArgument("arity mismatch");
    for (int v : c.scope)
      if (v < 0 || v >= n) throw InvalidArgument("variable out of range");
    cons.emplace_back(std::move(*rel), c.scope);
  }

  std::vector<Tuple> sols;
  Tuple x(n, 0), img;
  for (std::uint64_t k = 0; k < total; ++k) {
    bool ok = true;
    for (const auto& [rel, scope] : cons) {
      img.resize(scope.size());
      for (std::size_t p = 0; p < scope.size(); ++p) img[p] = x[scope[p]];
      if (!rel.contains(img)) {
        ok = false;
        break;
      }
    }
    if (ok) sols.push_back(x);
    for (int v = n - 1; v >= 0; --v) {
      if (++x[v] < q) break;
      x[v] = 0;
    }
  }
  return Relation(n, std::move(sols));
}

BigInt oracle_count(const RelationalStructure& s, const Instance& inst, std::uint64_t cap) {
  return static_cast<unsigned long long>(enumerate_solutions(s, inst, cap).size());
}

namespace {

std::int64_t encode_slice(const Tuple& t, int from, int to, std::int64_t base) {
  std::int64_t key = 0;
  for (int p = from; p < to; ++p) {
    if (key > (std::numeric_limits<std::int64_t>::max() - t[p]) / base) {
      throw InvalidArgument("slice label overflows 64 bits");
    }
    key = key * base + t[p];
  }
  return key;
}

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Union-find over the values at `target`, joined whenever two tuples agree
// on all `shared` positions.
Partition common_key_partition(const Relation& r, const std::vector<int>& shared, int target) {
  std::map<Tuple, std::vector<Element>> groups;
  std::set<Element> values;
  for (const auto& t : r) {
    Tuple key;
    for (int p : shared) key.push_back(t[p]);
    groups[key].push_back(t[target]);
    values.insert(t[target]);
  }
  std::map<Element, Element> parent;
  for (Element v : values) parent[v] = v;
  auto find = [&](Element x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  for (const auto& [_, g] : groups)
    for (Element v : g) {
      Element a = find(g.front()), b = find(v);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::map<Element, std::vector<std::int64_t>> classes;
  for (Element v : values) classes[find(v)].push_back(v);
  std::vector<std::vector<std::int64_t>> out;
  for (auto& [_, c] : classes) out.push_back(std::move(c));
  return Partition::from_classes(std::move(out));
}

}  // namespace

OracleBalance oracle_balance(const Relation& r, int k, int l, int m) {
  if (k < 1 || l < 1 || m < 0 || k + l + m != r.arity()) {
    throw InvalidArgument("split must cover the arity with k, l >= 1");
  }
  std::int64_t base = 2;
  for (const auto& t : r)
    for (Element e : t) base = std::max<std::int64_t>(base, e + 1);
  std::vector<std::int64_t> rows, cols;
  for (const auto& t : r) {
    rows.push_back(encode_slice(t, 0, k, base));
    cols.push_back(encode_slice(t, k, k + l, base));
  }
  CountMatrix mat(sorted_unique(rows), sorted_unique(cols));
  for (std::size_t n = 0; n < rows.size(); ++n) mat.at(mat.row_index(rows[n]), mat.col_index(cols[n])) += 1;
  return {mat, oracle_rank_one_block(mat)};
}

Partition oracle_congruence(const Relation& r, int i) {
  if (i < 0 || i >= r.arity()) throw InvalidArgument("position out of range");
  std::vector<int> prefix(i);
  std::iota(prefix.begin(), prefix.end(), 0);
  return common_key_partition(r, prefix, i);
}

CongruencePair oracle_congruence_pair(const Relation& r, int i, int j) {
  if (i < 1 || i >= j || j >= r.arity()) throw InvalidArgument("need 1 <= i < j < arity");
  CongruencePair out;
  out.i = i;
  out.j = j;
  std::vector<int> through_i(i + 1);
  std::iota(through_i.begin(), through_i.end(), 0);
  out.tij = common_key_partition(r, through_i, j);
  std::vector<int> before_i_and_j(i);
  std::iota(before_i_and_j.begin(), before_i_and_j.end(), 0);
  before_i_and_j.push_back(j);
  out.tji = common_key_partition(r, before_i_and_j, i);
  return out;
}

CountMatrix oracle_prefix_matrix(const Relation& r, int i, int j) {
  if (i < 0 || i >= j || j >= r.arity()) throw InvalidArgument("need 0 <= i < j < arity");
  std::set<Tuple> seen;
  std::vector<std::int64_t> xs, ys;
  for (const auto& t : r) {
    Tuple key(t.begin(), t.begin() + i + 1);
    key.push_back(t[j]);
    if (seen.insert(key).second) {
      xs.push_back(t[i]);
      ys.push_back(t[j]);
    }
  }
  CountMatrix m(sorted_unique(xs), sorted_unique(ys));
  for (std::size_t k = 0; k < xs.size(); ++k) m.at(m.row_index(xs[k]), m.col_index(ys[k])) += 1;
  return m;
}

PrefixCounts oracle_prefix_counts(const Relation& r, int i, int j) {
  if (i < 0 || i >= j || j >= r.arity()) throw InvalidArgument("need 0 <= i < j < arity");
  PrefixCounts out;
  out.i = i;
  out.j = j;
  std::set<Tuple> seen;
  for (const auto& t : r) {
    Tuple key(t.begin(), t.begin() + i + 1);
    key.push_back(t[j]);
    if (seen.insert(key).second) out.values[t[j]] += 1;
  }
  return out;
}

bool oracle_rank_one_block(const CountMatrix& m) {
  using Rational = boost::multiprecision::cpp_rational;
  const std::size_t nr = m.rows(), nc = m.cols();
  // Components of the support graph; rows are 0..nr-1, columns nr..nr+nc-1.
  std::vector<int> comp(nr + nc, -1);
  int ncomp = 0;
  for (std::size_t start = 0; start < nr + nc; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<std::size_t> stack{start};
    comp[start] = ncomp;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < nr + nc; ++w) {
        if (comp[w] >= 0) continue;
        bool edge = false;
        if (v < nr && w >= nr) edge = m.at(v, w - nr) != 0;
        if (v >= nr && w < nr) edge = m.at(w, v - nr) != 0;
        if (edge) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
      }
    }
    ++ncomp;
  }
  for (int c = 0; c < ncomp; ++c) {
    std::vector<std::size_t> rs, cs;
    for (std::size_t r = 0; r < nr; ++r)
      if (comp[r] == c) rs.push_back(r);
    for (std::size_t k = 0; k < nc; ++k)
      if (comp[nr + k] == c) cs.push_back(k);
    if (rs.empty() || cs.empty()) continue;  // an all-zero line
    std::vector<std::vector<Rational>> a(rs.size(), std::vector<Rational>(cs.size()));
    for (std::size_t r = 0; r < rs.size(); ++r)
      for (std::size_t k = 0; k < cs.size(); ++k) {
        if (m.at(rs[r], cs[k]) == 0) return false;  // block not full
        a[r][k] = Rational(m.at(rs[r], cs[k]));
      }
    // Gaussian elimination; rank must be exactly one.
    std::size_t rank = 0;
    for (std::size_t k = 0; k < cs.size() && rank < rs.size(); ++k) {
      std::size_t piv = rank;
      while (piv < rs.size() && a[piv][k] == 0) ++piv;
      if (piv == rs.size()) continue;
      std::swap(a[piv], a[rank]);
      for (std::size_t r = rank + 1; r < rs.size(); ++r) {
        if (a[r][k] == 0) continue;
        Rational f = a[r][k] / a[rank][k];
        for (std::size_t kk = k; kk < cs.size(); ++kk) a[r][kk] -= f * a[rank][kk];
      }
      ++rank;
    }
    if (rank != 1) return false;
  }
  return true;
}

}  // namespace sharpcsp
