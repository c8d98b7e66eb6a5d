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

#include "sharpcsp/maltsev.hpp"

#include <algorithm>
#include <map>

namespace sharpcsp {

MaltsevOp::MaltsevOp(int q, std::vector<Element> table) : q_(q), table_(std::move(table)) {
  if (q < 1) throw InvalidArgument("domain size must be positive");
  const std::size_t n = static_cast<std::size_t>(q) * q * q;
  if (table_.size() != n) throw InvalidArgument("Mal'tsev table must have q^3 entries");
  for (Element v : table_) {
    if (v < 0 || v >= q) throw InvalidArgument("Mal'tsev table value outside the domain");
  }
  for (Element a = 0; a < q; ++a) {
    for (Element b = 0; b < q; ++b) {
      if ((*this)(a, b, b) != a || (*this)(b, b, a) != a) {
        throw InvalidArgument("table violates the Mal'tsev identities at (" + std::to_string(a) +
                              "," + std::to_string(b) + ")");
      }
    }
  }
}

MaltsevOp MaltsevOp::affine(int q) {
  std::vector<Element> t(static_cast<std::size_t>(q) * q * q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c) t[(a * q + b) * q + c] = ((a - b + c) % q + q) % q;
  return MaltsevOp(q, std::move(t));
}

Tuple apply(const MaltsevOp& phi, std::span<const Element> t1, std::span<const Element> t2,
            std::span<const Element> t3) {
  if (t1.size() != t2.size() || t2.size() != t3.size()) {
    throw InvalidArgument("apply: tuples of different lengths");
  }
  Tuple out(t1.size());
  for (std::size_t p = 0; p < t1.size(); ++p) out[p] = phi(t1[p], t2[p], t3[p]);
  return out;
}

bool preserves(const MaltsevOp& phi, const Relation& h) {
  const auto& ts = h.tuples();
  Tuple img(h.arity());
  // Triples with t1 == t2 or t2 == t3 map to t3 or t1 by the identities.
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < ts.size(); ++k) {
        if (k == j) continue;
        for (int p = 0; p < h.arity(); ++p) img[p] = phi(ts[i][p], ts[j][p], ts[k][p]);
        if (!h.contains(img)) return false;
      }
    }
  }
  return true;
}

std::string to_string(const RectangularityViolation& v) {
  return v.relation + ": phi" + to_string(v.t1) + to_string(v.t2) + to_string(v.t3) + " = " +
         to_string(v.image) + " is not in " + v.relation;
}

namespace {

struct Check {
  const Relation* rel;
  const std::string* name;
  std::uint32_t t1, t2, t3;
  std::vector<std::size_t> cells;  // table index per coordinate
  std::vector<int> deps;           // search levels this check reads
};

}  // namespace

MaltsevSearch search_maltsev(const RelationalStructure& s, const MaltsevSearchOptions& opts) {
  const int q = s.domain_size();
  const std::size_t cells = static_cast<std::size_t>(q) * q * q;
  auto cell = [q](int a, int b, int c) { return (static_cast<std::size_t>(a) * q + b) * q + c; };

  // Fixed entries hold their forced value; free entries start at 0.
  std::vector<Element> table(cells, 0);
  std::vector<char> is_free(cells, 0);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c) {
        if (b == c) table[cell(a, b, c)] = a;
        else if (a == b) table[cell(a, b, c)] = c;
        else is_free[cell(a, b, c)] = 1;
      }

  std::vector<Check> checks;
  for (const auto& [name, rel] : s.relations()) {
    const auto& ts = rel.tuples();
    const auto m = static_cast<std::uint32_t>(ts.size());
    for (std::uint32_t i = 0; i < m; ++i)
      for (std::uint32_t j = 0; j < m; ++j) {
        if (i == j) continue;
        for (std::uint32_t k = 0; k < m; ++k) {
          if (k == j) continue;
          Check c{&rel, &name, i, j, k, {}, {}};
          c.cells.reserve(rel.arity());
          for (int p = 0; p < rel.arity(); ++p) c.cells.push_back(cell(ts[i][p], ts[j][p], ts[k][p]));
          checks.push_back(std::move(c));
        }
      }
  }

  MaltsevSearch result;
  auto passes = [&](const Check& c, Tuple& img) {
    for (std::size_t p = 0; p < c.cells.size(); ++p) img[p] = table[c.cells[p]];
    return c.rel->contains(img);
  };

  // Levels are the constrained free entries in lexicographic order.
  std::vector<char> used(cells, 0);
  for (const auto& c : checks)
    for (std::size_t x : c.cells)
      if (is_free[x]) used[x] = 1;
  std::vector<std::size_t> level_cell;
  std::vector<int> level_of(cells, -1);
  for (std::size_t x = 0; x < cells; ++x) {
    if (used[x]) {
      level_of[x] = static_cast<int>(level_cell.size());
      level_cell.push_back(x);
    }
  }
  const int depth = static_cast<int>(level_cell.size());

  std::vector<std::vector<const Check*>> bucket(depth);
  for (auto& c : checks) {
    for (std::size_t x : c.cells)
      if (level_of[x] >= 0) c.deps.push_back(level_of[x]);
    std::sort(c.deps.begin(), c.deps.end());
    c.deps.erase(std::unique(c.deps.begin(), c.deps.end()), c.deps.end());
    if (c.deps.empty()) {
      Tuple img(c.cells.size());
      if (!passes(c, img)) {
        const auto& ts = c.rel->tuples();
        result.certificate = RectangularityViolation{*c.name, ts[c.t1], ts[c.t2], ts[c.t3], img};
        return result;
      }
    } else {
      bucket[c.deps.back()].push_back(&c);
    }
  }

  // Conflict-directed backjumping. It only skips subtrees that contain no
  // solution, so the first solution found is still the lexicographic least.
  std::vector<int> value(depth, -1);
  std::vector<std::vector<char>> conflict(depth, std::vector<char>(depth, 0));
  Tuple img;
  int k = 0;
  while (k < depth) {
    bool ok = false;
    while (++value[k] < q) {
      ++result.nodes;
      if (opts.max_nodes && result.nodes > opts.max_nodes) {
        result.exhausted_budget = true;
        return result;
      }
      table[level_cell[k]] = value[k];
      ok = true;
      for (const Check* c : bucket[k]) {
        img.resize(c->cells.size());
        if (!passes(*c, img)) {
          ok = false;
          for (int d : c->deps)
            if (d != k) conflict[k][d] = 1;
          break;
        }
      }
      if (ok) break;
    }
    if (ok) {
      ++k;
      continue;
    }
    int h = k - 1;
    while (h >= 0 && !conflict[k][h]) --h;
    if (h < 0) return result;
    for (int l = 0; l < h; ++l)
      if (conflict[k][l]) conflict[h][l] = 1;
    for (int l = h + 1; l <= k; ++l) {
      value[l] = -1;
      table[level_cell[l]] = 0;
      std::fill(conflict[l].begin(), conflict[l].end(), 0);
    }
    k = h;
  }
  result.op = MaltsevOp(q, std::move(table));
  return result;
}

std::optional<MaltsevOp> find_maltsev(const RelationalStructure& s) { return search_maltsev(s).op; }

std::string format_table(const MaltsevOp& phi) {
  std::string out;
  const int q = phi.domain_size();
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c) {
        out += std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(c) + " -> " +
               std::to_string(phi(a, b, c)) + "\n";
      }
  return out;
}

}  // namespace sharpcsp
