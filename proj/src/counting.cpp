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

#include "sharpcsp/counting.hpp"

#include <algorithm>
#include <set>

namespace sharpcsp {

const Frame& CountingContext::pinned(int j, Element a) {
  auto key = std::make_pair(j, a);
  auto it = pinned_.find(key);
  if (it != pinned_.end()) return it->second;
  BoundConstraint c{Relation(1, {{a}}), {j}};
  return pinned_.emplace(key, add_constraint(*f_, *phi_, c)).first->second;
}

namespace {

// Distinct rows of R on (i, j), each a full tuple of R.
std::vector<Tuple> pair_rows(const Frame& f, const MaltsevOp& phi, int i, int j) {
  const int pos[2] = {i, j};
  return generate_projection(f.rows(), phi, pos);
}

std::vector<std::pair<std::int64_t, std::int64_t>> pairs_of(const std::vector<Tuple>& rows, int i,
                                                            int j) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& t : rows) out.emplace_back(t[i], t[j]);
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::int64_t, std::int64_t> representatives(const Partition& p) {
  std::map<std::int64_t, std::int64_t> rep;
  for (const auto& cls : p.classes)
    for (auto x : cls) rep[x] = cls.front();
  return rep;
}

}  // namespace

CongruencePair congruences(CountingContext& ctx, int i, int j) {
  const Frame& f = ctx.frame();
  if (i < 1 || i >= j || j >= f.arity()) throw InvalidArgument("congruences need 1 <= i < j < n");
  CongruencePair out;
  out.i = i;
  out.j = j;
  if (f.empty()) return out;
  const auto rows = pair_rows(f, ctx.op(), i, j);

  // Values at j reachable from one prefix t_0..t_i form a class.
  std::vector<std::vector<std::int64_t>> tij;
  std::set<Element> covered;
  for (const auto& t : rows) {
    if (covered.count(t[j])) continue;
    const Frame& fixed = ctx.fixer().get(std::span<const Element>(t.data(), i + 1));
    std::vector<std::int64_t> cls;
    for (Element b : fixed.projection(j - i - 1)) {
      cls.push_back(b);
      covered.insert(b);
    }
    tij.push_back(std::move(cls));
  }
  out.tij = Partition::from_classes(std::move(tij));

  // The classes at i depend only on the block of the pair relation that
  // contains the pinned value at j.
  std::vector<std::vector<std::int64_t>> tji;
  for (const auto& block : block_decompose(pairs_of(rows, i, j)).blocks) {
    const Element a = static_cast<Element>(block.cols.front());
    const Frame& pinned = ctx.pinned(j, a);
    for (auto& cls : frame_congruence(pinned, i).classes) tji.push_back(std::move(cls));
  }
  out.tji = Partition::from_classes(std::move(tji));
  return out;
}

CongruencePair congruences(const Frame& f, const MaltsevOp& phi, int i, int j) {
  CountingContext ctx(f, phi);
  return congruences(ctx, i, j);
}

BigInt count_frame(const Frame& f, const MaltsevOp& phi, CountTrace* trace) {
  const int n = f.arity();
  if (f.empty()) return 0;
  if (n <= 1) return static_cast<unsigned long long>(f.size());

  CountingContext ctx(f, phi);
  // counts[j] holds N_{i-1,j} entering round i.
  std::vector<PrefixCounts> counts(n);
  for (int j = 1; j < n; ++j) {
    counts[j].i = 0;
    counts[j].j = j;
    for (const auto& t : pair_rows(f, phi, 0, j)) counts[j].values[t[j]] += 1;
    if (trace) trace->seeds.push_back(counts[j]);
  }

  for (int i = 1; i + 1 < n; ++i) {
    std::vector<PrefixCounts> next(n);
    for (int j = i + 1; j < n; ++j) {
      CountStep step;
      step.i = i;
      step.j = j;
      step.pairs = pairs_of(pair_rows(f, phi, i, j), i, j);
      step.congruence = congruences(ctx, i, j);
      step.row_margin = counts[i];
      step.col_margin = counts[j];

      const auto row_rep = representatives(step.congruence.tji);
      const auto col_rep = representatives(step.congruence.tij);
      const auto blocks = block_decompose(step.pairs);

      BlockDecomposition quotient;
      std::map<std::int64_t, BigInt> row_totals, col_totals;
      std::map<std::int64_t, int> block_of_row, block_of_col;
      for (std::size_t b = 0; b < blocks.blocks.size(); ++b) {
        Block qb;
        for (auto x : blocks.blocks[b].rows) {
          block_of_row[x] = static_cast<int>(b);
          qb.rows.push_back(row_rep.at(x));
        }
        for (auto y : blocks.blocks[b].cols) {
          block_of_col[y] = static_cast<int>(b);
          qb.cols.push_back(col_rep.at(y));
        }
        for (auto* side : {&qb.rows, &qb.cols}) {
          std::sort(side->begin(), side->end());
          side->erase(std::unique(side->begin(), side->end()), side->end());
        }
        for (auto x : qb.rows) row_totals[x] = counts[i].values.at(static_cast<Element>(x));
        for (auto y : qb.cols) col_totals[y] = counts[j].values.at(static_cast<Element>(y));
        quotient.blocks.push_back(std::move(qb));
      }
      step.quotient = reconstruct_rank_one(quotient, row_totals, col_totals);

      std::vector<std::int64_t> xs, ys;
      for (const auto& [x, _] : block_of_row) xs.push_back(x);
      for (const auto& [y, _] : block_of_col) ys.push_back(y);
      step.matrix = CountMatrix(xs, ys);
      step.result.i = i;
      step.result.j = j;
      for (std::size_t c = 0; c < ys.size(); ++c) {
        BigInt column = 0;
        for (std::size_t r = 0; r < xs.size(); ++r) {
          if (block_of_row[xs[r]] != block_of_col[ys[c]]) continue;
          step.matrix.at(r, c) = step.quotient.get(row_rep.at(xs[r]), col_rep.at(ys[c]));
          column += step.matrix.at(r, c);
        }
        step.result.values[static_cast<Element>(ys[c])] = column;
      }
      next[j] = step.result;
      if (trace) trace->steps.push_back(std::move(step));
    }
    for (int j = i + 1; j < n; ++j) counts[j] = std::move(next[j]);
  }

  BigInt total = 0;
  for (const auto& [_, v] : counts[n - 1].values) total += v;
  return total;
}

BigInt count(const RelationalStructure& s, const MaltsevOp& phi, const Instance& inst,
             CountTrace* trace) {
  const auto bound = bind(s, inst);
  std::vector<int> index(inst.n, -1);
  std::vector<int> kept;
  for (const auto& c : bound)
    for (int v : c.scope)
      if (index[v] < 0) {
        index[v] = 0;
      }
  for (int v = 0; v < inst.n; ++v)
    if (index[v] >= 0) {
      index[v] = static_cast<int>(kept.size());
      kept.push_back(v);
    }
  const int unconstrained = inst.n - static_cast<int>(kept.size());
  BigInt factor = boost::multiprecision::pow(BigInt(s.domain_size()), unconstrained);
  if (trace) {
    trace->kept = kept;
    trace->unconstrained = unconstrained;
  }
  if (kept.empty()) {
    if (trace) trace->total = factor;
    return factor;
  }

  Frame f = initial_frame(static_cast<int>(kept.size()), s.domain_size());
  for (const auto& c : bound) {
    BoundConstraint local{c.relation, {}};
    for (int v : c.scope) local.scope.push_back(index[v]);
    f = add_constraint(f, phi, local);
    if (f.empty()) break;
  }
  BigInt total = factor * count_frame(f, phi, trace);
  if (trace) trace->total = total;
  return total;
}

namespace {

constexpr std::size_t kEnumerationCap = std::size_t{1} << 20;

void check_positions(const Instance& inst, int i, int j) {
  if (i < 0 || j < 0 || i >= inst.n || j >= inst.n || i == j) {
    throw InvalidArgument("balance matrix positions must be distinct variables");
  }
}

}  // namespace

CountMatrix balance_matrix(const RelationalStructure& s, const MaltsevOp& phi,
                           const Instance& inst, int i, int j) {
  check_positions(inst, i, j);
  const Frame f = build_frame(s, phi, inst);
  if (f.empty()) return CountMatrix();
  const auto rows = pair_rows(f, phi, i, j);
  const auto pairs = pairs_of(rows, i, j);
  std::vector<std::int64_t> xs, ys;
  for (auto [x, y] : pairs) {
    xs.push_back(x);
    ys.push_back(y);
  }
  for (auto* v : {&xs, &ys}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  CountMatrix m(xs, ys);
  try {
    for (const auto& t : enumerate_frame(f, phi, kEnumerationCap)) {
      m.at(m.row_index(t[i]), m.col_index(t[j])) += 1;
    }
  } catch (const CapExceeded&) {
    // Too many solutions to list: count each cell with both values pinned.
    for (auto [x, y] : pairs) {
      Instance pinned = inst;
      pinned.constraints.push_back({std::string(RelationalStructure::kConstPrefix) + std::to_string(x), {i}});
      pinned.constraints.push_back({std::string(RelationalStructure::kConstPrefix) + std::to_string(y), {j}});
      m.at(m.row_index(x), m.col_index(y)) = count(s, phi, pinned);
    }
  }
  return m;
}

CountMatrix prefix_balance_matrix(const RelationalStructure& s, const MaltsevOp& phi,
                                  const Instance& inst, int i, int j) {
  check_positions(inst, i, j);
  if (i > j) throw InvalidArgument("prefix balance matrix needs i < j");
  const Frame f = build_frame(s, phi, inst);
  if (f.empty()) return CountMatrix();
  std::set<Tuple> seen;
  std::vector<std::int64_t> xs, ys;
  for (const auto& t : enumerate_frame(f, phi, kEnumerationCap)) {
    Tuple key(t.begin(), t.begin() + i + 1);
    key.push_back(t[j]);
    if (seen.insert(std::move(key)).second) {
      xs.push_back(t[i]);
      ys.push_back(t[j]);
    }
  }
  std::vector<std::int64_t> rl = xs, cl = ys;
  for (auto* v : {&rl, &cl}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  CountMatrix m(rl, cl);
  for (std::size_t k = 0; k < xs.size(); ++k) m.at(m.row_index(xs[k]), m.col_index(ys[k])) += 1;
  return m;
}

}  // namespace sharpcsp
