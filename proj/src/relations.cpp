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

#include "sharpcsp/relations.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace sharpcsp {

std::string to_string(const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + ")";
}

std::uint64_t checked_power(std::uint64_t q, int k) {
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) {
    if (q != 0 && r > std::numeric_limits<std::uint64_t>::max() / q) {
      throw InvalidArgument("q^k overflows 64 bits");
    }
    r *= q;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Relation

Relation::Relation(int arity, std::vector<Tuple> tuples)
    : arity_(arity), tuples_(std::move(tuples)) {
  if (arity < 0) throw InvalidArgument("negative arity");
  for (const auto& t : tuples_) {
    if (static_cast<int>(t.size()) != arity) {
      throw InvalidArgument("tuple " + to_string(t) + " does not have arity " +
                            std::to_string(arity));
    }
  }
  std::sort(tuples_.begin(), tuples_.end());
  tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
}

bool Relation::contains(std::span<const Element> t) const {
  if (static_cast<int>(t.size()) != arity_) return false;
  auto it = std::lower_bound(
      tuples_.begin(), tuples_.end(), t, [](const Tuple& a, std::span<const Element> b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
      });
  return it != tuples_.end() && std::equal(it->begin(), it->end(), t.begin(), t.end());
}

Relation project(const Relation& r, std::span<const int> positions) {
  std::vector<bool> seen(r.arity(), false);
  for (int p : positions) {
    if (p < 0 || p >= r.arity()) {
      throw InvalidArgument("projection index " + std::to_string(p) + " out of range");
    }
    if (seen[p]) throw InvalidArgument("repeated projection index " + std::to_string(p));
    seen[p] = true;
  }
  std::vector<Tuple> out;
  out.reserve(r.size());
  for (const auto& t : r) {
    Tuple u;
    u.reserve(positions.size());
    for (int p : positions) u.push_back(t[p]);
    out.push_back(std::move(u));
  }
  return Relation(static_cast<int>(positions.size()), std::move(out));
}

Relation filter(const Relation& r, const std::function<bool(const Tuple&)>& keep) {
  std::vector<Tuple> out;
  for (const auto& t : r) {
    if (keep(t)) out.push_back(t);
  }
  return Relation(r.arity(), std::move(out));
}

// ---------------------------------------------------------------------------
// RelationalStructure

RelationalStructure::RelationalStructure(int domain_size) : q_(domain_size), equality_(2) {
  if (domain_size < 2) throw InvalidArgument("domain size must be at least 2");
  std::vector<Tuple> eq;
  for (int a = 0; a < q_; ++a) eq.push_back({a, a});
  equality_ = Relation(2, std::move(eq));
}

bool RelationalStructure::is_reserved(const std::string& name) const {
  return name == kEquality || name.rfind(kConstPrefix, 0) == 0;
}

void RelationalStructure::add_relation(const std::string& name, Relation r) {
  if (name.empty()) throw InvalidArgument("empty relation name");
  if (is_reserved(name)) throw InvalidArgument("relation name '" + name + "' is reserved");
  if (relations_.count(name)) throw InvalidArgument("duplicate relation '" + name + "'");
  if (r.arity() < 1) throw InvalidArgument("relation '" + name + "' must have positive arity");
  if (r.empty()) throw InvalidArgument("relation '" + name + "' is empty");
  for (const auto& t : r) {
    for (Element e : t) {
      if (e < 0 || e >= q_) {
        throw InvalidArgument("relation '" + name + "' uses element " + std::to_string(e) +
                              " outside the domain");
      }
    }
  }
  relations_.emplace(name, std::move(r));
}

std::vector<std::pair<std::string, const Relation*>> RelationalStructure::language() const {
  std::vector<std::pair<std::string, const Relation*>> out;
  out.emplace_back(kEquality, &equality_);
  for (const auto& [name, rel] : relations_) out.emplace_back(name, &rel);
  return out;
}

std::optional<Relation> RelationalStructure::find(const std::string& name) const {
  if (name == kEquality) return equality_;
  if (name.rfind(kConstPrefix, 0) == 0) {
    const std::string digits = name.substr(std::string(kConstPrefix).size());
    if (digits.empty() || digits.size() > 9 ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return std::nullopt;
    }
    const int a = std::stoi(digits);
    if (a >= q_ || std::to_string(a) != digits) return std::nullopt;
    return Relation(1, {{a}});
  }
  auto it = relations_.find(name);
  if (it == relations_.end()) return std::nullopt;
  return it->second;
}

std::size_t RelationalStructure::size() const {
  std::size_t s = equality_.matrix_size();
  for (const auto& [_, r] : relations_) s += r.matrix_size();
  return s;
}

// ---------------------------------------------------------------------------
// Partition

Partition Partition::from_classes(std::vector<std::vector<std::int64_t>> classes) {
  Partition p;
  for (auto& c : classes) {
    if (c.empty()) continue;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    p.classes.push_back(std::move(c));
  }
  std::sort(p.classes.begin(), p.classes.end());
  return p;
}

std::vector<std::int64_t> Partition::ground() const {
  std::vector<std::int64_t> g;
  for (const auto& c : classes) g.insert(g.end(), c.begin(), c.end());
  std::sort(g.begin(), g.end());
  return g;
}

int Partition::class_of(std::int64_t x) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (std::binary_search(classes[i].begin(), classes[i].end(), x)) return static_cast<int>(i);
  }
  return -1;
}

std::string to_string(const Partition& p) {
  std::string s = "{";
  for (std::size_t i = 0; i < p.classes.size(); ++i) {
    if (i) s += ",";
    s += "{";
    for (std::size_t j = 0; j < p.classes[i].size(); ++j) {
      if (j) s += ",";
      s += std::to_string(p.classes[i][j]);
    }
    s += "}";
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// Blocks

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Dense ids for the distinct slices t[from, to) of a relation.
class SliceIds {
 public:
  std::int64_t id(const Tuple& t, int from, int to) {
    Tuple key(t.begin() + from, t.begin() + to);
    return ids_.emplace(std::move(key), static_cast<std::int64_t>(ids_.size())).first->second;
  }

 private:
  std::map<Tuple, std::int64_t> ids_;
};

}  // namespace

BlockDecomposition block_decompose(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& edges) {
  std::vector<std::int64_t> rows, cols;
  for (const auto& [r, c] : edges) {
    rows.push_back(r);
    cols.push_back(c);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

  auto row_id = [&](std::int64_t r) {
    return static_cast<int>(std::lower_bound(rows.begin(), rows.end(), r) - rows.begin());
  };
  auto col_id = [&](std::int64_t c) {
    return static_cast<int>(rows.size() +
                            (std::lower_bound(cols.begin(), cols.end(), c) - cols.begin()));
  };
  UnionFind uf(rows.size() + cols.size());
  for (const auto& [r, c] : edges) uf.unite(row_id(r), col_id(c));

  // Root of a component is its least vertex id; rows come first, so the root is
  // the least row, and blocks come out ordered by least row label.
  std::map<int, Block> by_root;
  for (std::int64_t r : rows) by_root[uf.find(row_id(r))].rows.push_back(r);
  for (std::int64_t c : cols) by_root[uf.find(col_id(c))].cols.push_back(c);
  BlockDecomposition out;
  for (auto& [_, b] : by_root) out.blocks.push_back(std::move(b));
  return out;
}

BlockDecomposition block_decompose(const Relation& b) {
  if (b.arity() != 2) throw InvalidArgument("block_decompose expects a binary relation");
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  edges.reserve(b.size());
  for (const auto& t : b) edges.emplace_back(t[0], t[1]);
  return block_decompose(edges);
}

bool is_rectangular(const Relation& r, int split) {
  if (split < 1 || split >= r.arity()) {
    throw InvalidArgument("split must separate a nonempty left and right part");
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  edges.reserve(r.size());
  SliceIds left, right;
  for (const auto& t : r) {
    edges.emplace_back(left.id(t, 0, split), right.id(t, split, r.arity()));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const auto blocks = block_decompose(edges);
  std::size_t clique_edges = 0;
  for (const auto& b : blocks.blocks) clique_edges += b.rows.size() * b.cols.size();
  // Blocks are disjoint and every edge lies in exactly one of them.
  return clique_edges == edges.size();
}

// ---------------------------------------------------------------------------
// CountMatrix

CountMatrix::CountMatrix(std::vector<std::int64_t> row_labels,
                         std::vector<std::int64_t> col_labels)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      entries_(row_labels_.size() * col_labels_.size()) {}

CountMatrix CountMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr ? rows[0].size() : 0;
  std::vector<std::int64_t> rl(nr), cl(nc);
  std::iota(rl.begin(), rl.end(), 0);
  std::iota(cl.begin(), cl.end(), 0);
  CountMatrix m(rl, cl);
  for (std::size_t r = 0; r < nr; ++r) {
    if (rows[r].size() != nc) throw InvalidArgument("ragged matrix");
    for (std::size_t c = 0; c < nc; ++c) {
      if (rows[r][c] < 0) throw InvalidArgument("negative matrix entry");
      m.at(r, c) = rows[r][c];
    }
  }
  return m;
}

int CountMatrix::row_index(std::int64_t label) const {
  auto it = std::find(row_labels_.begin(), row_labels_.end(), label);
  return it == row_labels_.end() ? -1 : static_cast<int>(it - row_labels_.begin());
}

int CountMatrix::col_index(std::int64_t label) const {
  auto it = std::find(col_labels_.begin(), col_labels_.end(), label);
  return it == col_labels_.end() ? -1 : static_cast<int>(it - col_labels_.begin());
}

BigInt CountMatrix::get(std::int64_t row_label, std::int64_t col_label) const {
  const int r = row_index(row_label);
  const int c = col_index(col_label);
  if (r < 0 || c < 0) return 0;
  return at(r, c);
}

BigInt CountMatrix::total() const {
  BigInt s = 0;
  for (const auto& e : entries_) s += e;
  return s;
}

std::vector<BigInt> CountMatrix::row_sums() const {
  std::vector<BigInt> s(rows());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) s[r] += at(r, c);
  return s;
}

std::vector<BigInt> CountMatrix::col_sums() const {
  std::vector<BigInt> s(cols());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) s[c] += at(r, c);
  return s;
}

std::vector<std::pair<std::int64_t, std::int64_t>> CountMatrix::support() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> s;
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c)
      if (at(r, c) != 0) s.emplace_back(row_labels_[r], col_labels_[c]);
  return s;
}

std::string to_string(const CountMatrix& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) os << ",";
    os << "[";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) os << ",";
      os << m.at(r, c);
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

bool is_rank_one_block(const CountMatrix& m) {
  const auto blocks = block_decompose(m.support());
  for (const auto& b : blocks.blocks) {
    std::vector<int> ri, ci;
    for (auto r : b.rows) ri.push_back(m.row_index(r));
    for (auto c : b.cols) ci.push_back(m.col_index(c));
    // Complete bipartite support inside the block.
    for (int r : ri)
      for (int c : ci)
        if (m.at(r, c) == 0) return false;
    // Every row proportional to the first: a_rc * a_00 == a_r0 * a_0c.
    for (std::size_t x = 1; x < ri.size(); ++x)
      for (std::size_t y = 1; y < ci.size(); ++y)
        if (m.at(ri[x], ci[y]) * m.at(ri[0], ci[0]) != m.at(ri[x], ci[0]) * m.at(ri[0], ci[y]))
          return false;
  }
  return true;
}

bool satisfies_rank_one_identity(const CountMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.rows(); ++j)
      for (std::size_t r = 0; r < m.cols(); ++r)
        for (std::size_t s = r + 1; s < m.cols(); ++s) {
          const BigInt& ir = m.at(i, r);
          const BigInt& is = m.at(i, s);
          const BigInt& jr = m.at(j, r);
          const BigInt& js = m.at(j, s);
          if (ir * ir * js * js * is * jr != is * is * jr * jr * ir * js) return false;
        }
  return true;
}

CountMatrix reconstruct_rank_one(const BlockDecomposition& blocks,
                                 const std::map<std::int64_t, BigInt>& row_totals,
                                 const std::map<std::int64_t, BigInt>& col_totals) {
  std::vector<std::int64_t> rows, cols;
  for (const auto& b : blocks.blocks) {
    if (b.rows.empty() || b.cols.empty()) throw InvalidArgument("block with an empty side");
    rows.insert(rows.end(), b.rows.begin(), b.rows.end());
    cols.insert(cols.end(), b.cols.begin(), b.cols.end());
  }
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  CountMatrix m(rows, cols);

  auto total_of = [](const std::map<std::int64_t, BigInt>& totals, std::int64_t label,
                     const char* side) -> const BigInt& {
    auto it = totals.find(label);
    if (it == totals.end()) {
      throw InvalidArgument(std::string("missing ") + side + " total for label " +
                            std::to_string(label));
    }
    return it->second;
  };

  for (const auto& b : blocks.blocks) {
    BigInt row_sum = 0, col_sum = 0;
    for (auto r : b.rows) row_sum += total_of(row_totals, r, "row");
    for (auto c : b.cols) col_sum += total_of(col_totals, c, "column");
    if (row_sum != col_sum || row_sum <= 0) {
      throw NotBalancedError("inconsistent block margins: rows sum to " + row_sum.str() +
                             ", columns to " + col_sum.str());
    }
    for (auto r : b.rows) {
      const BigInt& rt = row_totals.at(r);
      for (auto c : b.cols) {
        BigInt num = rt * col_totals.at(c);
        BigInt quo, rem;
        boost::multiprecision::divide_qr(num, row_sum, quo, rem);
        if (rem != 0) {
          throw NotBalancedError("non-integral reconstructed entry at (" + std::to_string(r) +
                                 "," + std::to_string(c) + ")");
        }
        m.at(m.row_index(r), m.col_index(c)) = quo;
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// PowerStructure

PowerStructure::PowerStructure(const RelationalStructure& base, int k)
    : base_(&base), k_(k), size_(checked_power(base.domain_size(), k)) {
  if (k < 1) throw InvalidArgument("power must be at least 1");
}

std::uint64_t PowerStructure::encode(std::span<const Element> coords) const {
  if (static_cast<int>(coords.size()) != k_) throw InvalidArgument("wrong number of coordinates");
  std::uint64_t code = 0;
  for (Element e : coords) code = code * base_->domain_size() + static_cast<std::uint64_t>(e);
  return code;
}

Tuple PowerStructure::decode(std::uint64_t element) const {
  Tuple t(k_);
  const auto q = static_cast<std::uint64_t>(base_->domain_size());
  for (int c = k_ - 1; c >= 0; --c) {
    t[c] = static_cast<Element>(element % q);
    element /= q;
  }
  return t;
}

bool PowerStructure::contains(const Relation& h, std::span<const std::uint64_t> tuple) const {
  if (static_cast<int>(tuple.size()) != h.arity()) return false;
  std::vector<Tuple> decoded;
  decoded.reserve(tuple.size());
  for (auto e : tuple) {
    if (e >= size_) return false;
    decoded.push_back(decode(e));
  }
  Tuple slice(h.arity());
  for (int c = 0; c < k_; ++c) {
    for (int p = 0; p < h.arity(); ++p) slice[p] = decoded[p][c];
    if (!h.contains(slice)) return false;
  }
  return true;
}

bool PowerStructure::contains(const std::string& name,
                              std::span<const std::uint64_t> tuple) const {
  auto h = base_->find(name);
  if (!h) throw InvalidArgument("unknown relation '" + name + "'");
  return contains(*h, tuple);
}

BigInt PowerStructure::tuple_count(const Relation& h) const {
  BigInt n = 1;
  for (int c = 0; c < k_; ++c) n *= h.size();
  return n;
}

bool PowerStructure::for_each_tuple(
    const Relation& h, const std::function<bool(std::span<const std::uint64_t>)>& visit) const {
  if (h.empty()) return true;
  const int r = h.arity();
  const auto q = static_cast<std::uint64_t>(base_->domain_size());
  std::vector<std::size_t> choice(k_, 0);
  std::vector<std::uint64_t> tuple(r);
  while (true) {
    for (int p = 0; p < r; ++p) {
      std::uint64_t code = 0;
      for (int c = 0; c < k_; ++c) code = code * q + static_cast<std::uint64_t>(h[choice[c]][p]);
      tuple[p] = code;
    }
    if (!visit(tuple)) return false;
    int c = k_ - 1;
    while (c >= 0 && ++choice[c] == h.size()) choice[c--] = 0;
    if (c < 0) return true;
  }
}

PowerStructure power_structure(const RelationalStructure& s, int k) { return PowerStructure(s, k); }

}  // namespace sharpcsp
