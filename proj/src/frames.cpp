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

#include "sharpcsp/frames.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include <boost/container_hash/hash.hpp>

namespace sharpcsp {

namespace {

// Set of images on a fixed list of positions. Images are packed base q into
// one word when they fit.
class ImageSet {
 public:
  ImageSet(int q, std::span<const int> positions)
      : q_(q), positions_(positions.begin(), positions.end()) {
    long double range = 1;
    for (std::size_t k = 0; k < positions_.size(); ++k) range *= q;
    packed_ = range < 4.0e18L;
  }

  bool insert(const Tuple& t) {
    if (packed_) {
      std::uint64_t key = 0;
      for (int p : positions_) key = key * q_ + static_cast<std::uint64_t>(t[p]);
      return words_.insert(key).second;
    }
    Tuple key;
    key.reserve(positions_.size());
    for (int p : positions_) key.push_back(t[p]);
    return tuples_.insert(std::move(key)).second;
  }

  bool insert_image(const MaltsevOp& phi, const Tuple& a, const Tuple& b, const Tuple& c) {
    if (packed_) {
      std::uint64_t key = 0;
      for (int p : positions_) key = key * q_ + static_cast<std::uint64_t>(phi(a[p], b[p], c[p]));
      return words_.insert(key).second;
    }
    Tuple key;
    key.reserve(positions_.size());
    for (int p : positions_) key.push_back(phi(a[p], b[p], c[p]));
    return tuples_.insert(std::move(key)).second;
  }

  std::size_t size() const { return packed_ ? words_.size() : tuples_.size(); }

 private:
  std::uint64_t q_;
  std::vector<int> positions_;
  bool packed_;
  std::unordered_set<std::uint64_t> words_;
  std::unordered_set<Tuple, boost::hash<Tuple>> tuples_;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
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

bool same_prefix(const Tuple& a, const Tuple& b, int len) {
  return std::equal(a.begin(), a.begin() + len, b.begin());
}

// Witness function of a set of rows that is a frame of what it generates.
std::vector<int> recover_witness(int n, int q, const std::vector<Tuple>& rows) {
  std::vector<int> w(static_cast<std::size_t>(q) * n, -1);
  for (int i = 0; i < n; ++i) {
    std::map<Tuple, std::vector<int>> groups;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      groups[Tuple(rows[r].begin(), rows[r].begin() + i)].push_back(r);
    }
    UnionFind uf(q);
    std::vector<char> present(q, 0);
    for (const auto& [_, g] : groups) {
      for (int r : g) {
        present[rows[r][i]] = 1;
        uf.unite(rows[g.front()][i], rows[r][i]);
      }
    }
    std::map<int, std::vector<Element>> classes;
    for (Element a = 0; a < q; ++a)
      if (present[a]) classes[uf.find(a)].push_back(a);
    for (const auto& [_, cls] : classes) {
      bool found = false;
      for (const auto& [prefix, g] : groups) {
        std::vector<int> first(q, -1);
        for (int r : g)
          if (first[rows[r][i]] < 0) first[rows[r][i]] = r;
        if (std::all_of(cls.begin(), cls.end(), [&](Element a) { return first[a] >= 0; })) {
          for (Element a : cls) w[static_cast<std::size_t>(a) * n + i] = first[a];
          found = true;
          break;
        }
      }
      if (!found) {
        throw InvalidArgument("rows violate frame invariants: no common prefix at position " +
                              std::to_string(i + 1));
      }
    }
  }
  return w;
}

// Appends rows without duplicates and hands back their indices.
class RowBuilder {
 public:
  explicit RowBuilder(int n, int q) : n_(n), q_(q), witness_(static_cast<std::size_t>(q) * n, -1) {}

  int add(Tuple t) {
    auto [it, fresh] = index_.emplace(t, static_cast<int>(rows_.size()));
    if (fresh) rows_.push_back(std::move(t));
    return it->second;
  }
  void set_witness(Element a, int i, int row) { witness_[static_cast<std::size_t>(a) * n_ + i] = row; }
  Frame finish() && { return Frame(n_, q_, std::move(rows_), std::move(witness_)); }
  bool empty() const { return rows_.empty(); }

 private:
  int n_, q_;
  std::vector<Tuple> rows_;
  std::vector<int> witness_;
  std::map<Tuple, int> index_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Instances

BoundConstraint collapse_scope(const Relation& h, std::span<const int> scope) {
  if (static_cast<int>(scope.size()) != h.arity()) {
    throw InvalidArgument("scope length does not match relation arity");
  }
  std::vector<int> first;  // position of first occurrence, per distinct variable
  std::vector<int> vars;
  std::vector<int> origin(scope.size());
  for (std::size_t p = 0; p < scope.size(); ++p) {
    auto it = std::find(vars.begin(), vars.end(), scope[p]);
    if (it == vars.end()) {
      origin[p] = static_cast<int>(vars.size());
      vars.push_back(scope[p]);
      first.push_back(static_cast<int>(p));
    } else {
      origin[p] = static_cast<int>(it - vars.begin());
    }
  }
  if (vars.size() == scope.size()) return {h, vars};
  std::vector<Tuple> kept;
  for (const auto& t : h) {
    bool ok = true;
    for (std::size_t p = 0; p < scope.size() && ok; ++p) ok = t[p] == t[first[origin[p]]];
    if (!ok) continue;
    Tuple u;
    for (int p : first) u.push_back(t[p]);
    kept.push_back(std::move(u));
  }
  return {Relation(static_cast<int>(vars.size()), std::move(kept)), vars};
}

std::vector<BoundConstraint> bind(const RelationalStructure& s, const Instance& phi) {
  if (phi.n < 0) throw InvalidArgument("negative variable count");
  std::vector<BoundConstraint> out;
  for (const auto& c : phi.constraints) {
    auto rel = s.find(c.relation);
    if (!rel) throw InvalidArgument("unknown relation '" + c.relation + "'");
    if (static_cast<int>(c.scope.size()) != rel->arity()) {
      throw InvalidArgument("constraint " + c.relation + " has " + std::to_string(c.scope.size()) +
                            " variables, relation arity is " + std::to_string(rel->arity()));
    }
    for (int v : c.scope) {
      if (v < 0 || v >= phi.n) {
        throw InvalidArgument("variable " + std::to_string(v + 1) + " out of range");
      }
    }
    out.push_back(collapse_scope(*rel, c.scope));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frame

Frame::Frame(int n, int q, std::vector<Tuple> rows, std::vector<int> witness)
    : n_(n), q_(q), rows_(std::move(rows)), witness_(std::move(witness)) {
  if (n < 0 || q < 1) throw InvalidArgument("bad frame shape");
  if (witness_.size() != static_cast<std::size_t>(q) * n) {
    throw InvalidArgument("witness table must have q*n entries");
  }
  for (const auto& t : rows_) {
    if (static_cast<int>(t.size()) != n) throw InvalidArgument("frame row of wrong length");
  }
  for (int w : witness_) {
    if (w < -1 || w >= static_cast<int>(rows_.size())) throw InvalidArgument("bad witness index");
  }
}

Frame Frame::empty_relation(int n, int q) {
  return Frame(n, q, {}, std::vector<int>(static_cast<std::size_t>(q) * n, -1));
}

Frame Frame::from_rows(int n, int q, std::vector<Tuple> rows) {
  for (const auto& t : rows) {
    if (static_cast<int>(t.size()) != n) throw InvalidArgument("frame row of wrong length");
    for (Element e : t)
      if (e < 0 || e >= q) throw InvalidArgument("frame row leaves the domain");
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  auto w = recover_witness(n, q, rows);
  return Frame(n, q, std::move(rows), std::move(w));
}

std::vector<Element> Frame::projection(int i) const {
  std::vector<Element> out;
  for (Element a = 0; a < q_; ++a)
    if (witness(a, i) >= 0) out.push_back(a);
  return out;
}

// ---------------------------------------------------------------------------
// Closure

std::vector<Tuple> closure_project(const std::vector<Tuple>& s, const MaltsevOp& phi,
                                   std::span<const int> positions) {
  std::vector<Tuple> rows = s;
  if (rows.empty()) return rows;
  const int n = static_cast<int>(rows.front().size());
  for (int p : positions) {
    if (p < 0 || p >= n) throw InvalidArgument("closure position out of range");
  }
  ImageSet seen(phi.domain_size(), positions);
  for (const auto& r : rows) seen.insert(r);

  // Images stay inside the product of the per-position value closures, so
  // the loop can stop once every such combination has appeared.
  const int q = phi.domain_size();
  long double bound = 1;
  for (int p : positions) {
    std::vector<char> in(q, 0);
    std::vector<Element> vals;
    for (const auto& r : rows)
      if (!in[r[p]]) {
        in[r[p]] = 1;
        vals.push_back(r[p]);
      }
    for (std::size_t a = 0; a < vals.size(); ++a)
      for (std::size_t b = 0; b < vals.size(); ++b)
        for (std::size_t c = 0; c < vals.size(); ++c) {
          const Element v = phi(vals[a], vals[b], vals[c]);
          if (!in[v]) {
            in[v] = 1;
            vals.push_back(v);
          }
        }
    bound *= static_cast<long double>(vals.size());
  }
  auto saturated = [&] { return static_cast<long double>(seen.size()) >= bound; };
  if (saturated()) return rows;

  auto step = [&](std::size_t k1, std::size_t k2, std::size_t k3) {
    if (seen.insert_image(phi, rows[k1], rows[k2], rows[k3])) {
      Tuple u = apply(phi, rows[k1], rows[k2], rows[k3]);
      rows.push_back(std::move(u));
    }
  };
  // j3 <= j2 <= j1; permutations of {j1,j2,j3} whose middle differs from
  // both ends.
  for (std::size_t j1 = 1; j1 < rows.size(); ++j1) {
    for (std::size_t j2 = 0; j2 <= j1; ++j2) {
      if (saturated()) return rows;
      for (std::size_t j3 = 0; j3 <= j2; ++j3) {
        if (j1 == j2 && j2 == j3) continue;
        if (j1 == j2) {
          step(j1, j3, j1);
        } else if (j2 == j3) {
          step(j2, j1, j2);
        } else {
          step(j1, j2, j3);
          step(j1, j3, j2);
          step(j2, j1, j3);
          step(j2, j3, j1);
          step(j3, j1, j2);
          step(j3, j2, j1);
        }
      }
    }
  }
  return rows;
}

std::vector<Tuple> generate_projection(const std::vector<Tuple>& s, const MaltsevOp& phi,
                                       std::span<const int> positions) {
  if (s.empty()) return {};
  ImageSet seen(phi.domain_size(), positions);
  std::vector<Tuple> reps;
  for (const auto& r : s)
    if (seen.insert(r)) reps.push_back(r);
  return closure_project(reps, phi, positions);
}

Relation generated_relation(const Frame& f, const MaltsevOp& phi) {
  std::vector<int> all(f.arity());
  std::iota(all.begin(), all.end(), 0);
  return Relation(f.arity(), closure_project(f.rows(), phi, all));
}

// ---------------------------------------------------------------------------
// Small frames and membership

Frame shrink_to_small(const Frame& f, const MaltsevOp& phi) {
  const int n = f.arity(), q = f.domain_size();
  if (f.empty()) return Frame::empty_relation(n, q);
  if (n == 0) return Frame(0, q, {Tuple{}}, {});
  const auto& rows = f.rows();
  const auto w = recover_witness(n, q, rows);
  auto wrow = [&](Element a, int i) -> const Tuple& { return rows[w[static_cast<std::size_t>(a) * n + i]]; };

  RowBuilder out(n, q);
  const Tuple base = rows.front();
  const int base_idx = out.add(base);
  for (int i = 0; i < n; ++i) {
    const Tuple& g = wrow(base[i], i);
    out.set_witness(base[i], i, base_idx);
    for (Element a = 0; a < q; ++a) {
      const int wa = w[static_cast<std::size_t>(a) * n + i];
      if (a == base[i] || wa < 0 || !same_prefix(rows[wa], g, i)) continue;
      out.set_witness(a, i, out.add(apply(phi, base, g, rows[wa])));
    }
  }
  for (int i = 0; i < n; ++i) {
    const Tuple& g = wrow(base[i], i);
    for (Element a = 0; a < q; ++a) {
      const int wa = w[static_cast<std::size_t>(a) * n + i];
      if (wa < 0 || same_prefix(rows[wa], g, i)) continue;
      out.set_witness(a, i, out.add(rows[wa]));
    }
  }
  return std::move(out).finish();
}

bool member(const Frame& f, const MaltsevOp& phi, std::span<const Element> t) {
  const int n = f.arity(), q = f.domain_size();
  if (static_cast<int>(t.size()) != n || f.empty()) return false;
  if (n == 0) return true;
  for (Element e : t)
    if (e < 0 || e >= q) return false;
  if (f.witness(t[0], 0) < 0) return false;
  Tuple cur = f.witness_row(t[0], 0);
  for (int i = 1; i < n; ++i) {
    if (f.witness(t[i], i) < 0) return false;
    const Tuple& target = f.witness_row(t[i], i);
    const Tuple& here = f.witness_row(cur[i], i);
    if (!same_prefix(target, here, i)) return false;
    cur = apply(phi, cur, here, target);
  }
  return std::equal(cur.begin(), cur.end(), t.begin(), t.end());
}

// ---------------------------------------------------------------------------
// Fixing prefixes

namespace {

// Classes of the prefix congruence at position i, each sorted, ordered by
// least element.
std::vector<std::vector<Element>> witness_classes(const Frame& f, int i) {
  std::vector<std::vector<Element>> classes;
  std::vector<const Tuple*> heads;
  for (Element a : f.projection(i)) {
    const Tuple& w = f.witness_row(a, i);
    std::size_t k = 0;
    while (k < heads.size() && !same_prefix(*heads[k], w, i)) ++k;
    if (k == heads.size()) {
      heads.push_back(&w);
      classes.emplace_back();
    }
    classes[k].push_back(a);
  }
  return classes;
}

}  // namespace

Frame fix_first(const Frame& f, const MaltsevOp& phi, Element a) {
  const int n = f.arity(), q = f.domain_size();
  if (n == 0) throw InvalidArgument("cannot fix a position of a 0-ary frame");
  if (f.empty() || a < 0 || a >= q || f.witness(a, 0) < 0) return Frame::empty_relation(n - 1, q);
  if (n == 1) return Frame(0, q, {Tuple{}}, {});

  RowBuilder out(n - 1, q);
  for (int p = 1; p < n; ++p) {
    const int pair[2] = {0, p};
    const auto t_rows = generate_projection(f.rows(), phi, pair);
    std::vector<int> first_with(q, -1);
    for (int r = 0; r < static_cast<int>(t_rows.size()); ++r) {
      if (t_rows[r][0] == a && first_with[t_rows[r][p]] < 0) first_with[t_rows[r][p]] = r;
    }
    for (const auto& cls : witness_classes(f, p)) {
      int pick = -1;
      for (Element b : cls)
        if (first_with[b] >= 0 && (pick < 0 || first_with[b] < pick)) pick = first_with[b];
      if (pick < 0) continue;
      const Tuple& t = t_rows[pick];
      const Tuple& g = f.witness_row(t[p], p);
      for (Element c : cls) {
        Tuple u = apply(phi, t, g, f.witness_row(c, p));
        u.erase(u.begin());
        out.set_witness(c, p - 1, out.add(std::move(u)));
      }
    }
  }
  return shrink_to_small(std::move(out).finish(), phi);
}

Frame fix_prefix(const Frame& f, const MaltsevOp& phi, std::span<const Element> values) {
  if (static_cast<int>(values.size()) > f.arity()) throw InvalidArgument("prefix longer than arity");
  Frame cur = f;
  for (Element a : values) cur = fix_first(cur, phi, a);
  return cur;
}

const Frame& PrefixFixer::get(std::span<const Element> prefix) {
  if (prefix.empty()) return *base_;
  Tuple key(prefix.begin(), prefix.end());
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const Frame& parent = get(prefix.first(prefix.size() - 1));
  Frame g = fix_first(parent, *phi_, prefix.back());
  return cache_.emplace(std::move(key), std::move(g)).first->second;
}

// ---------------------------------------------------------------------------
// Construction for instances

Frame initial_frame(int n, int q) {
  if (n < 1) throw InvalidArgument("initial frame needs n >= 1");
  if (q < 1) throw InvalidArgument("domain size must be positive");
  std::vector<Tuple> rows;
  std::vector<int> w(static_cast<std::size_t>(q) * n, -1);
  rows.push_back(Tuple(n, 0));
  for (int i = 0; i < n; ++i) {
    w[i] = 0;
    for (Element a = 1; a < q; ++a) {
      Tuple t(n, 0);
      t[i] = a;
      w[static_cast<std::size_t>(a) * n + i] = static_cast<int>(rows.size());
      rows.push_back(std::move(t));
    }
  }
  return Frame(n, q, std::move(rows), std::move(w));
}

Frame add_constraint(const Frame& f, const MaltsevOp& phi, const BoundConstraint& c) {
  const int n = f.arity(), q = f.domain_size();
  const auto& scope = c.scope;
  if (static_cast<int>(scope.size()) != c.relation.arity()) {
    throw InvalidArgument("scope length does not match relation arity");
  }
  {
    std::vector<int> sorted = scope;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidArgument("scope variables must be distinct; collapse first");
    }
    if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= n)) {
      throw InvalidArgument("scope variable out of range");
    }
  }
  if (f.empty()) return Frame::empty_relation(n, q);

  Tuple image(scope.size());
  auto consistent = [&](const Tuple& t) {
    for (std::size_t k = 0; k < scope.size(); ++k) image[k] = t[scope[k]];
    return c.relation.contains(image);
  };

  PrefixFixer fixer(f, phi);
  RowBuilder out(n, q);
  for (int i = 0; i < n; ++i) {
    std::vector<int> joint(scope.begin(), scope.end());
    joint.push_back(i);
    std::sort(joint.begin(), joint.end());
    joint.erase(std::unique(joint.begin(), joint.end()), joint.end());

    std::vector<Tuple> u_rows;
    for (auto& t : generate_projection(f.rows(), phi, joint))
      if (consistent(t)) u_rows.push_back(std::move(t));
    if (u_rows.empty()) return Frame::empty_relation(n, q);
    std::sort(u_rows.begin(), u_rows.end());

    std::vector<char> pending(q, 0);
    for (const auto& t : u_rows) pending[t[i]] = 1;

    // Positions of the constraint at or after i, shifted into the fixed
    // frame's coordinates, plus i itself.
    std::vector<int> tail{0};
    for (int v : scope)
      if (v > i) tail.push_back(v - i);

    for (const auto& t : u_rows) {
      if (!pending[t[i]]) continue;
      const Tuple prefix(t.begin(), t.begin() + i);
      const Frame& fixed = fixer.get(prefix);
      bool hit_own = false;
      for (const auto& r : generate_projection(fixed.rows(), phi, tail)) {
        Tuple full = prefix;
        full.insert(full.end(), r.begin(), r.end());
        if (!consistent(full) || !pending[r[0]]) continue;
        hit_own |= r[0] == t[i];
        pending[r[0]] = 0;
        out.set_witness(r[0], i, out.add(std::move(full)));
      }
      if (!hit_own) throw Error("internal: prefix class lost its own witness");
    }
  }
  return shrink_to_small(std::move(out).finish(), phi);
}

Frame add_constraint_split(const Frame& f, const MaltsevOp& phi, const BoundConstraint& c) {
  const int r = c.relation.arity();
  Frame cur = f;
  for (int k = 1; k <= r; ++k) {
    std::vector<int> head(k);
    std::iota(head.begin(), head.end(), 0);
    BoundConstraint part{k == r ? c.relation : project(c.relation, head),
                         std::vector<int>(c.scope.begin(), c.scope.begin() + k)};
    cur = add_constraint(cur, phi, part);
  }
  return cur;
}

Frame build_frame(const RelationalStructure& s, const MaltsevOp& phi, const Instance& inst,
                  bool split) {
  if (phi.domain_size() != s.domain_size()) throw InvalidArgument("operation domain mismatch");
  const auto bound = bind(s, inst);
  Frame f = initial_frame(inst.n, s.domain_size());
  for (const auto& c : bound) {
    f = split ? add_constraint_split(f, phi, c) : add_constraint(f, phi, c);
    if (f.empty()) break;
  }
  return f;
}

Partition frame_congruence(const Frame& f, int i) {
  if (i < 0 || i >= f.arity()) throw InvalidArgument("position out of range");
  std::vector<std::vector<std::int64_t>> classes;
  for (const auto& cls : witness_classes(f, i)) classes.emplace_back(cls.begin(), cls.end());
  return Partition::from_classes(std::move(classes));
}

namespace {

void extend(const Frame& g, const MaltsevOp& phi, Tuple& prefix, std::vector<Tuple>& out,
            std::size_t cap) {
  if (g.empty()) return;
  if (g.arity() == 0) {
    if (out.size() >= cap) throw CapExceeded("generated relation exceeds the enumeration cap");
    out.push_back(prefix);
    return;
  }
  for (Element a : g.projection(0)) {
    prefix.push_back(a);
    extend(fix_first(g, phi, a), phi, prefix, out, cap);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Tuple> enumerate_frame(const Frame& f, const MaltsevOp& phi, std::size_t cap) {
  std::vector<Tuple> out;
  Tuple prefix;
  extend(f, phi, prefix, out, cap);
  return out;
}

std::string dump(const Frame& f) {
  std::string s = "frame n=" + std::to_string(f.arity()) + " rows=" + std::to_string(f.size()) + "\n";
  for (const auto& t : f.rows()) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k) s += " ";
      s += std::to_string(t[k]);
    }
    s += "\n";
  }
  for (int i = 0; i < f.arity(); ++i)
    for (Element a = 0; a < f.domain_size(); ++a)
      if (f.witness(a, i) >= 0) {
        s += "witness a=" + std::to_string(a) + " i=" + std::to_string(i + 1) +
             " row=" + std::to_string(f.witness(a, i)) + "\n";
      }
  return s;
}

}  // namespace sharpcsp
