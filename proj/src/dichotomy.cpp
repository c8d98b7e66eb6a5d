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

#include "sharpcsp/dichotomy.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <thread>

namespace sharpcsp {

PatternTriple patterns(int q, Element a, Element b, Element c, Element d) {
  auto enc = [q](std::initializer_list<Element> xs) {
    std::uint64_t code = 0;
    for (Element x : xs) code = code * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(x);
    return code;
  };
  for (Element x : {a, b, c, d})
    if (x < 0 || x >= q) throw InvalidArgument("pattern element outside the domain");
  return {enc({a, a, a, b, b, b}), enc({c, c, d, d, d, c}), enc({d, d, c, c, c, d})};
}

// ---------------------------------------------------------------------------
// Automorphism search

namespace {

constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 22;

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

AutomorphismSearch::AutomorphismSearch(int q, std::vector<Relation> relations, int k)
    : q_(q), k_(k), size_(checked_power(q, k)), relations_(std::move(relations)) {
  if (k < 1) throw InvalidArgument("power must be at least 1");
  if (q > 64) throw InvalidArgument("automorphism search supports q <= 64");
  if (size_ > (std::uint64_t{1} << 24)) throw InvalidArgument("power domain too large");

  digits_.resize(size_ * k);
  for (std::uint64_t e = 0; e < size_; ++e) {
    std::uint64_t x = e;
    for (int c = k - 1; c >= 0; --c) {
      digits_[e * k + c] = static_cast<int>(x % q);
      x /= q;
    }
  }

  for (const auto& h : relations_) {
    const int r = h.arity();
    if (r > 20 || static_cast<double>(r) * std::log2(q + 1.0) > 22) {
      throw InvalidArgument("relation too wide for the automorphism tables");
    }
    for (const auto& t : h)
      for (Element x : t)
        if (x < 0 || x >= q) throw InvalidArgument("relation leaves the domain");
    RelData d;
    d.occ.assign(r, std::vector<std::vector<int>>(q));
    for (int i = 0; i < static_cast<int>(h.size()); ++i)
      for (int p = 0; p < r; ++p) d.occ[p][h[i][p]].push_back(i);
    const unsigned masks = 1u << r;
    d.in_proj.resize(masks);
    d.fill.resize(masks);
    std::uint64_t entries = 0;
    for (unsigned m = 0; m < masks; ++m) {
      const std::uint64_t width = ipow(q, std::popcount(m));
      entries += width;
      if (entries > kMaxTableEntries) throw InvalidArgument("relation too wide for the automorphism tables");
      d.in_proj[m].assign(width, 0);
      d.fill[m].assign(width, 0);
      for (const auto& t : h) {
        std::uint64_t key = 0;
        int rest = -1;
        bool uniform = true;
        for (int p = 0; p < r; ++p) {
          if (m >> p & 1) {
            key = key * q + t[p];
          } else if (rest < 0) {
            rest = t[p];
          } else if (rest != t[p]) {
            uniform = false;
          }
        }
        d.in_proj[m][key] = 1;
        if (rest >= 0 && uniform) d.fill[m][key] |= std::uint64_t{1} << rest;
      }
    }
    data_.push_back(std::move(d));
  }

  // Number of tuples of R^k holding e at position p, per (R, p).
  signature_.resize(size_);
  for (std::uint64_t e = 0; e < size_; ++e) {
    for (std::size_t h = 0; h < relations_.size(); ++h) {
      for (int p = 0; p < relations_[h].arity(); ++p) {
        std::uint64_t n = 1;
        for (int c = 0; c < k; ++c) n *= data_[h].occ[p][digits_[e * k + c]].size();
        signature_[e].push_back(n);
      }
    }
  }
}

namespace {
struct BudgetExhausted {};
}  // namespace

// Visits every tuple of R^k that holds e at position p.
template <class Visit>
void for_each_tuple_at(const Relation& rel, const std::vector<std::vector<int>>& occ_p, int q,
                       const int* digits, int k, std::vector<std::uint64_t>& tuple, Visit&& visit) {
  const int r = rel.arity();
  for (int c = 0; c < k; ++c)
    if (occ_p[digits[c]].empty()) return;
  std::vector<std::size_t> pick(k, 0);
  tuple.resize(r);
  while (true) {
    for (int pp = 0; pp < r; ++pp) {
      std::uint64_t code = 0;
      for (int c = 0; c < k; ++c) code = code * q + static_cast<std::uint64_t>(rel[occ_p[digits[c]][pick[c]]][pp]);
      tuple[pp] = code;
    }
    if (!visit()) return;
    int c = k - 1;
    while (c >= 0 && ++pick[c] == occ_p[digits[c]].size()) pick[c--] = 0;
    if (c < 0) return;
  }
}

constexpr double kMaxRefineTuples = 4e7;

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct AutomorphismSearch::Runner {
  const AutomorphismSearch& s;
  SearchBudget budget;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::uint64_t nodes = 0;

  std::uint64_t n;
  std::size_t words;
  std::vector<std::int64_t> img;
  std::vector<char> used;
  std::vector<std::uint64_t> dom;
  // Candidates of x that no other element has taken yet.
  std::vector<std::uint32_t> avail;
  // Undo log. word == kAssigned marks the assignment of elem.
  static constexpr std::size_t kAssigned = ~std::size_t{0};
  struct Saved {
    std::uint64_t elem;
    std::size_t word;
    std::uint64_t old;
  };
  std::vector<Saved> trail;

  std::vector<std::uint64_t> tuple;

  Runner(const AutomorphismSearch& search, const SearchBudget& b,
         const std::vector<int>& src, const std::vector<int>& dst)
      : s(search), budget(b), n(search.size_), words((search.size_ + 63) / 64) {
    img.assign(n, -1);
    used.assign(n, 0);
    dom.assign(n * words, 0);
    avail.assign(n, 0);
    std::map<int, std::vector<std::uint64_t>> targets;
    for (std::uint64_t v = 0; v < n; ++v) targets[dst[v]].push_back(v);
    std::map<int, std::vector<std::uint64_t>> bits;
    for (const auto& [color, members] : targets) {
      auto& b = bits[color];
      b.assign(words, 0);
      for (auto v : members) b[v / 64] |= std::uint64_t{1} << (v % 64);
    }
    for (std::uint64_t e = 0; e < n; ++e) {
      auto it = bits.find(src[e]);
      if (it == bits.end()) continue;
      std::copy(it->second.begin(), it->second.end(), dom.begin() + e * words);
      avail[e] = static_cast<std::uint32_t>(targets[src[e]].size());
    }
  }

  bool has(std::uint64_t x, std::uint64_t v) const { return dom[x * words + v / 64] >> (v % 64) & 1; }

  // False when x has no candidate left.
  bool remove(std::uint64_t x, std::uint64_t v) {
    std::uint64_t& w = dom[x * words + v / 64];
    const std::uint64_t bit = std::uint64_t{1} << (v % 64);
    if (!(w & bit)) return true;
    trail.push_back({x, x * words + v / 64, w});
    w &= ~bit;
    if (!used[v]) --avail[x];
    return avail[x] > 0;
  }

  void undo(std::size_t mark) {
    while (trail.size() > mark) {
      const Saved sv = trail.back();
      trail.pop_back();
      if (sv.word == kAssigned) {
        const auto v = static_cast<std::uint64_t>(img[sv.elem]);
        img[sv.elem] = -1;
        used[v] = 0;
        for (std::uint64_t y = 0; y < n; ++y)
          if (img[y] < 0 && y != sv.elem && has(y, v)) ++avail[y];
        continue;
      }
      std::uint64_t& w = dom[sv.word];
      std::uint64_t back = sv.old & ~w;
      const std::uint64_t base = (sv.word - sv.elem * words) * 64;
      while (back) {
        if (!used[base + std::countr_zero(back)]) ++avail[sv.elem];
        back &= back - 1;
      }
      w = sv.old;
    }
  }

  int digit(std::uint64_t e, int c) const { return s.digits_[e * s.k_ + c]; }

  bool check_tuple(const RelData& d, int r) {
    const int k = s.k_;
    const std::uint64_t q = s.q_;
    unsigned mask = 0;
    std::int64_t free_elem = -1;
    bool several = false;
    for (int p = 0; p < r; ++p) {
      if (img[tuple[p]] >= 0) {
        mask |= 1u << p;
      } else if (free_elem < 0) {
        free_elem = static_cast<std::int64_t>(tuple[p]);
      } else if (free_elem != static_cast<std::int64_t>(tuple[p])) {
        several = true;
      }
    }
    const bool forward = free_elem >= 0 && !several;
    const std::uint64_t all = q == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << q) - 1;
    std::uint64_t allowed[64];
    bool narrows = false;
    for (int c = 0; c < k; ++c) {
      std::uint64_t key = 0;
      for (int p = 0; p < r; ++p)
        if (mask >> p & 1) key = key * q + digit(static_cast<std::uint64_t>(img[tuple[p]]), c);
      if (!d.in_proj[mask][key]) return false;
      if (forward) {
        allowed[c] = d.fill[mask][key];
        if (!allowed[c]) return false;
        narrows |= allowed[c] != all;
      }
    }
    if (!forward || !narrows) return true;
    const auto u = static_cast<std::uint64_t>(free_elem);
    for (std::size_t wi = 0; wi < words; ++wi) {
      std::uint64_t w = dom[u * words + wi];
      while (w) {
        const std::uint64_t v = wi * 64 + std::countr_zero(w);
        w &= w - 1;
        bool ok = true;
        for (int c = 0; c < k && ok; ++c) ok = allowed[c] >> digit(v, c) & 1;
        if (!ok && !remove(u, v)) return false;
      }
    }
    return true;
  }

  bool check_around(std::uint64_t e) {
    for (std::size_t h = 0; h < s.relations_.size(); ++h) {
      const Relation& rel = s.relations_[h];
      const RelData& d = s.data_[h];
      for (int p = 0; p < rel.arity(); ++p) {
        bool ok = true;
        for_each_tuple_at(rel, d.occ[p], s.q_, &s.digits_[e * s.k_], s.k_, tuple,
                          [&] { return ok = check_tuple(d, rel.arity()); });
        if (!ok) return false;
      }
    }
    return true;
  }

  bool assign(std::uint64_t e, std::uint64_t v) {
    img[e] = static_cast<std::int64_t>(v);
    used[v] = 1;
    trail.push_back({e, kAssigned, 0});
    bool ok = true;
    for (std::uint64_t x = 0; x < n; ++x)
      if (img[x] < 0 && has(x, v) && --avail[x] == 0) ok = false;
    return ok && check_around(e);
  }

  void tick() {
    ++nodes;
    if (budget.max_nodes && nodes > budget.max_nodes) throw BudgetExhausted{};
    if (budget.max_seconds > 0 && (nodes & 255) == 0) {
      std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      if (dt.count() > budget.max_seconds) throw BudgetExhausted{};
    }
  }

  // Unassigned element with the fewest candidates, least index on ties.
  std::int64_t choose() const {
    std::int64_t best = -1;
    for (std::uint64_t x = 0; x < n; ++x) {
      if (img[x] >= 0) continue;
      if (best < 0 || avail[x] < avail[best]) best = static_cast<std::int64_t>(x);
    }
    return best;
  }

  std::int64_t next_value(std::uint64_t x, std::uint64_t from) const {
    for (std::uint64_t v = from; v < n; ++v) {
      if (v % 64 == 0 && dom[x * words + v / 64] == 0) {
        v += 63;
        continue;
      }
      if (has(x, v) && !used[v]) return static_cast<std::int64_t>(v);
    }
    return -1;
  }

  bool solve() {
    struct Level {
      std::uint64_t x;
      std::uint64_t next;
      std::size_t mark;
    };
    std::vector<Level> stack;
    bool descend = true;
    while (true) {
      if (descend) {
        const std::int64_t x = choose();
        if (x < 0) return true;
        stack.push_back({static_cast<std::uint64_t>(x), 0, trail.size()});
      }
      if (stack.empty()) return false;
      Level& top = stack.back();
      undo(top.mark);
      const std::int64_t v = next_value(top.x, top.next);
      if (v < 0) {
        stack.pop_back();
        descend = false;
        if (stack.empty()) return false;
        continue;
      }
      top.next = static_cast<std::uint64_t>(v) + 1;
      tick();
      descend = assign(top.x, static_cast<std::uint64_t>(v));
    }
  }
};

// Colour refinement on two copies of the power structure at once: the source
// copy individualizes the fixed points, the target copy their images. Colour
// ids are shared, so an automorphism must send each source element to a
// target element of the same colour. Returns false when the colour classes
// already differ in size.
bool AutomorphismSearch::refine(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fixes,
                                std::vector<int>& src, std::vector<int>& dst) const {
  std::map<std::vector<std::uint64_t>, int> by_signature;
  src.assign(size_, 0);
  for (std::uint64_t e = 0; e < size_; ++e)
    src[e] = by_signature.emplace(signature_[e], static_cast<int>(by_signature.size())).first->second;
  dst = src;
  int next = static_cast<int>(by_signature.size());
  for (auto [x, y] : fixes) {
    src[x] = next;
    dst[y] = next++;
  }

  double work = 0;
  for (const auto& h : relations_) work += h.arity() * std::pow(static_cast<double>(h.size()), k_);
  auto histogram_matches = [&] {
    std::map<int, std::int64_t> diff;
    for (std::uint64_t e = 0; e < size_; ++e) {
      ++diff[src[e]];
      --diff[dst[e]];
    }
    return std::all_of(diff.begin(), diff.end(), [](const auto& kv) { return kv.second == 0; });
  };
  if (!histogram_matches()) return false;
  if (work > kMaxRefineTuples) return true;

  // A new colour is the old one plus the multiset of coloured tuples around
  // the element, summarized by two independent 64-bit multiset hashes.
  std::size_t classes = 0;
  std::vector<std::uint64_t> tuple;
  while (true) {
    std::map<std::array<std::uint64_t, 3>, int> ids;
    std::vector<int> new_src(size_), new_dst(size_);
    for (auto [colors, out] : {std::pair{&src, &new_src}, std::pair{&dst, &new_dst}}) {
      for (std::uint64_t e = 0; e < size_; ++e) {
        std::uint64_t sum1 = 0, sum2 = 0;
        for (std::size_t h = 0; h < relations_.size(); ++h) {
          const Relation& rel = relations_[h];
          for (int p = 0; p < rel.arity(); ++p) {
            for_each_tuple_at(rel, data_[h].occ[p], q_, &digits_[e * k_], k_, tuple, [&] {
              std::uint64_t a = mix(h * 1315423911ULL + static_cast<std::uint64_t>(p) + 1);
              std::uint64_t b = mix(a ^ 0x9e3779b97f4a7c15ULL);
              for (auto x : tuple) {
                const auto c = static_cast<std::uint64_t>((*colors)[x]);
                a = mix(a + c);
                b = mix(b ^ (c * 0xff51afd7ed558ccdULL));
              }
              sum1 += a;
              sum2 += b;
              return true;
            });
          }
        }
        std::array<std::uint64_t, 3> key{static_cast<std::uint64_t>((*colors)[e]), sum1, sum2};
        (*out)[e] = ids.emplace(key, static_cast<int>(ids.size())).first->second;
      }
    }
    src = std::move(new_src);
    dst = std::move(new_dst);
    if (!histogram_matches()) return false;
    if (ids.size() == classes) return true;
    classes = ids.size();
  }
}

AutomorphismResult AutomorphismSearch::run(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fixes,
    const SearchBudget& budget) const {
  AutomorphismResult res;
  for (auto [x, y] : fixes)
    if (x >= size_ || y >= size_) throw InvalidArgument("fixed point outside the power domain");
  for (auto [x, y] : fixes)
    for (auto [x2, y2] : fixes)
      if ((x == x2) != (y == y2)) return res;

  // A short search on the cheap invariants settles most positive cases;
  // refinement pays off when no automorphism exists.
  std::vector<int> src(size_), dst;
  {
    std::map<std::vector<std::uint64_t>, int> by_signature;
    for (std::uint64_t e = 0; e < size_; ++e)
      src[e] = by_signature.emplace(signature_[e], static_cast<int>(by_signature.size())).first->second;
    dst = src;
  }
  const auto start = std::chrono::steady_clock::now();
  SearchBudget quick = budget;
  quick.max_nodes = budget.max_nodes ? std::min<std::uint64_t>(budget.max_nodes, 4 * size_) : 4 * size_;
  auto attempt = [&](const SearchBudget& b, bool& exhausted) -> std::optional<std::vector<std::uint64_t>> {
    Runner run(*this, b, src, dst);
    for (auto [x, y] : fixes) {
      if (run.img[x] >= 0) continue;
      if (!run.has(x, y) || !run.assign(x, y)) return std::nullopt;
    }
    std::optional<std::vector<std::uint64_t>> found;
    try {
      if (run.solve()) {
        found.emplace(size_);
        for (std::uint64_t e = 0; e < size_; ++e) (*found)[e] = static_cast<std::uint64_t>(run.img[e]);
      }
    } catch (const BudgetExhausted&) {
      exhausted = true;
    }
    res.nodes += run.nodes;
    return found;
  };

  bool exhausted = false;
  res.map = attempt(quick, exhausted);
  if (res.map || !exhausted) return res;
  if (budget.max_nodes && res.nodes >= budget.max_nodes) {
    res.exhausted_budget = true;
    return res;
  }
  if (!refine(fixes, src, dst)) return res;
  SearchBudget rest = budget;
  if (rest.max_nodes) rest.max_nodes -= res.nodes;
  if (rest.max_seconds > 0) {
    std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start;
    rest.max_seconds = std::max(1e-3, rest.max_seconds - spent.count());
  }
  exhausted = false;
  res.map = attempt(rest, exhausted);
  res.exhausted_budget = exhausted;
  return res;
}

bool AutomorphismSearch::is_automorphism(const std::vector<std::uint64_t>& map) const {
  if (map.size() != size_) return false;
  std::vector<char> hit(size_, 0);
  for (auto v : map) {
    if (v >= size_ || hit[v]) return false;
    hit[v] = 1;
  }
  RelationalStructure dummy(std::max(q_, 2));
  PowerStructure power(dummy, k_);
  for (const auto& h : relations_) {
    std::vector<std::uint64_t> image(h.arity());
    const bool ok = power.for_each_tuple(h, [&](std::span<const std::uint64_t> t) {
      for (std::size_t p = 0; p < t.size(); ++p) image[p] = map[t[p]];
      return power.contains(h, image);
    });
    if (!ok) return false;
  }
  return true;
}

namespace {

std::vector<Relation> user_relations(const RelationalStructure& s) {
  std::vector<Relation> out;
  for (const auto& [_, r] : s.relations()) out.push_back(r);
  return out;
}

}  // namespace

AutomorphismResult find_automorphism(
    const RelationalStructure& s, int k,
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fixes,
    const SearchBudget& budget) {
  return AutomorphismSearch(s.domain_size(), user_relations(s), k).run(fixes, budget);
}

// ---------------------------------------------------------------------------
// Balance refuter

namespace {

CountMatrix pair_matrix(const std::vector<Tuple>& sols, int p1, int p2) {
  std::vector<std::int64_t> xs, ys;
  for (const auto& t : sols) {
    xs.push_back(t[p1]);
    ys.push_back(t[p2]);
  }
  auto rows = xs, cols = ys;
  for (auto* v : {&rows, &cols}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  CountMatrix m(rows, cols);
  for (std::size_t k = 0; k < xs.size(); ++k) m.at(m.row_index(xs[k]), m.col_index(ys[k])) += 1;
  return m;
}

std::optional<BalanceRefutation> first_failing_pair(const Instance& formula,
                                                    const std::vector<Tuple>& sols) {
  for (int p1 = 0; p1 < formula.n; ++p1)
    for (int p2 = 0; p2 < formula.n; ++p2) {
      if (p1 == p2) continue;
      CountMatrix m = pair_matrix(sols, p1, p2);
      if (!is_rank_one_block(m)) return BalanceRefutation{formula, p1, p2, std::move(m)};
    }
  return std::nullopt;
}

}  // namespace

std::optional<BalanceRefutation> refute_balance(const RelationalStructure& s, const MaltsevOp& phi,
                                                const RefuteOptions& opts) {
  for (const auto& [name, rel] : s.relations()) {
    Instance formula{rel.arity(), {}};
    Constraint c{name, {}};
    for (int p = 0; p < rel.arity(); ++p) c.scope.push_back(p);
    formula.constraints.push_back(std::move(c));
    if (auto r = first_failing_pair(formula, rel.tuples())) return r;
  }

  std::vector<std::pair<std::string, int>> lang;
  for (const auto& [name, rel] : s.language()) lang.emplace_back(name, rel->arity());
  std::mt19937_64 rng(opts.seed);
  const int max_vars = std::max(2, opts.max_vars);
  const int max_cons = std::max(1, opts.max_constraints);
  for (int f = 0; f < opts.random_formulas; ++f) {
    Instance formula;
    formula.n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_vars - 1));
    const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_cons));
    for (int k = 0; k < m; ++k) {
      const auto& [name, arity] = lang[rng() % lang.size()];
      Constraint c{name, {}};
      for (int p = 0; p < arity; ++p) c.scope.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(formula.n)));
      formula.constraints.push_back(std::move(c));
    }
    std::vector<Tuple> sols;
    try {
      sols = enumerate_frame(build_frame(s, phi, formula), phi, opts.max_solutions);
    } catch (const CapExceeded&) {
      continue;
    }
    if (auto r = first_failing_pair(formula, sols)) return r;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Decision

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::kNotStronglyRectangular: return "NOT_STRONGLY_RECTANGULAR";
    case VerdictKind::kNotBalanced: return "NOT_BALANCED";
    case VerdictKind::kBalanced: return "BALANCED";
    case VerdictKind::kTimeout: return "TIMEOUT";
  }
  return "?";
}

DichotomyVerdict decide_strong_balance(const RelationalStructure& s, const DecideOptions& opts) {
  DichotomyVerdict v;
  const int q = s.domain_size();
  auto ms = search_maltsev(s, opts.maltsev);
  if (ms.exhausted_budget) {
    v.kind = VerdictKind::kTimeout;
    v.note = "Mal'tsev search budget exhausted";
    return v;
  }
  if (!ms.op) {
    v.kind = VerdictKind::kNotStronglyRectangular;
    v.rectangularity = ms.certificate;
    return v;
  }
  v.maltsev = ms.op;

  if (opts.run_refuter) {
    if (auto r = refute_balance(s, *ms.op, opts.refute)) {
      v.kind = VerdictKind::kNotBalanced;
      v.refutation = std::move(r);
      return v;
    }
  }

  const std::uint64_t power_size = checked_power(q, 6);
  if (power_size > opts.max_power_domain) {
    v.kind = VerdictKind::kTimeout;
    v.note = "power domain of " + std::to_string(power_size) + " elements exceeds the limit";
    return v;
  }
  std::optional<AutomorphismSearch> search;
  try {
    search.emplace(q, user_relations(s), 6);
  } catch (const InvalidArgument& e) {
    v.kind = VerdictKind::kTimeout;
    v.note = e.what();
    return v;
  }

  std::vector<Quadruple> quads;
  for (Element a = 0; a < q; ++a)
    for (Element b = 0; b < q; ++b)
      for (Element c = 0; c < q; ++c)
        for (Element d = 0; d < q; ++d)
          if (c != d) quads.push_back({a, b, c, d});

  enum Outcome : char { kPending, kFound, kNone, kBudget };
  std::vector<Outcome> outcome(quads.size(), kPending);
  auto run_one = [&](std::size_t idx) {
    const Quadruple& qd = quads[idx];
    const auto pt = patterns(q, qd.a, qd.b, qd.c, qd.d);
    const auto res = search->run({{pt.abar, pt.abar}, {pt.cbar, pt.dbar}}, opts.per_quadruple);
    return res.map ? kFound : res.exhausted_budget ? kBudget : kNone;
  };

  if (opts.parallel && quads.size() > 1) {
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(quads.size()));
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_failure{quads.size()};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t idx = next.fetch_add(1);
          if (idx >= quads.size() || idx > first_failure.load()) return;
          outcome[idx] = run_one(idx);
          if (outcome[idx] != kFound) {
            std::size_t cur = first_failure.load();
            while (idx < cur && !first_failure.compare_exchange_weak(cur, idx)) {
            }
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t idx = 0; idx < quads.size(); ++idx) {
      outcome[idx] = run_one(idx);
      if (outcome[idx] != kFound) break;
    }
  }

  for (std::size_t idx = 0; idx < quads.size(); ++idx) {
    if (outcome[idx] == kFound) continue;
    v.quadruples_checked = idx + 1;
    v.quadruple = quads[idx];
    v.kind = outcome[idx] == kNone ? VerdictKind::kNotBalanced : VerdictKind::kTimeout;
    if (outcome[idx] == kBudget) v.note = "automorphism search budget exhausted";
    return v;
  }
  v.kind = VerdictKind::kBalanced;
  v.quadruples_checked = quads.size();
  return v;
}

std::string format_formula(const Instance& inst) {
  std::string s;
  for (std::size_t k = 0; k < inst.constraints.size(); ++k) {
    if (k) s += " & ";
    s += inst.constraints[k].relation + "(";
    for (std::size_t p = 0; p < inst.constraints[k].scope.size(); ++p) {
      if (p) s += ",";
      s += "x" + std::to_string(inst.constraints[k].scope[p] + 1);
    }
    s += ")";
  }
  return s;
}

std::string format_verdict(const DichotomyVerdict& v) {
  std::string s = std::string("verdict=") + to_string(v.kind) + "\n";
  if (v.rectangularity) {
    s += "witness=rectangularity " + to_string(*v.rectangularity) + "\n";
  } else if (v.kind == VerdictKind::kNotStronglyRectangular) {
    s += "witness=no Mal'tsev polymorphism\n";
  }
  if (v.refutation) {
    const auto& r = *v.refutation;
    s += "witness=balance formula=" + format_formula(r.formula) + " pair=(x" +
         std::to_string(r.first + 1) + ",x" + std::to_string(r.second + 1) +
         ") matrix=" + to_string(r.matrix) + "\n";
  }
  if (v.quadruple) {
    const auto& qd = *v.quadruple;
    s += "witness=quadruple a=" + std::to_string(qd.a) + " b=" + std::to_string(qd.b) +
         " c=" + std::to_string(qd.c) + " d=" + std::to_string(qd.d) + "\n";
  }
  if (v.kind == VerdictKind::kBalanced || v.quadruples_checked) {
    s += "quadruples_checked=" + std::to_string(v.quadruples_checked) + "\n";
  }
  if (!v.note.empty()) s += "note=" + v.note + "\n";
  if (v.maltsev) s += "maltsev=\n" + format_table(*v.maltsev);
  return s;
}

}  // namespace sharpcsp
