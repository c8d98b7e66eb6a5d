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

#include "sharpcsp/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace sharpcsp {

namespace {

struct Line {
  int number;
  std::vector<std::string_view> words;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  while (!text.empty() || number == 0) {
    ++number;
    const auto end = text.find('\n');
    std::string_view raw = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      if (j > i) line.words.push_back(raw.substr(i, j - i));
      i = j;
    }
    if (!line.words.empty()) lines.push_back(std::move(line));
    if (text.empty()) break;
  }
  return lines;
}

long long to_int(std::string_view w, int line, const char* what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || ptr != w.data() + w.size()) {
    throw ParseError(std::string("expected an integer ") + what + ", got '" + std::string(w) + "'", line);
  }
  return v;
}

void expect_words(const Line& l, std::size_t n, const char* form) {
  if (l.words.size() != n) throw ParseError(std::string("expected '") + form + "'", l.number);
}

}  // namespace

RelationalStructure parse_structure(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty structure file", 1);
  const Line& head = lines[0];
  if (head.words[0] != "domain") throw ParseError("structure must start with 'domain <q>'", head.number);
  expect_words(head, 2, "domain <q>");
  const long long q = to_int(head.words[1], head.number, "domain size");
  if (q < 1 || q > (1 << 20)) throw ParseError("domain size out of range", head.number);
  RelationalStructure s(static_cast<int>(q));

  std::size_t k = 1;
  while (k < lines.size()) {
    const Line& l = lines[k++];
    if (l.words[0] != "relation") {
      throw ParseError("expected 'relation <NAME> <arity> <count>', got '" + std::string(l.words[0]) + "'",
                       l.number);
    }
    expect_words(l, 4, "relation <NAME> <arity> <count>");
    const std::string name(l.words[1]);
    const long long arity = to_int(l.words[2], l.number, "arity");
    const long long count = to_int(l.words[3], l.number, "tuple count");
    if (arity < 1 || arity > 64) throw ParseError("arity out of range", l.number);
    if (count < 1) throw ParseError("relation '" + name + "' has no tuples", l.number);
    if (s.is_reserved(name)) throw ParseError("'" + name + "' is a reserved relation name", l.number);
    if (s.relations().count(name)) throw ParseError("relation '" + name + "' defined twice", l.number);
    std::vector<Tuple> tuples;
    for (long long t = 0; t < count; ++t) {
      if (k >= lines.size()) {
        throw ParseError("relation '" + name + "' ends after " + std::to_string(t) + " of " +
                             std::to_string(count) + " tuples",
                         lines.back().number);
      }
      const Line& row = lines[k++];
      if (static_cast<long long>(row.words.size()) != arity) {
        throw ParseError("tuple of relation '" + name + "' needs " + std::to_string(arity) + " entries",
                         row.number);
      }
      Tuple tuple;
      for (auto w : row.words) {
        const long long x = to_int(w, row.number, "domain element");
        if (x < 0 || x >= q) throw ParseError("element " + std::to_string(x) + " outside the domain", row.number);
        tuple.push_back(static_cast<Element>(x));
      }
      tuples.push_back(std::move(tuple));
    }
    try {
      s.add_relation(name, Relation(static_cast<int>(arity), std::move(tuples)));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), l.number);
    }
  }
  return s;
}

Instance parse_instance(std::string_view text, const RelationalStructure& s) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty instance file", 1);
  const Line& head = lines[0];
  if (head.words[0] != "vars") throw ParseError("instance must start with 'vars <n>'", head.number);
  expect_words(head, 2, "vars <n>");
  const long long n = to_int(head.words[1], head.number, "variable count");
  if (n < 0 || n > (1 << 20)) throw ParseError("variable count out of range", head.number);
  Instance inst{static_cast<int>(n), {}};
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& l = lines[k];
    if (l.words[0] != "constraint" || l.words.size() < 2) {
      throw ParseError("expected 'constraint <NAME> <v1> ... <vr>'", l.number);
    }
    const std::string name(l.words[1]);
    const auto rel = s.find(name);
    if (!rel) throw ParseError("unknown relation '" + name + "'", l.number);
    if (static_cast<int>(l.words.size()) - 2 != rel->arity()) {
      throw ParseError("relation '" + name + "' has arity " + std::to_string(rel->arity()), l.number);
    }
    Constraint c{name, {}};
    for (std::size_t w = 2; w < l.words.size(); ++w) {
      const long long v = to_int(l.words[w], l.number, "variable");
      if (v < 1 || v > n) throw ParseError("variable " + std::to_string(v) + " out of range 1.." + std::to_string(n), l.number);
      c.scope.push_back(static_cast<int>(v - 1));
    }
    inst.constraints.push_back(std::move(c));
  }
  return inst;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_structure(const RelationalStructure& s) {
  std::string out = "domain " + std::to_string(s.domain_size()) + "\n";
  for (const auto& [name, rel] : s.relations()) {
    out += "relation " + name + " " + std::to_string(rel.arity()) + " " + std::to_string(rel.size()) + "\n";
    for (const auto& t : rel) {
      for (std::size_t p = 0; p < t.size(); ++p) out += (p ? " " : "") + std::to_string(t[p]);
      out += "\n";
    }
  }
  return out;
}

std::string format_instance(const Instance& inst) {
  std::string out = "vars " + std::to_string(inst.n) + "\n";
  for (const auto& c : inst.constraints) {
    out += "constraint " + c.relation;
    for (int v : c.scope) out += " " + std::to_string(v + 1);
    out += "\n";
  }
  return out;
}

}  // namespace sharpcsp
