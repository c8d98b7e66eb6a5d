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

// Text formats for structures and instances.
//
// Structure:
//   domain <q>
//   relation <NAME> <arity> <count>
//   <count lines of arity integers>
// Instance:
//   vars <n>
//   constraint <NAME> <v1> ... <vr>     (variables are 1-based)
// `#` starts a comment; blank lines are ignored.

#ifndef SHARPCSP_IO_HPP_
#define SHARPCSP_IO_HPP_

#include <string>
#include <string_view>

#include "sharpcsp/frames.hpp"
#include "sharpcsp/relations.hpp"

namespace sharpcsp {

// Throw ParseError carrying the offending line.
RelationalStructure parse_structure(std::string_view text);
// Relation names and arities are checked against s.
Instance parse_instance(std::string_view text, const RelationalStructure& s);

// Throws Error when the file cannot be read.
std::string read_file(const std::string& path);

std::string format_structure(const RelationalStructure& s);
std::string format_instance(const Instance& inst);

}  // namespace sharpcsp

#endif  // SHARPCSP_IO_HPP_
