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

#ifndef SHARPCSP_COMMON_HPP_
#define SHARPCSP_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sharpcsp {

// Domain elements are encoded as 0..q-1.
using Element = int;
using Tuple = std::vector<Element>;
using BigInt = boost::multiprecision::cpp_int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed structure or instance text. `line` is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A caller-side precondition does not hold (e.g. no Mal'tsev polymorphism).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration would exceed the configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Rank-one reconstruction was inconsistent: the language is not balanced.
class NotBalancedError : public Error {
 public:
  using Error::Error;
};

std::string to_string(const Tuple& t);

// q^k as a 64-bit value; throws InvalidArgument on overflow.
std::uint64_t checked_power(std::uint64_t q, int k);

}  // namespace sharpcsp

#endif  // SHARPCSP_COMMON_HPP_
