// Copyright 2026 The mmgcoop Authors
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

#ifndef MMGCOOP_ERRORS_HPP
#define MMGCOOP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmgcoop {

// Malformed input document (syntax, missing keys, wrong JSON types).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A typed invariant was violated. `field()` is the dotted path of the
// offending value, e.g. "prices.sell[5]".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Vector/matrix sizes disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mmgcoop

#endif  // MMGCOOP_ERRORS_HPP
