// Copyright 2026 The tvsum Authors.
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

#ifndef TVSUM_ERROR_HPP_
#define TVSUM_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvsum {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input that cannot be recovered line-by-line.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input that parses but violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical failure during optimisation (non-finite loss, etc.).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace tvsum

#endif  // TVSUM_ERROR_HPP_
