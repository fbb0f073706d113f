// Copyright 2026 The relsearch Authors.
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

#ifndef RELSEARCH_ERROR_HPP_
#define RELSEARCH_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace relsearch {

// Root of every exception thrown by the library. The C API maps each
// subclass onto one rs_status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments outside a function's domain (bad coordinates, invalid params,
// stepping a finished episode).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The Bayes filter received an observation with zero likelihood under every
// state in the support.
class FilterDegenerateError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class DigestMismatchError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// Link-file violations. line() is 1-based, 0 when not tied to a line.
class ProtocolError : public Error {
 public:
  ProtocolError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace relsearch

#endif  // RELSEARCH_ERROR_HPP_
