// Copyright 2026 The MACH Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mach {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally invalid parameters (B < 2, R < 1, ...).
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// A caller-supplied argument outside its accepted range (k > K, delta
// outside (0,1), ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Data that does not fit the model or config: dimension mismatch, label out
// of range, non-finite feature, empty label set.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Item id outside the declared domain of a hash or sketch.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed text whose ids exceed the declared bounds.
class RangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Corrupt, truncated or version-mismatched binary model file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Files that cannot be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mach
