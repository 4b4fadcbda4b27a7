// Copyright 2026 The rIoU Authors. All Rights Reserved.
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

#ifndef RIOU_ERRORS_H_
#define RIOU_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riou {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyMaskError : public Error {
 public:
  EmptyMaskError() : Error("mask has no foreground pixels") {}
};

class InvalidBoxError : public Error {
 public:
  using Error::Error;
};

class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. line() is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptySequenceError : public Error {
 public:
  EmptySequenceError() : Error("sequence has no frames") {}
};

class EmptyFirstFrameError : public Error {
 public:
  EmptyFirstFrameError() : Error("first frame of the sequence is empty") {}
};

}  // namespace riou

#endif  // RIOU_ERRORS_H_
