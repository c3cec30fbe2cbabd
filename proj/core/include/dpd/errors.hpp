// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpd {

// Base class for all errors thrown by this library. Everything derives
// from std::runtime_error so callers can catch one type at the boundary.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// A serialized artifact (signal or parameter file) is malformed.
// `offset` is the byte position at which the problem was detected.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// A numeric quantity became non-finite during a computation.
// `index` identifies the sample or coordinate that triggered it.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t index)
      : Error(what + " (at index " + std::to_string(index) + ")"),
        message_(what),
        index_(index) {}

  // The description without the index suffix, for rewrapping with more
  // context without duplicating the suffix.
  const std::string& message() const noexcept { return message_; }

  std::size_t index() const noexcept { return index_; }

 private:
  std::string message_;
  std::size_t index_;
};

// An API was driven through an unsupported state sequence, e.g. asking an
// optimizer to step before requesting its query point.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

// A text document (experiment config) failed to parse. `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dpd
