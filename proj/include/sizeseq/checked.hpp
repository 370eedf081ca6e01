#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sizeseq {

// Sequence values and indices. Indices are 1-based throughout.
using Count = std::uint64_t;
using Index = std::uint64_t;

// Exit codes reported by the CLI; library errors carry the matching code.
enum class ErrorCode : int {
  parse = 1,
  type = 2,
  overflow = 3,
  undefined_difference = 4,
  resource = 5,
  verify_mismatch = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t column, const std::string& what)
      : Error(ErrorCode::parse,
              "parse error at column " + std::to_string(column) + ": " + what),
        column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class TypeError : public Error {
 public:
  explicit TypeError(const std::string& what)
      : Error(ErrorCode::type, "type error: " + what) {}
};

class OverflowError : public Error {
 public:
  explicit OverflowError(Index at, const std::string& op = "")
      : Error(ErrorCode::overflow,
              "overflow at index " + std::to_string(at) +
                  (op.empty() ? "" : " in " + op)),
        at_(at) {}
  Index at() const { return at_; }

 private:
  Index at_;
};

class UndefinedDifferenceError : public Error {
 public:
  explicit UndefinedDifferenceError(const std::string& what)
      : Error(ErrorCode::undefined_difference,
              "undefined difference: " + what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what)
      : Error(ErrorCode::resource, "resource limit: " + what) {}
};

// label queries for elements outside the set; surfaces as a type-family error
class NotAMemberError : public Error {
 public:
  explicit NotAMemberError(const std::string& what)
      : Error(ErrorCode::type, "not a member: " + what) {}
};

inline Count checked_add(Count a, Count b, Index at, const char* op = "add") {
  Count r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError(at, op);
  return r;
}

inline Count checked_mul(Count a, Count b, Index at, const char* op = "mul") {
  Count r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError(at, op);
  return r;
}

}  // namespace sizeseq
