#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fscre {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class TooFewColumns : public Error {
 public:
  using Error::Error;
};

class EmptyTruth : public Error {
 public:
  using Error::Error;
};

// A column with zero robust (or classical) spread. `column()` is the index in
// the matrix that was being processed.
class DegenerateColumn : public Error {
 public:
  DegenerateColumn(std::size_t column, const std::string& what)
      : Error(what), column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace fscre
