#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ym {

// Error hierarchy. The CLI maps categories onto exit codes:
// input problems -> 1, numerical failures -> 2, I/O -> 3.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad expression text, bad spec file, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : InputError(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// log/sqrt outside their domain, division by zero, non-finite results.
class EvaluationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Point lies in the tail region or on a piece boundary.
class PointNotCovered : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// |f'| <= 1e-10 at a preimage: the density blows up there.
class DerivativeTooSmall : public NumericalError {
 public:
  DerivativeTooSmall(std::size_t piece, double y, double derivative)
      : NumericalError("derivative too small on piece " +
                       std::to_string(piece) + " at y=" + format(y) +
                       " (|f'|=" + format(derivative) + ")"),
        piece_(piece),
        y_(y),
        derivative_(derivative) {}
  std::size_t piece() const noexcept { return piece_; }
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
  double y() const noexcept { return y_; }
  double derivative() const noexcept { return derivative_; }

 private:
  std::size_t piece_;
  double y_;
  double derivative_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ym
