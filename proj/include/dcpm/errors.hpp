#pragma once

#include <stdexcept>
#include <string>

namespace dcpm {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(int line, const std::string& what);
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Combinatorial defect: bad incidence, wrong genus, mismatched field sizes.
class TopologyError : public Error {
public:
  using Error::Error;
};

/// A face whose model lengths violate the strict triangle inequality.
class InfeasibleFaceError : public Error {
public:
  InfeasibleFaceError(int face, const std::string& what);
  int face() const noexcept { return face_; }

private:
  int face_;
};

/// Factorization or solve failure of a (supposedly) SPD system.
class LinearSolveError : public Error {
public:
  using Error::Error;
};

} // namespace dcpm
