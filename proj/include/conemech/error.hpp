#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conemech {

enum class ErrorKind {
  ApexOutsideLS,
  DegenerateWedge,
  UnsupportedMode,
  ThetaOutOfArc,
  OutsideCone,
  NoUniqueDecomposition,
  VertexInfeasible,
  EmptyRobustCone,
  NoFeasibleSample,
  StepLimitExceeded,
  ModeCatalogMismatch,
  InvalidInput,
  ParseError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by robust_cone; carries the box vertices whose cone was empty or
// whose scenario was invalid.
class VertexInfeasibleError : public Error {
 public:
  VertexInfeasibleError(const std::string& what, std::vector<unsigned> vertices);
  const std::vector<unsigned>& vertices() const { return vertices_; }

 private:
  std::vector<unsigned> vertices_;
};

// Parse errors keep the offending line (1-based, 0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace conemech
