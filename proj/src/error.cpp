#include "conemech/error.hpp"

namespace conemech {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ApexOutsideLS: return "ApexOutsideLS";
    case ErrorKind::DegenerateWedge: return "DegenerateWedge";
    case ErrorKind::UnsupportedMode: return "UnsupportedMode";
    case ErrorKind::ThetaOutOfArc: return "ThetaOutOfArc";
    case ErrorKind::OutsideCone: return "OutsideCone";
    case ErrorKind::NoUniqueDecomposition: return "NoUniqueDecomposition";
    case ErrorKind::VertexInfeasible: return "VertexInfeasible";
    case ErrorKind::EmptyRobustCone: return "EmptyRobustCone";
    case ErrorKind::NoFeasibleSample: return "NoFeasibleSample";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::ModeCatalogMismatch: return "ModeCatalogMismatch";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "?";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

VertexInfeasibleError::VertexInfeasibleError(const std::string& what,
                                             std::vector<unsigned> vertices)
    : Error(ErrorKind::VertexInfeasible, what), vertices_(std::move(vertices)) {}

ParseError::ParseError(const std::string& what, int line)
    : Error(ErrorKind::ParseError, what), line_(line) {}

}  // namespace conemech
