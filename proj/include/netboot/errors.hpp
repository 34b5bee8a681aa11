#pragma once

#include <stdexcept>
#include <string>

namespace netboot {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidNode : Error {
  using Error::Error;
};
struct SelfLoopRejected : Error {
  using Error::Error;
};
struct ParseError : Error {
  ParseError(const std::string& what, long line)
      : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};
struct InfeasibleDensity : Error {
  using Error::Error;
};
struct InvalidFraction : Error {
  using Error::Error;
};
struct EmptySample : Error {
  using Error::Error;
};
struct InvalidRank : Error {
  using Error::Error;
};
struct Undefined : Error {
  using Error::Error;
};
struct UndefinedAUC : Error {
  using Error::Error;
};
struct NoEdges : Error {
  using Error::Error;
};
struct SelectionFailed : Error {
  using Error::Error;
};
struct InvalidInput : Error {
  using Error::Error;
};
struct DegenerateDesign : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace netboot
