#pragma once
#include <stdexcept>
#include <string>

namespace lyh {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// stencil or sample point leaves the chart domain (minus margin)
struct DomainError : Error {
  using Error::Error;
};
struct DegeneracyError : Error {
  using Error::Error;
};
struct UnsupportedError : Error {
  using Error::Error;
};
// identity requested outside the configuration it is stated for
struct ScopeError : Error {
  using Error::Error;
};
struct InvariantError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct StepSizeError : Error {
  using Error::Error;
};
struct BlowUpError : Error {
  using Error::Error;
};
struct ShapeError : Error {
  using Error::Error;
};

}  // namespace lyh
