#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

/// Base for every error raised by the library. The CLI maps the concrete
/// subclasses onto exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
  public:
    using Error::Error;
};

class InvalidConfig : public Error {
  public:
    using Error::Error;
};

/// Rated power exceeds what the line can transfer, or a root bracket has no
/// sign change.
class NoEquilibrium : public Error {
  public:
    using Error::Error;
};

/// Closed forms assume identical modules.
class HeterogeneousConfig : public Error {
  public:
    using Error::Error;
};

class NumericalBlowup : public Error {
  public:
    NumericalBlowup(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

  private:
    double time_;
};

} // namespace cascade
