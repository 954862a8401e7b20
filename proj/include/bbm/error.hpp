#pragma once

#include <stdexcept>
#include <string>

namespace bbm {

// Numeric values double as CLI exit codes where the taxonomy defines one.
enum class ErrorKind : int {
  Config = 2,
  Divergence = 3,
  Window = 4,
  Acceptance = 5,
  InvalidArgument = 6,
  Contract = 7,
  Io = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorKind::InvalidArgument, w) {}
};

struct ContractViolation : Error {
  explicit ContractViolation(const std::string& w) : Error(ErrorKind::Contract, w) {}
};

struct WindowError : Error {
  explicit WindowError(const std::string& w) : Error(ErrorKind::Window, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};

/// Raised when the state leaves the representable range. `time` is the
/// simulation time of the offending step (NaN when not tied to a step).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& w, double time) : Error(ErrorKind::Divergence, w), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace bbm
