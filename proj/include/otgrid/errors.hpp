#pragma once

#include <stdexcept>
#include <string>

namespace otgrid {

// Error classes map to CLI exit codes: 2 input/validation, 3 numerical,
// 4 infeasibility. Success is 0.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const noexcept { return 3; }
  virtual const char* kind() const noexcept { return "error"; }
};

class ValidationError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
  const char* kind() const noexcept override { return "validation"; }
};

class NumericError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
  const char* kind() const noexcept override { return "numeric"; }
};

/// Raised when a cutoff-sparsified transport instance has no feasible plan.
class InfeasibleError : public Error {
public:
  InfeasibleError(const std::string& msg, double stranded_mass)
      : Error(msg), stranded_mass_(stranded_mass) {}
  int exit_code() const noexcept override { return 4; }
  const char* kind() const noexcept override { return "infeasible"; }
  double stranded_mass() const noexcept { return stranded_mass_; }

private:
  double stranded_mass_;
};

}  // namespace otgrid
