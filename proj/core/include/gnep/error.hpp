#pragma once

#include <stdexcept>
#include <string>

namespace gnep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand sizes do not match the game layout.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed or ill-posed problem data (nonconcave payoff, bad bounds, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A share restriction set that contains no point.
class InfeasibleSetError : public Error {
 public:
  using Error::Error;
};

// Problem too large for exhaustive active-set enumeration.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// An inner solve did not reach its tolerance where an exact solution is
// required to continue.
class SolveError : public Error {
 public:
  using Error::Error;
};

}  // namespace gnep
