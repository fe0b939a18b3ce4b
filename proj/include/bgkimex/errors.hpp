#pragma once

#include <stdexcept>
#include <string>

namespace bgkimex {

/// Structurally invalid Butcher tableau or wrong scheme kind for an analysis.
class TableauError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Conserved state outside the admissible set G (rho > 0, E - m^2/(2 rho) > 0).
class AdmissibilityError : public std::runtime_error {
public:
  AdmissibilityError(std::string msg, double rho, double internal_energy)
      : std::runtime_error(std::move(msg)), rho(rho), internal_energy(internal_energy) {}
  double rho;
  double internal_energy;
};

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace bgkimex
