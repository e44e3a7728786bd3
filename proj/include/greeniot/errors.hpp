#pragma once

#include <stdexcept>
#include <string>

namespace greeniot {

// Invalid or inconsistent experiment/topology/workload parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A wireless link with zero gain cannot carry an upload this slot.
class InfeasibleLinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Processing demand exceeds a node's CPU capacity.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A decision would drive a battery below zero.
class EnergyInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A battery update would exceed capacity; storage clamping makes this a bug.
class ModelViolationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Model construction failed (incomplete snapshot data and the like).
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance too large for an enumeration-based routine.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// External solver failures. The three subclasses are kept distinct so callers
// can tell a crashed process from garbage output from a proven-infeasible model.
class ExternalSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SolverProcessError : public ExternalSolverError {
 public:
  using ExternalSolverError::ExternalSolverError;
};
class SolverOutputError : public ExternalSolverError {
 public:
  using ExternalSolverError::ExternalSolverError;
};
class SolverInfeasibleError : public ExternalSolverError {
 public:
  using ExternalSolverError::ExternalSolverError;
};

// A scheduler threw while deciding; the episode is aborted.
class EpisodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace greeniot
