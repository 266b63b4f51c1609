#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cliffym {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Error hierarchy. The CLI maps these onto exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An algebraic invariant failed (Clifford relations, orthonormality, symmetry).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad user input: malformed flags, impossible family, unreadable file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Report or system file does not match the expected schema.
class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public SolverError {
 public:
  using SolverError::SolverError;
};

class SingularJacobian : public SolverError {
 public:
  using SolverError::SolverError;
};

class DegenerateFrame : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace cliffym
