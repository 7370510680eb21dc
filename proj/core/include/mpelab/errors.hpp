#pragma once

#include <stdexcept>
#include <string>

namespace mpelab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed scenario, flag or score definition. The CLI maps these to exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of an operation (e.g. zero report density, c outside admissible region).
class DomainError : public Error {
public:
    using Error::Error;
};

// Perturbation path leaves the set of valid densities.
class PathError : public Error {
public:
    PathError(const std::string& what, double max_theta) : Error(what), max_admissible_theta(max_theta) {}
    double max_admissible_theta;
};

// Clearing and root-finding failures. The CLI maps these to exit status 3.
class SolverError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public SolverError {
public:
    using SolverError::SolverError;
};

class ConvergenceError : public SolverError {
public:
    using SolverError::SolverError;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

class OracleError : public Error {
public:
    using Error::Error;
};

} // namespace mpelab
