#pragma once

#include <stdexcept>
#include <string>

namespace armchair {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryUndefined : Error {
    using Error::Error;
};

struct IntegrationFailure : Error {
    IntegrationFailure(const std::string& msg, double residual)
        : Error(msg), achieved_residual(residual) {}
    double achieved_residual;
};

struct CountMismatch : Error {
    using Error::Error;
};

struct InternalInconsistency : Error {
    using Error::Error;
};

struct ClassificationFailure : Error {
    using Error::Error;
};

struct NotAnEigenvalue : Error {
    using Error::Error;
};

struct WrongBranch : Error {
    using Error::Error;
};

struct EvennessRequired : Error {
    using Error::Error;
};

struct NearDirichletSingularity : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

} // namespace armchair
