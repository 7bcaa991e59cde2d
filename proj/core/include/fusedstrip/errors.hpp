#pragma once

#include <stdexcept>
#include <string>

namespace fusedstrip {

struct SingularParameter : std::domain_error {
    explicit SingularParameter(const std::string& what) : std::domain_error(what) {}
};

struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : std::invalid_argument {
    explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

struct DegenerateBoundary : std::domain_error {
    explicit DegenerateBoundary(const std::string& what) : std::domain_error(what) {}
};

struct OutOfRange : std::domain_error {
    explicit OutOfRange(const std::string& what) : std::domain_error(what) {}
};

struct StateSpaceTooLarge : std::length_error {
    explicit StateSpaceTooLarge(const std::string& what) : std::length_error(what) {}
};

struct PathOrder : std::invalid_argument {
    explicit PathOrder(const std::string& what) : std::invalid_argument(what) {}
};

struct EvenWidth : std::invalid_argument {
    explicit EvenWidth(const std::string& what) : std::invalid_argument(what) {}
};

struct NotIrreducible : std::runtime_error {
    explicit NotIrreducible(const std::string& what) : std::runtime_error(what) {}
};

struct RepConstructionFailure : std::runtime_error {
    explicit RepConstructionFailure(const std::string& what) : std::runtime_error(what) {}
};

struct WindowTooSmall : std::invalid_argument {
    explicit WindowTooSmall(const std::string& what) : std::invalid_argument(what) {}
};

struct ZeroNormalizer : std::runtime_error {
    explicit ZeroNormalizer(const std::string& what) : std::runtime_error(what) {}
};

struct NegativeIntegrand : std::runtime_error {
    explicit NegativeIntegrand(const std::string& what) : std::runtime_error(what) {}
};

struct TooManyTimes : std::invalid_argument {
    explicit TooManyTimes(const std::string& what) : std::invalid_argument(what) {}
};

struct PhaseBoundary : std::domain_error {
    explicit PhaseBoundary(const std::string& what) : std::domain_error(what) {}
};

}  // namespace fusedstrip
