#pragma once

#include <stdexcept>
#include <string>

namespace gossip {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid model parameters (probabilities out of range, dimension mismatch, ...).
class ModelError : public Error {
public:
    explicit ModelError(const std::string& what) : Error(what) {}
};

/// A linear system could not be solved: singular or indefinite matrix,
/// typically because some connected component has no stubborn attachment.
class SingularError : public Error {
public:
    explicit SingularError(const std::string& what) : Error(what) {}
};

/// An operation was evaluated outside its domain (t below the admissible
/// range, time average of an empty trajectory, zero spectral gap, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

} // namespace gossip
