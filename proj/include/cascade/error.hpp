#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

/// Base for every error raised by the library. Callers that only need a
/// message can catch std::runtime_error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A field or cover file could not be decoded.
class FormatError : public Error {
public:
    using Error::Error;
};

/// The cover generator cannot meet the requested (K1, K2) bounds.
class InfeasibleCover : public Error {
public:
    InfeasibleCover(const std::string& what, std::size_t achieved_n, int achieved_multiplicity)
        : Error(what), achieved_n_(achieved_n), achieved_multiplicity_(achieved_multiplicity) {}

    std::size_t achieved_n() const { return achieved_n_; }
    int achieved_multiplicity() const { return achieved_multiplicity_; }

private:
    std::size_t achieved_n_;
    int achieved_multiplicity_;
};

}  // namespace cascade
