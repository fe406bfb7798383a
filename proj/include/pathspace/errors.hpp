#pragma once

#include <stdexcept>
#include <string>

namespace pathspace {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Binary operation on values of different rank.
class RankMismatchError : public Error {
public:
    explicit RankMismatchError(const std::string& what) : Error(what) {}
};

// Coordinatewise subtraction m - n with n not <= m.
class UnderflowError : public Error {
public:
    explicit UnderflowError(const std::string& what) : Error(what) {}
};

// compose() on a pair with source(lhs) != range(rhs), or a product/make
// with mismatched endpoints.
class NotComposableError : public Error {
public:
    explicit NotComposableError(const std::string& what) : Error(what) {}
};

// factorize()/prefix()/segment() outside the degree of the target.
class FactorizationError : public Error {
public:
    explicit FactorizationError(const std::string& what) : Error(what) {}
};

// An enumeration that cannot be completed (infinite slice without a limit,
// or a table queried beyond its declared bound).
class NotEnumerableError : public Error {
public:
    explicit NotEnumerableError(const std::string& what) : Error(what) {}
};

// Malformed input: graph/sequence/factor files, path literals, or a
// symbolic sequence whose instantiation is not a valid path.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace pathspace
