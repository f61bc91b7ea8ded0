/**
 * @file error.hpp
 * @brief Exception types shared by the maxterm headers.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace maxterm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input (rationals, certificate files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A mathematical precondition failed: division by zero, K <= 1, and so on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An enclosure became too wide to be useful, or a truncation window is too small.
class PrecisionError : public Error {
public:
    using Error::Error;
};

} // namespace maxterm
