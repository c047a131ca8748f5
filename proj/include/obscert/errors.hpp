#pragma once

#include <stdexcept>
#include <string>

namespace obscert {

// Exit-code mapping used by the CLI lives in tools/; the library only
// distinguishes error categories.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition violation; message names the offending field.
class InvalidParams : public Error {
public:
    using Error::Error;
};

// An intermediate constant left the double range; message names the
// sub-expression.
class NonFiniteConstant : public Error {
public:
    using Error::Error;
};

class NotStronglyElliptic : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace obscert
