#pragma once

#include <stdexcept>
#include <string>

namespace edof {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class CoverageError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class EmptyTableError : public Error {
public:
    using Error::Error;
};

class RegistrationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace edof
