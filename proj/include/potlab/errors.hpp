#pragma once

#include <stdexcept>
#include <string>

namespace potlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AtomCollision : public Error {
public:
    using Error::Error;
};

class DegenerateGrid : public Error {
public:
    using Error::Error;
};

class PrecisionTooLow : public Error {
public:
    using Error::Error;
};

class BreakdownError : public Error {
public:
    using Error::Error;
};

class PairingFailure : public Error {
public:
    using Error::Error;
};

class StressFailure : public Error {
public:
    using Error::Error;
};

class DegenerateRegion : public Error {
public:
    using Error::Error;
};

class TracingFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace potlab
