#pragma once

#include <stdexcept>
#include <string>

namespace shapeform {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Disconnected graphs, malformed edge lists, vertex-set mismatches.
class TopologyError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Raised when the scale denominator vanishes.
class DegenerateConfigurationError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace shapeform
