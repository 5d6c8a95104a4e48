#pragma once

#include <stdexcept>
#include <string>

namespace sncse {

// Exit-code mapping: ConfigError/DataError and friends -> 2, usage errors -> 1.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimError : Error {
    using Error::Error;
};

struct StateError : Error {
    using Error::Error;
};

struct ContractError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// Zero-norm embeddings abort rather than clamp; they indicate an encoder bug.
struct DegenerateInputError : Error {
    using Error::Error;
};

struct InputError : Error {
    using Error::Error;
};

}  // namespace sncse
