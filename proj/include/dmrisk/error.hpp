#pragma once

#include <stdexcept>
#include <string>

namespace dmrisk {

// Invalid parameters or inputs outside an operation's domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input files; the message carries the file, line and column.
class InputError : public DomainError {
public:
    using DomainError::DomainError;
};

// An object was used before the state it depends on was prepared.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Iterative procedures that fail to converge or bracket.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

}  // namespace dmrisk
