#pragma once

#include <stdexcept>
#include <string>

namespace crisp {

// Malformed input files or configuration. CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input that violates a data precondition (e.g. a label with no
// observed positives). CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crisp
