#pragma once

#include <stdexcept>
#include <string>

namespace bhdnet {

// Raised for malformed or inconsistent input data (CSV contents, graph files,
// plan files). Precondition violations on API arguments use
// std::invalid_argument instead.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bhdnet
