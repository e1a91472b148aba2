#pragma once

#include <stdexcept>
#include <string>

namespace conglab {

// Exit-code conventions used by the CLI: 2 usage/missing input,
// 3 data inconsistency, 4 schema error, 5 numerical failure.

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
    static constexpr int exit_code = 2;
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
    static constexpr int exit_code = 3;
};

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
    static constexpr int exit_code = 4;
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
    static constexpr int exit_code = 5;
};

} // namespace conglab
