#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cliffpoint {

enum class ErrorKind {
    invalid_config,
    invalid_input,
    empty_series,
    insufficient_data,
    degenerate_regression,
    degenerate_statistics,
    undefined_correlation,
    division_by_zero,
    invalid_reference,
    invalid_matrix,
    parse_error,
    io_error,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace cliffpoint
