#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace simplex_asm {

/// Index type used for vertex ids, element ids and sparse coordinates.
using Index = std::int64_t;

enum class ErrorCode : int {
    invalid_argument = 1,
    degenerate_simplex,
    index_out_of_range,
    shape_mismatch,
    parse_error,
    io_error,
    capacity,
    contract_violation,
};

/// Exception carrying a machine-readable code; the C API maps it onto status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace simplex_asm
