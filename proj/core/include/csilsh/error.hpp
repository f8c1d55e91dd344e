#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csilsh {

enum class Errc {
    NotPowerOfFour,
    DimensionMismatch,
    DimensionTooLargeForOracle,
    InvalidConfig,
    IndexOutOfRange,
    EmptyDataset,
    KTooLarge,
    EmptyNeighborSet,
    PositionOutOfArea,
    IoError,
    MalformedCsv,
    MalformedIndex,
};

std::string_view to_string(Errc code) noexcept;

/// All library failures are reported by throwing this type. `code()` tells
/// callers which contract was violated; `what()` carries the detail.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace csilsh
