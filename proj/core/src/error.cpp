#include "csilsh/error.hpp"

namespace csilsh {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::NotPowerOfFour: return "NotPowerOfFour";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DimensionTooLargeForOracle: return "DimensionTooLargeForOracle";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::EmptyNeighborSet: return "EmptyNeighborSet";
    case Errc::PositionOutOfArea: return "PositionOutOfArea";
    case Errc::IoError: return "IoError";
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::MalformedIndex: return "MalformedIndex";
    }
    return "Unknown";
}

} // namespace csilsh
