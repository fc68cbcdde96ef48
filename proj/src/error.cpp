#include "gazesim/error.hpp"

namespace gazesim {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::GeometryNotFound: return "GeometryNotFound";
    case Errc::RaggedRows: return "RaggedRows";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NonBooleanCell: return "NonBooleanCell";
    case Errc::OverlappingFixations: return "OverlappingFixations";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::AllExcluded: return "AllExcluded";
    case Errc::UpsampleRequested: return "UpsampleRequested";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewViewers: return "TooFewViewers";
    case Errc::NegativeDistance: return "NegativeDistance";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::NotNeighbor: return "NotNeighbor";
    case Errc::UnknownQuestion: return "UnknownQuestion";
    case Errc::ViewerMismatch: return "ViewerMismatch";
    case Errc::UnknownViewer: return "UnknownViewer";
    case Errc::UnknownChannel: return "UnknownChannel";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

}  // namespace gazesim
