#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gazesim {

enum class Errc {
  InvalidArgument,
  MissingColumn,
  MalformedRow,
  GeometryNotFound,
  RaggedRows,
  EmptyInput,
  NonBooleanCell,
  OverlappingFixations,
  EmptySeries,
  AllExcluded,
  UpsampleRequested,
  LengthMismatch,
  TooFewViewers,
  NegativeDistance,
  EmptyGraph,
  NotNeighbor,
  UnknownQuestion,
  ViewerMismatch,
  UnknownViewer,
  UnknownChannel,
  OutOfRange,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure surfaced by the library is one of these; `code()` carries the
// typed kind so callers (CLI exit codes, HTTP statuses) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gazesim
