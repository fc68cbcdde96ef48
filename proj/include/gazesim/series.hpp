#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gazesim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

/// Trajectory handed to the distance kernels. Frame indices are implicit (1..n).
using PointSeries = std::vector<Point2>;

/// Fixed-rate gaze trajectory of one viewer.
///
/// `mask[k]` is true when sample k was observed. Unobserved samples carry
/// whatever the last preprocessing stage left there (NaN after rasterizing,
/// the fill value after filling), so consumers must consult the mask.
struct FixationSeries {
  std::string viewer_id;
  double frame_rate_fps = 0.0;
  std::int64_t start_ms = 0;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<bool> mask;

  std::size_t size() const noexcept { return xs.size(); }
  bool empty() const noexcept { return xs.empty(); }

  /// Video time of frame k in milliseconds, rounded to the nearest integer.
  std::int64_t time_ms(std::size_t k) const;

  /// Coordinates as a point sequence (mask ignored).
  PointSeries points() const;

  /// Frames [first, first + count) as a new series with its own start time.
  FixationSeries slice(std::size_t first, std::size_t count) const;

  /// Throws InvalidArgument unless the length/finiteness/rate invariants hold.
  void validate() const;

  /// Bitwise sample comparison, so NaN placeholders compare equal to themselves.
  friend bool operator==(const FixationSeries& a, const FixationSeries& b);
};

}  // namespace gazesim
