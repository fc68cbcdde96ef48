#include "gazesim/series.hpp"

#include <bit>
#include <cmath>

#include "gazesim/error.hpp"

namespace gazesim {

std::int64_t FixationSeries::time_ms(std::size_t k) const {
  return start_ms + std::llround(1000.0 * static_cast<double>(k) / frame_rate_fps);
}

PointSeries FixationSeries::points() const {
  PointSeries out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = {xs[k], ys[k]};
  return out;
}

FixationSeries FixationSeries::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) {
    throw Error(Errc::OutOfRange, "slice [" + std::to_string(first) + ", " + std::to_string(first + count) +
                                      ") exceeds series of " + std::to_string(size()) + " frames");
  }
  FixationSeries out;
  out.viewer_id = viewer_id;
  out.frame_rate_fps = frame_rate_fps;
  out.start_ms = time_ms(first);
  out.xs.assign(xs.begin() + first, xs.begin() + first + count);
  out.ys.assign(ys.begin() + first, ys.begin() + first + count);
  out.mask.assign(mask.begin() + first, mask.begin() + first + count);
  return out;
}

void FixationSeries::validate() const {
  if (!(frame_rate_fps > 0.0) || !std::isfinite(frame_rate_fps)) {
    throw Error(Errc::InvalidArgument, "series '" + viewer_id + "': frame rate must be positive");
  }
  if (ys.size() != xs.size() || mask.size() != xs.size()) {
    throw Error(Errc::InvalidArgument, "series '" + viewer_id + "': xs/ys/mask lengths differ");
  }
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (mask[k] && (!std::isfinite(xs[k]) || !std::isfinite(ys[k]))) {
      throw Error(Errc::InvalidArgument,
                  "series '" + viewer_id + "': observed sample " + std::to_string(k) + " is not finite");
    }
  }
}

bool operator==(const FixationSeries& a, const FixationSeries& b) {
  if (a.viewer_id != b.viewer_id || a.start_ms != b.start_ms || a.mask != b.mask || a.xs.size() != b.xs.size() ||
      a.ys.size() != b.ys.size() ||
      std::bit_cast<std::uint64_t>(a.frame_rate_fps) != std::bit_cast<std::uint64_t>(b.frame_rate_fps)) {
    return false;
  }
  for (std::size_t k = 0; k < a.xs.size(); ++k) {
    if (std::bit_cast<std::uint64_t>(a.xs[k]) != std::bit_cast<std::uint64_t>(b.xs[k])) return false;
  }
  for (std::size_t k = 0; k < a.ys.size(); ++k) {
    if (std::bit_cast<std::uint64_t>(a.ys[k]) != std::bit_cast<std::uint64_t>(b.ys[k])) return false;
  }
  return true;
}

}  // namespace gazesim
