#include "gazesim/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gazesim/error.hpp"
#include "parallel.hpp"

namespace gazesim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sample_time_ms(std::size_t k, double rate_hz) { return static_cast<double>(k) * 1000.0 / rate_hz; }

// First frame whose sample time is >= t_ms.
std::size_t first_frame_at_or_after(double t_ms, double rate_hz) {
  if (t_ms <= 0.0) return 0;
  auto k = static_cast<std::size_t>(std::ceil(t_ms * rate_hz / 1000.0));
  while (k > 0 && sample_time_ms(k - 1, rate_hz) >= t_ms) --k;
  while (sample_time_ms(k, rate_hz) < t_ms) ++k;
  return k;
}

}  // namespace

void PreprocessConfig::validate() const {
  if (!(source_rate_hz > 0.0)) throw Error(Errc::InvalidArgument, "source rate must be positive");
  if (!(smooth_window_ms >= 0.0)) throw Error(Errc::InvalidArgument, "smoothing window must be >= 0");
  if (!(missing_threshold > 0.0 && missing_threshold < 1.0)) {
    throw Error(Errc::InvalidArgument, "missing threshold must lie in (0, 1)");
  }
  if (!(target_fps > 0.0)) throw Error(Errc::InvalidArgument, "target frame rate must be positive");
  if (target_fps > source_rate_hz) {
    throw Error(Errc::UpsampleRequested, "target frame rate exceeds the source rate");
  }
  if (!std::isfinite(fill_value)) throw Error(Errc::InvalidArgument, "fill value must be finite");
  if (!(max_interp_gap_ms >= 0.0)) throw Error(Errc::InvalidArgument, "interpolation gap must be >= 0");
}

FixationSeries rasterize(const std::vector<RawFixationRecord>& records, double source_rate_hz,
                         std::int64_t duration_ms, std::string viewer_id) {
  if (!(source_rate_hz > 0.0)) throw Error(Errc::InvalidArgument, "source rate must be positive");
  if (duration_ms < 0) throw Error(Errc::InvalidArgument, "duration must be >= 0");

  const auto frames =
      static_cast<std::size_t>(std::floor(static_cast<double>(duration_ms) * source_rate_hz / 1000.0 + 1e-9));
  FixationSeries out;
  out.viewer_id = std::move(viewer_id);
  out.frame_rate_fps = source_rate_hz;
  out.xs.assign(frames, kNaN);
  out.ys.assign(frames, kNaN);
  out.mask.assign(frames, false);

  const double period_ms = 1000.0 / source_rate_hz;
  double latest_end = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (r > 0 && rec.start_ms < records[r - 1].start_ms) {
      throw Error(Errc::InvalidArgument, "fixation records must be ordered by start time");
    }
    if (latest_end - static_cast<double>(rec.start_ms) > period_ms) {
      throw Error(Errc::OverlappingFixations, "fixation starting at " + std::to_string(rec.start_ms) +
                                                  " ms overlaps its predecessor by more than one sample period");
    }
    latest_end = std::max(latest_end, static_cast<double>(rec.end_ms));

    const std::size_t lo = first_frame_at_or_after(static_cast<double>(rec.start_ms), source_rate_hz);
    const std::size_t hi =
        std::min(frames, first_frame_at_or_after(static_cast<double>(rec.end_ms), source_rate_hz));
    for (std::size_t k = lo; k < hi; ++k) {
      if (rec.has_position) {
        out.xs[k] = rec.x_px;
        out.ys[k] = rec.y_px;
        out.mask[k] = true;
      } else {
        out.xs[k] = kNaN;
        out.ys[k] = kNaN;
        out.mask[k] = false;
      }
    }
  }
  return out;
}

std::size_t triangular_taps(double window_ms, double frame_rate_fps) {
  auto taps = std::llround(window_ms * frame_rate_fps / 1000.0);
  if (taps < 1) taps = 1;
  if (taps % 2 == 0) ++taps;
  return static_cast<std::size_t>(taps);
}

FixationSeries triangular_smooth(const FixationSeries& series, double window_ms) {
  if (!(window_ms >= 0.0)) throw Error(Errc::InvalidArgument, "smoothing window must be >= 0");
  const std::size_t taps = triangular_taps(window_ms, series.frame_rate_fps);
  const auto half = static_cast<std::ptrdiff_t>(taps / 2);
  const auto n = static_cast<std::ptrdiff_t>(series.size());

  FixationSeries out = series;
  if (half == 0) return out;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!series.mask[i]) continue;
    double sx = 0.0;
    double sy = 0.0;
    double sw = 0.0;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (!series.mask[j]) continue;
      const auto w = static_cast<double>(half + 1 - std::abs(j - i));
      sx += w * series.xs[j];
      sy += w * series.ys[j];
      sw += w;
    }
    out.xs[i] = sx / sw;
    out.ys[i] = sy / sw;
  }
  return out;
}

double missing_ratio(const FixationSeries& series) {
  if (series.empty()) throw Error(Errc::EmptySeries, "missing ratio of empty series '" + series.viewer_id + "'");
  const auto missing = std::count(series.mask.begin(), series.mask.end(), false);
  return static_cast<double>(missing) / static_cast<double>(series.size());
}

ExclusionResult exclude_viewers(const CohortDataset& cohort, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(Errc::InvalidArgument, "threshold must lie in (0, 1)");
  ExclusionResult result;
  result.cohort = cohort;
  result.cohort.viewers.clear();
  for (const auto& [id, series] : cohort.viewers) {
    const double ratio = missing_ratio(series);
    if (ratio > threshold) {
      result.excluded.push_back({id, ratio});
    } else {
      result.cohort.viewers.emplace(id, series);
    }
  }
  if (result.cohort.viewers.empty()) {
    throw Error(Errc::AllExcluded, "every viewer exceeds the missing-data threshold");
  }
  for (const auto& e : result.excluded) result.cohort.eeg.erase(e.viewer_id);
  return result;
}

FixationSeries fill_missing(const FixationSeries& series, double fill_value) {
  FixationSeries out = series;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!out.mask[k]) {
      out.xs[k] = fill_value;
      out.ys[k] = fill_value;
    }
  }
  return out;
}

FixationSeries interpolate_gaps(const FixationSeries& series, double max_gap_ms, double fill_value) {
  FixationSeries out = series;
  const std::size_t n = series.size();
  const double period_ms = 1000.0 / series.frame_rate_fps;
  std::size_t k = 0;
  while (k < n) {
    if (series.mask[k]) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    while (k < n && !series.mask[k]) ++k;
    const std::size_t run = k - first;
    const bool interior = first > 0 && k < n;
    if (interior && static_cast<double>(run) * period_ms <= max_gap_ms) {
      const std::size_t left = first - 1;
      const std::size_t right = k;
      const auto span = static_cast<double>(right - left);
      for (std::size_t j = first; j < k; ++j) {
        const double t = static_cast<double>(j - left) / span;
        out.xs[j] = series.xs[left] + t * (series.xs[right] - series.xs[left]);
        out.ys[j] = series.ys[left] + t * (series.ys[right] - series.ys[left]);
      }
    } else {
      for (std::size_t j = first; j < k; ++j) {
        out.xs[j] = fill_value;
        out.ys[j] = fill_value;
      }
    }
  }
  return out;
}

FixationSeries downsample(const FixationSeries& series, double target_fps) {
  const double source = series.frame_rate_fps;
  if (!(target_fps > 0.0)) throw Error(Errc::InvalidArgument, "target frame rate must be positive");
  if (target_fps > source) throw Error(Errc::UpsampleRequested, "target frame rate exceeds the source rate");
  if (target_fps == source) return series;

  const std::size_t n_src = series.size();
  const auto n_out = static_cast<std::size_t>(std::floor(static_cast<double>(n_src) * target_fps / source + 1e-9));

  FixationSeries out;
  out.viewer_id = series.viewer_id;
  out.frame_rate_fps = target_fps;
  out.start_ms = series.start_ms;
  out.xs.resize(n_out);
  out.ys.resize(n_out);
  out.mask.resize(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    // Source position j * source / target, split into whole part and remainder
    // (exact when both rates are integral).
    const double num = static_cast<double>(j) * source;
    double whole = std::floor(num / target_fps);
    const double rem = num - whole * target_fps;
    if (2.0 * rem > target_fps) whole += 1.0;
    const auto idx = std::min(static_cast<std::size_t>(std::max(whole, 0.0)), n_src - 1);
    out.xs[j] = series.xs[idx];
    out.ys[j] = series.ys[idx];
    out.mask[j] = series.mask[idx];
  }
  return out;
}

PreprocessResult preprocess_cohort(const std::vector<ViewerInput>& viewers, std::int64_t duration_ms,
                                   const PreprocessConfig& config) {
  config.validate();
  {
    std::set<std::string> seen;
    for (const auto& v : viewers) {
      if (!seen.insert(v.viewer_id).second) {
        throw Error(Errc::InvalidArgument, "duplicate viewer id '" + v.viewer_id + "'");
      }
    }
  }

  const auto count = static_cast<std::ptrdiff_t>(viewers.size());
  std::vector<FixationSeries> smoothed(viewers.size());
  detail::parallel_for(count, [&](std::ptrdiff_t i) {
    const auto& v = viewers[i];
    smoothed[i] = triangular_smooth(rasterize(v.records, config.source_rate_hz, duration_ms, v.viewer_id),
                                    config.smooth_window_ms);
  });

  CohortDataset staged;
  staged.frame_rate_fps = config.source_rate_hz;
  for (auto& s : smoothed) staged.viewers.emplace(s.viewer_id, std::move(s));
  auto exclusion = exclude_viewers(staged, config.missing_threshold);

  std::vector<const FixationSeries*> kept;
  for (const auto& [id, series] : exclusion.cohort.viewers) kept.push_back(&series);
  std::vector<FixationSeries> finished(kept.size());
  const auto kept_count = static_cast<std::ptrdiff_t>(kept.size());
  detail::parallel_for(kept_count, [&](std::ptrdiff_t i) {
    const auto& s = *kept[i];
    FixationSeries filled = config.fill_mode == FillMode::Linear
                                ? interpolate_gaps(s, config.max_interp_gap_ms, config.fill_value)
                                : fill_missing(s, config.fill_value);
    finished[i] = downsample(filled, config.target_fps);
  });

  PreprocessResult result;
  result.cohort.frame_rate_fps = config.target_fps;
  for (auto& s : finished) result.cohort.viewers.emplace(s.viewer_id, std::move(s));
  result.excluded = std::move(exclusion.excluded);
  return result;
}

}  // namespace gazesim
