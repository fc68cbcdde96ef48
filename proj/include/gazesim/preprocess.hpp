#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazesim/ingest.hpp"
#include "gazesim/series.hpp"

namespace gazesim {

enum class FillMode {
  Zero,    // masked samples set to fill_value
  Linear,  // interior gaps up to max_interp_gap_ms interpolated, rest set to fill_value
};

struct PreprocessConfig {
  double source_rate_hz = 120.0;
  double smooth_window_ms = 80.0;
  double missing_threshold = 0.20;
  double target_fps = 32.0;
  double fill_value = 0.0;
  FillMode fill_mode = FillMode::Zero;
  double max_interp_gap_ms = 500.0;

  void validate() const;
};

/// Samples fixation events at `source_rate_hz` over [0, duration_ms). Frame k
/// (time k / rate) takes the position of the fixation whose [start, end)
/// interval contains it; uncovered frames are unobserved. When two fixations
/// overlap by at most one sample period, the later one wins.
FixationSeries rasterize(const std::vector<RawFixationRecord>& records, double source_rate_hz,
                         std::int64_t duration_ms, std::string viewer_id = {});

/// Odd tap count for a triangular kernel spanning `window_ms` at `frame_rate_fps`.
std::size_t triangular_taps(double window_ms, double frame_rate_fps);

/// Weighted moving average with weights 1,2,..,peak,..,2,1. Unobserved taps
/// are skipped and the remaining weights renormalized; unobserved samples stay
/// unobserved.
FixationSeries triangular_smooth(const FixationSeries& series, double window_ms);

double missing_ratio(const FixationSeries& series);

struct ExclusionEntry {
  std::string viewer_id;
  double missing_ratio = 0.0;
};

struct ExclusionResult {
  CohortDataset cohort;
  std::vector<ExclusionEntry> excluded;
};

/// Drops viewers whose missing ratio is strictly above `threshold`.
ExclusionResult exclude_viewers(const CohortDataset& cohort, double threshold);

/// Replaces unobserved coordinates by `fill_value`; the mask is kept.
FixationSeries fill_missing(const FixationSeries& series, double fill_value);

/// Linearly interpolates interior runs of unobserved samples no longer than
/// `max_gap_ms`, then fills whatever remains with `fill_value`. The mask is kept.
FixationSeries interpolate_gaps(const FixationSeries& series, double max_gap_ms, double fill_value);

/// Nearest-timestamp decimation (ties to the earlier source sample).
FixationSeries downsample(const FixationSeries& series, double target_fps);

struct ViewerInput {
  std::string viewer_id;
  std::vector<RawFixationRecord> records;
};

struct PreprocessResult {
  CohortDataset cohort;
  std::vector<ExclusionEntry> excluded;
};

/// rasterize -> smooth -> exclude -> fill -> downsample for a whole cohort.
/// Viewers are processed in parallel; output is independent of thread count.
PreprocessResult preprocess_cohort(const std::vector<ViewerInput>& viewers, std::int64_t duration_ms,
                                   const PreprocessConfig& config);

}  // namespace gazesim
