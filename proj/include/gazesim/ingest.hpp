#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gazesim/series.hpp"

namespace gazesim {

/// One row of a fixation export (CURRENT_FIX_* columns). Times in ms, position
/// in screen pixels from the top-left corner. Rows whose X or Y cell is empty
/// or non-numeric keep `has_position == false`.
struct RawFixationRecord {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::int64_t duration_ms = 0;
  double x_px = 0.0;
  double y_px = 0.0;
  bool has_position = true;

  friend bool operator==(const RawFixationRecord&, const RawFixationRecord&) = default;
};

struct ScreenGeometry {
  int width_px = 0;
  int height_px = 0;

  friend bool operator==(const ScreenGeometry&, const ScreenGeometry&) = default;
};

struct EegRecording {
  double sample_rate_hz = 0.0;
  std::vector<std::string> channels;
  /// Time-major: samples[i][c] is channel c at sample i.
  std::vector<std::vector<double>> samples;
  std::int64_t start_offset_ms = 0;

  std::size_t sample_count() const noexcept { return samples.size(); }
  /// Video time of sample i in ms.
  double time_ms(std::size_t i) const { return start_offset_ms + 1000.0 * static_cast<double>(i) / sample_rate_hz; }
  std::optional<std::size_t> channel_index(std::string_view label) const;
};

struct AnswerSheet {
  std::vector<std::string> viewer_ids;
  std::vector<std::string> question_ids;
  /// correctness[viewer][question]
  std::vector<std::vector<bool>> correctness;
};

struct CohortDataset {
  std::string video_id;
  double frame_rate_fps = 0.0;
  ScreenGeometry screen;
  std::map<std::string, FixationSeries> viewers;
  std::map<std::string, EegRecording> eeg;
  std::optional<AnswerSheet> answers;

  std::vector<std::string> viewer_ids() const;
  /// Shared frame count (0 when empty). Throws InvalidArgument if viewers disagree
  /// on frame count or frame rate.
  std::size_t frame_count() const;
};

struct ParsedFixations {
  std::vector<RawFixationRecord> records;
  std::vector<std::string> warnings;
};

inline constexpr std::string_view kFixStart = "CURRENT_FIX_START";
inline constexpr std::string_view kFixEnd = "CURRENT_FIX_END";
inline constexpr std::string_view kFixDuration = "CURRENT_FIX_DURATION";
inline constexpr std::string_view kFixX = "CURRENT_FIX_X";
inline constexpr std::string_view kFixY = "CURRENT_FIX_Y";

/// Parses a CSV/TSV fixation export. The header must name the five
/// CURRENT_FIX_* columns; other columns are ignored. Records come back sorted
/// by start time (stable). A duration that disagrees with end - start is
/// recomputed and reported in `warnings`.
ParsedFixations parse_fixation_table(std::string_view text, std::string_view viewer_id);

/// Inverse of parse_fixation_table for the five columns it reads.
std::string write_fixation_table(const std::vector<RawFixationRecord>& records, char delim = ',');

/// Finds the first "DISPLAY_COORDS 0 0 W H" message. W and H are inclusive
/// maxima, so the result is (W+1) x (H+1).
ScreenGeometry parse_display_coords(std::string_view asc_text);

/// Whitespace- or comma-delimited numeric matrix, optional header of channel
/// labels (otherwise ch01..chNN).
EegRecording parse_eeg(std::string_view text, double sample_rate_hz, std::int64_t start_offset_ms = 0);

/// Header row of question ids (first cell is a label and ignored), then one row
/// per viewer: id followed by 0/1/true/false cells.
AnswerSheet parse_answer_sheet(std::string_view text);

/// Consecutive non-overlapping windows of round(window_s * fps) frames; a
/// trailing partial window is dropped.
std::vector<FixationSeries> segment_windows(const FixationSeries& series, double window_s, double frame_rate_fps);

}  // namespace gazesim
