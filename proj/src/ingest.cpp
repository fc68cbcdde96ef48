#include "gazesim/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "gazesim/csv.hpp"
#include "gazesim/error.hpp"

namespace gazesim {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string line_ref(std::size_t line_no) { return "line " + std::to_string(line_no); }

}  // namespace

std::optional<std::size_t> EegRecording::channel_index(std::string_view label) const {
  const auto it = std::find(channels.begin(), channels.end(), label);
  if (it == channels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - channels.begin());
}

std::vector<std::string> CohortDataset::viewer_ids() const {
  std::vector<std::string> ids;
  ids.reserve(viewers.size());
  for (const auto& [id, series] : viewers) ids.push_back(id);
  return ids;
}

std::size_t CohortDataset::frame_count() const {
  if (viewers.empty()) return 0;
  const auto& first = viewers.begin()->second;
  for (const auto& [id, series] : viewers) {
    if (series.size() != first.size() || series.frame_rate_fps != first.frame_rate_fps) {
      throw Error(Errc::InvalidArgument, "viewer '" + id + "' does not share the cohort frame count/rate");
    }
  }
  return first.size();
}

ParsedFixations parse_fixation_table(std::string_view text, std::string_view viewer_id) {
  const auto all_lines = csv::lines(text);
  std::size_t header_idx = 0;
  while (header_idx < all_lines.size() && csv::is_blank(all_lines[header_idx])) ++header_idx;
  if (header_idx == all_lines.size()) {
    throw Error(Errc::MissingColumn, std::string(kFixStart) + " (empty table for viewer '" + std::string(viewer_id) + "')");
  }

  const char delim = csv::sniff_delimiter(all_lines[header_idx]);
  const csv::Row header = csv::split_line(all_lines[header_idx], delim);

  constexpr std::array<std::string_view, 5> required{kFixStart, kFixEnd, kFixDuration, kFixX, kFixY};
  std::array<std::size_t, 5> col{};
  for (std::size_t r = 0; r < required.size(); ++r) {
    const auto it = std::find_if(header.begin(), header.end(),
                                 [&](const std::string& h) { return csv::trim(h) == required[r]; });
    if (it == header.end()) throw Error(Errc::MissingColumn, std::string(required[r]));
    col[r] = static_cast<std::size_t>(it - header.begin());
  }

  ParsedFixations out;
  for (std::size_t i = header_idx + 1; i < all_lines.size(); ++i) {
    if (csv::is_blank(all_lines[i])) continue;
    const std::size_t line_no = i + 1;
    const csv::Row row = csv::split_line(all_lines[i], delim);
    if (row.size() != header.size()) {
      throw Error(Errc::MalformedRow, line_ref(line_no) + ": expected " + std::to_string(header.size()) +
                                          " fields, got " + std::to_string(row.size()));
    }
    const auto start = csv::parse_int(row[col[0]]);
    const auto end = csv::parse_int(row[col[1]]);
    if (!start || !end) throw Error(Errc::MalformedRow, line_ref(line_no) + ": non-numeric start/end");
    if (*start >= *end) throw Error(Errc::MalformedRow, line_ref(line_no) + ": start must precede end");

    RawFixationRecord rec;
    rec.start_ms = *start;
    rec.end_ms = *end;
    rec.duration_ms = *end - *start;
    const auto duration = csv::parse_int(row[col[2]]);
    if (!duration || *duration != rec.duration_ms) {
      out.warnings.push_back(std::string(viewer_id) + ": " + line_ref(line_no) + ": duration '" +
                             std::string(csv::trim(row[col[2]])) + "' recomputed as " +
                             std::to_string(rec.duration_ms));
    }
    const auto x = csv::parse_double(row[col[3]]);
    const auto y = csv::parse_double(row[col[4]]);
    if (x && y) {
      rec.x_px = *x;
      rec.y_px = *y;
    } else {
      rec.has_position = false;
    }
    out.records.push_back(rec);
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const RawFixationRecord& a, const RawFixationRecord& b) { return a.start_ms < b.start_ms; });
  return out;
}

std::string write_fixation_table(const std::vector<RawFixationRecord>& records, char delim) {
  std::string out = csv::join({std::string(kFixStart), std::string(kFixEnd), std::string(kFixDuration),
                               std::string(kFixX), std::string(kFixY)},
                              delim);
  out.push_back('\n');
  for (const auto& r : records) {
    out += csv::join({std::to_string(r.start_ms), std::to_string(r.end_ms), std::to_string(r.duration_ms),
                      r.has_position ? csv::format_double(r.x_px) : std::string(),
                      r.has_position ? csv::format_double(r.y_px) : std::string()},
                     delim);
    out.push_back('\n');
  }
  return out;
}

ScreenGeometry parse_display_coords(std::string_view asc_text) {
  constexpr std::string_view kKey = "DISPLAY_COORDS";
  for (const auto line : csv::lines(asc_text)) {
    const auto pos = line.find(kKey);
    if (pos == std::string_view::npos) continue;
    const auto tokens = csv::split_whitespace(line.substr(pos + kKey.size()));
    if (tokens.size() < 4) continue;
    const auto left = csv::parse_int(tokens[0]);
    const auto top = csv::parse_int(tokens[1]);
    const auto right = csv::parse_int(tokens[2]);
    const auto bottom = csv::parse_int(tokens[3]);
    if (!left || !top || !right || !bottom) continue;
    ScreenGeometry g{static_cast<int>(*right - *left + 1), static_cast<int>(*bottom - *top + 1)};
    if (g.width_px <= 0 || g.height_px <= 0) continue;
    return g;
  }
  throw Error(Errc::GeometryNotFound, "no 'DISPLAY_COORDS 0 0 W H' message in ASC text");
}

EegRecording parse_eeg(std::string_view text, double sample_rate_hz, std::int64_t start_offset_ms) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw Error(Errc::InvalidArgument, "EEG sample rate must be positive");
  }
  EegRecording rec;
  rec.sample_rate_hz = sample_rate_hz;
  rec.start_offset_ms = start_offset_ms;

  bool first = true;
  std::size_t width = 0;
  std::size_t line_no = 0;
  for (const auto line : csv::lines(text)) {
    ++line_no;
    if (csv::is_blank(line)) continue;
    csv::Row tokens;
    if (line.find(',') != std::string_view::npos) {
      for (auto& t : csv::split_line(line, ',')) tokens.emplace_back(csv::trim(t));
    } else {
      tokens = csv::split_whitespace(line);
    }
    if (first) {
      first = false;
      width = tokens.size();
      const bool numeric = std::all_of(tokens.begin(), tokens.end(), [](const std::string& t) {
        return csv::parse_double(t).has_value();
      });
      if (!numeric) {
        rec.channels = tokens;
        continue;
      }
    }
    if (tokens.size() != width) {
      throw Error(Errc::RaggedRows, line_ref(line_no) + ": expected " + std::to_string(width) + " values, got " +
                                        std::to_string(tokens.size()));
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = csv::parse_double(tokens[c]);
      if (!v) throw Error(Errc::MalformedRow, line_ref(line_no) + ": non-numeric value '" + tokens[c] + "'");
      row[c] = *v;
    }
    rec.samples.push_back(std::move(row));
  }
  if (rec.samples.empty()) throw Error(Errc::EmptyInput, "EEG text holds no samples");
  if (rec.channels.empty()) {
    const std::size_t digits = std::max<std::size_t>(2, std::to_string(width).size());
    for (std::size_t c = 1; c <= width; ++c) {
      std::string n = std::to_string(c);
      rec.channels.push_back("ch" + std::string(digits - n.size(), '0') + n);
    }
  }
  return rec;
}

AnswerSheet parse_answer_sheet(std::string_view text) {
  const auto all_lines = csv::lines(text);
  std::size_t header_idx = 0;
  while (header_idx < all_lines.size() && csv::is_blank(all_lines[header_idx])) ++header_idx;
  if (header_idx == all_lines.size()) throw Error(Errc::EmptyInput, "answer sheet is empty");

  const char delim = csv::sniff_delimiter(all_lines[header_idx]);
  const csv::Row header = csv::split_line(all_lines[header_idx], delim);
  if (header.size() < 2) throw Error(Errc::MalformedRow, line_ref(header_idx + 1) + ": no question columns");

  AnswerSheet sheet;
  for (std::size_t c = 1; c < header.size(); ++c) sheet.question_ids.emplace_back(csv::trim(header[c]));

  for (std::size_t i = header_idx + 1; i < all_lines.size(); ++i) {
    if (csv::is_blank(all_lines[i])) continue;
    const csv::Row row = csv::split_line(all_lines[i], delim);
    if (row.size() != header.size()) {
      throw Error(Errc::MalformedRow, line_ref(i + 1) + ": expected " + std::to_string(header.size()) + " fields");
    }
    std::vector<bool> answers;
    for (std::size_t c = 1; c < row.size(); ++c) {
      const std::string cell = lower(csv::trim(row[c]));
      if (cell == "1" || cell == "true") {
        answers.push_back(true);
      } else if (cell == "0" || cell == "false") {
        answers.push_back(false);
      } else {
        throw Error(Errc::NonBooleanCell, "row " + std::to_string(i + 1) + ", column " + std::to_string(c + 1) +
                                              ": '" + std::string(csv::trim(row[c])) + "'");
      }
    }
    sheet.viewer_ids.emplace_back(csv::trim(row[0]));
    sheet.correctness.push_back(std::move(answers));
  }
  return sheet;
}

std::vector<FixationSeries> segment_windows(const FixationSeries& series, double window_s, double frame_rate_fps) {
  if (!(window_s > 0.0) || !(frame_rate_fps > 0.0)) {
    throw Error(Errc::InvalidArgument, "window length and frame rate must be positive");
  }
  const auto per_window = std::llround(window_s * frame_rate_fps);
  if (per_window <= 0) throw Error(Errc::InvalidArgument, "window shorter than one frame");
  const auto frames = static_cast<std::size_t>(per_window);

  std::vector<FixationSeries> out;
  for (std::size_t first = 0; first + frames <= series.size(); first += frames) {
    out.push_back(series.slice(first, frames));
  }
  return out;
}

}  // namespace gazesim
