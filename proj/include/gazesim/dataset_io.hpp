#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gazesim/config.hpp"
#include "gazesim/ingest.hpp"
#include "gazesim/preprocess.hpp"

namespace gazesim {

/// Whole-file read/write; failures raise Errc::Io. Writing creates parent
/// directories.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Viewer id of a fixation/EEG file: the stem up to the first '_'
/// ("an1_carol.csv" -> "an1").
std::string viewer_id_from_filename(const std::filesystem::path& path);

struct RawInputs {
  std::vector<ViewerInput> viewers;
  std::vector<std::string> warnings;
  ScreenGeometry screen;
  std::map<std::string, EegRecording> eeg;
  std::optional<AnswerSheet> answers;
  std::int64_t duration_ms = 0;
};

/// Reads the fixation directory (*.csv, *.tsv, *.txt in name order), the ASC
/// display geometry and the optional EEG directory and answer sheet.
RawInputs load_raw_inputs(const RunConfig& config);

/// Per-window value files: one file per axis (rows = frames, columns =
/// viewers) and a consolidated table with viewerID_x / viewerID_y columns.
struct WindowFiles {
  std::string x_csv;
  std::string y_csv;
  std::string consolidated_csv;
};
WindowFiles window_value_files(const CohortDataset& cohort, const WindowSpec& window);

/// Serialized preprocessed dataset:
///   dataset.meta          video id, fps, frame count, screen, viewers
///   series/<id>.csv       frame,t_ms,x,y,observed
///   eeg/<id>.csv + .meta  channel matrix and its rate/offset
///   answers.csv           copied answer sheet
///   exclusion.csv         viewer_id,missing_ratio of excluded viewers
void write_preprocessed(const std::filesystem::path& dir, const CohortDataset& cohort,
                        const std::vector<ExclusionEntry>& excluded);
CohortDataset load_preprocessed(const std::filesystem::path& dir);

std::string series_csv(const FixationSeries& series);
std::string exclusion_csv(const std::vector<ExclusionEntry>& excluded);

}  // namespace gazesim
