#include "gazesim/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gazesim/csv.hpp"
#include "gazesim/error.hpp"
#include "gazesim/keyvalue.hpp"

namespace fs = std::filesystem;

namespace gazesim {

namespace {

std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<std::string_view> extensions) {
  if (!fs::is_directory(dir)) throw Error(Errc::Io, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string eeg_csv(const EegRecording& rec) {
  std::string out = csv::join(rec.channels) + "\n";
  for (const auto& row : rec.samples) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv::format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string answers_csv(const AnswerSheet& sheet) {
  csv::Row header{"viewer_id"};
  header.insert(header.end(), sheet.question_ids.begin(), sheet.question_ids.end());
  std::string out = csv::join(header) + "\n";
  for (std::size_t i = 0; i < sheet.viewer_ids.size(); ++i) {
    csv::Row row{sheet.viewer_ids[i]};
    for (const bool b : sheet.correctness[i]) row.push_back(b ? "1" : "0");
    out += csv::join(row) + "\n";
  }
  return out;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

std::string viewer_id_from_filename(const fs::path& path) {
  const std::string stem = path.stem().string();
  const auto underscore = stem.find('_');
  return underscore == std::string::npos || underscore == 0 ? stem : stem.substr(0, underscore);
}

RawInputs load_raw_inputs(const RunConfig& config) {
  RawInputs in;
  if (config.fixation_dir.empty()) throw Error(Errc::InvalidArgument, "fixation_dir is not configured");
  if (config.asc_file.empty()) throw Error(Errc::InvalidArgument, "asc_file is not configured");

  std::int64_t latest_end = 0;
  for (const auto& file : list_files(config.fixation_dir, {".csv", ".tsv", ".txt"})) {
    const std::string id = viewer_id_from_filename(file);
    auto parsed = parse_fixation_table(read_text_file(file), id);
    for (const auto& r : parsed.records) latest_end = std::max(latest_end, r.end_ms);
    in.warnings.insert(in.warnings.end(), parsed.warnings.begin(), parsed.warnings.end());
    if (std::any_of(in.viewers.begin(), in.viewers.end(), [&](const ViewerInput& v) { return v.viewer_id == id; })) {
      throw Error(Errc::InvalidArgument, "two fixation files map to viewer '" + id + "'");
    }
    in.viewers.push_back({id, std::move(parsed.records)});
  }
  if (in.viewers.empty()) throw Error(Errc::EmptyInput, "no fixation files in " + config.fixation_dir.string());
  in.duration_ms = config.duration_ms.value_or(latest_end);
  in.screen = parse_display_coords(read_text_file(config.asc_file));

  if (!config.eeg_dir.empty()) {
    for (const auto& file : list_files(config.eeg_dir, {".txt", ".csv", ".tsv"})) {
      in.eeg.emplace(viewer_id_from_filename(file),
                     parse_eeg(read_text_file(file), config.eeg_rate_hz, config.eeg_offset_ms));
    }
  }
  if (!config.answers_file.empty()) in.answers = parse_answer_sheet(read_text_file(config.answers_file));
  return in;
}

WindowFiles window_value_files(const CohortDataset& cohort, const WindowSpec& window) {
  const auto points = window_points(cohort, window);
  const auto ids = cohort.viewer_ids();
  WindowFiles f;
  csv::Row consolidated_header{"frame"};
  for (const auto& id : ids) {
    consolidated_header.push_back(id + "_x");
    consolidated_header.push_back(id + "_y");
  }
  f.x_csv = csv::join(ids) + "\n";
  f.y_csv = f.x_csv;
  f.consolidated_csv = csv::join(consolidated_header) + "\n";
  const std::size_t frames = points.empty() ? 0 : points.front().size();
  const auto first = std::llround(window.start_s * cohort.frame_rate_fps);
  for (std::size_t k = 0; k < frames; ++k) {
    std::string xs, ys, both = std::to_string(first + static_cast<long long>(k));
    for (std::size_t v = 0; v < points.size(); ++v) {
      const std::string x = csv::format_double(points[v][k].x);
      const std::string y = csv::format_double(points[v][k].y);
      xs += (v ? "," : "") + x;
      ys += (v ? "," : "") + y;
      both += "," + x + "," + y;
    }
    f.x_csv += xs + "\n";
    f.y_csv += ys + "\n";
    f.consolidated_csv += both + "\n";
  }
  return f;
}

std::string series_csv(const FixationSeries& series) {
  std::string out = "frame,t_ms,x,y,observed\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    out += std::to_string(k) + "," + std::to_string(series.time_ms(k)) + "," + csv::format_double(series.xs[k]) + "," +
           csv::format_double(series.ys[k]) + "," + (series.mask[k] ? "1" : "0") + "\n";
  }
  return out;
}

std::string exclusion_csv(const std::vector<ExclusionEntry>& excluded) {
  std::string out = "viewer_id,missing_ratio\n";
  for (const auto& e : excluded) out += csv::escape(e.viewer_id) + "," + csv::format_double(e.missing_ratio) + "\n";
  return out;
}

void write_preprocessed(const fs::path& dir, const CohortDataset& cohort, const std::vector<ExclusionEntry>& excluded) {
  // Stale files from an earlier run.
  for (const char* sub : {"series", "eeg", "windows"}) fs::remove_all(dir / sub);
  fs::remove(dir / "answers.csv");

  KeyValueFile meta;
  meta.set("video_id", cohort.video_id);
  meta.set("frame_rate_fps", csv::format_double(cohort.frame_rate_fps));
  meta.set("frame_count", std::to_string(cohort.frame_count()));
  meta.set("start_ms", std::to_string(cohort.viewers.empty() ? 0 : cohort.viewers.begin()->second.start_ms));
  meta.set("screen_width_px", std::to_string(cohort.screen.width_px));
  meta.set("screen_height_px", std::to_string(cohort.screen.height_px));
  meta.set("viewers", csv::join(cohort.viewer_ids()));
  write_text_file(dir / "dataset.meta", meta.serialize("preprocessed gaze dataset"));

  for (const auto& [id, series] : cohort.viewers) write_text_file(dir / "series" / (id + ".csv"), series_csv(series));
  for (const auto& [id, rec] : cohort.eeg) {
    KeyValueFile m;
    m.set("sample_rate_hz", csv::format_double(rec.sample_rate_hz));
    m.set("start_offset_ms", std::to_string(rec.start_offset_ms));
    write_text_file(dir / "eeg" / (id + ".meta"), m.serialize());
    write_text_file(dir / "eeg" / (id + ".csv"), eeg_csv(rec));
  }
  if (cohort.answers) write_text_file(dir / "answers.csv", answers_csv(*cohort.answers));
  write_text_file(dir / "exclusion.csv", exclusion_csv(excluded));
}

CohortDataset load_preprocessed(const fs::path& dir) {
  const auto meta = KeyValueFile::parse(read_text_file(dir / "dataset.meta"));
  CohortDataset cohort;
  cohort.video_id = meta.get("video_id").value_or("");
  cohort.frame_rate_fps = meta.get_double("frame_rate_fps").value_or(0.0);
  cohort.screen = {static_cast<int>(meta.get_int("screen_width_px").value_or(0)),
                   static_cast<int>(meta.get_int("screen_height_px").value_or(0))};
  const auto start_ms = meta.get_int("start_ms").value_or(0);
  if (!(cohort.frame_rate_fps > 0.0)) throw Error(Errc::InvalidArgument, "dataset.meta lacks a frame rate");

  for (const auto& id : parse_name_list(meta.get("viewers").value_or(""))) {
    const auto path = dir / "series" / (id + ".csv");
    const auto text = read_text_file(path);
    FixationSeries s;
    s.viewer_id = id;
    s.frame_rate_fps = cohort.frame_rate_fps;
    s.start_ms = start_ms;
    bool header = true;
    for (const auto line : csv::lines(text)) {
      if (csv::is_blank(line)) continue;
      if (header) {
        header = false;
        continue;
      }
      const auto row = csv::split_line(line, ',');
      const auto x = row.size() == 5 ? csv::parse_double(row[2]) : std::nullopt;
      const auto y = row.size() == 5 ? csv::parse_double(row[3]) : std::nullopt;
      if (!x || !y) throw Error(Errc::MalformedRow, path.string() + ": bad sample row");
      s.xs.push_back(*x);
      s.ys.push_back(*y);
      s.mask.push_back(csv::trim(row[4]) == "1");
    }
    s.validate();
    cohort.viewers.emplace(id, std::move(s));
  }
  cohort.frame_count();

  if (fs::is_directory(dir / "eeg")) {
    for (const auto& file : list_files(dir / "eeg", {".csv"})) {
      const auto id = file.stem().string();
      const auto m = KeyValueFile::parse(read_text_file(fs::path(file).replace_extension(".meta")));
      cohort.eeg.emplace(id, parse_eeg(read_text_file(file), m.get_double("sample_rate_hz").value_or(0.0),
                                       m.get_int("start_offset_ms").value_or(0)));
    }
  }
  if (fs::exists(dir / "answers.csv")) cohort.answers = parse_answer_sheet(read_text_file(dir / "answers.csv"));
  return cohort;
}

}  // namespace gazesim
