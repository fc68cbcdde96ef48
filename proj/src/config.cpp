#include "gazesim/config.hpp"

#include <set>

#include "gazesim/analysis.hpp"
#include "gazesim/csv.hpp"
#include "gazesim/dataset_io.hpp"
#include "gazesim/error.hpp"
#include "gazesim/keyvalue.hpp"

namespace gazesim {

namespace {

const std::set<std::string> kKnownKeys{
    "video_id",       "fixation_dir",      "asc_file",          "eeg_dir",          "answers_file",
    "eeg_rate_hz",    "eeg_offset_ms",     "duration_ms",       "source_rate_hz",   "smooth_window_ms",
    "missing_threshold", "target_fps",     "fill_mode",         "fill_value",       "max_interp_gap_ms",
    "window_s",       "lambda",            "gamma",             "normalization",    "scales",
    "seed",           "min_weight",        "sweep_lambdas",     "sweep_gammas",     "sweep_start_s",
    "sweep_length_s", "trail_pairs",       "questions",         "correlate_start_s", "correlate_length_s",
    "out",            "port",              "ui_dir",            "cache_capacity"};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& tok : csv::split_line(text, ',')) {
    if (csv::is_blank(tok)) continue;
    const auto v = csv::parse_double(tok);
    if (!v) throw Error(Errc::InvalidArgument, "'" + tok + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> parse_name_list(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : csv::split_line(text, ',')) {
    const auto t = csv::trim(tok);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void RunConfig::validate() const {
  preprocess.validate();
  if (!(window_s > 0.0)) throw Error(Errc::InvalidArgument, "window_s must be > 0");
  twed.validate();
  if (scales.empty()) throw Error(Errc::InvalidArgument, "at least one clustering scale is required");
  for (const double p : scales) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error(Errc::InvalidArgument, "scales must be finite and >= 0");
  }
  if (!(min_weight >= 0.0)) throw Error(Errc::InvalidArgument, "min_weight must be >= 0");
  if (!(eeg_rate_hz > 0.0)) throw Error(Errc::InvalidArgument, "eeg_rate_hz must be > 0");
  if (!(sweep_length_s > 0.0) || !(sweep_start_s >= 0.0)) throw Error(Errc::InvalidArgument, "invalid sweep window");
  if (!(correlate_start_s >= 0.0)) throw Error(Errc::InvalidArgument, "invalid correlation window");
  if (correlate_length_s && !(*correlate_length_s > 0.0)) throw Error(Errc::InvalidArgument, "invalid correlation window");
  if (port < 0 || port > 65535) throw Error(Errc::InvalidArgument, "port out of range");
  if (cache_capacity == 0) throw Error(Errc::InvalidArgument, "cache_capacity must be >= 1");
  if (duration_ms && *duration_ms <= 0) throw Error(Errc::InvalidArgument, "duration_ms must be > 0");
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  const auto kv = KeyValueFile::parse(text);
  for (const auto& [key, value] : kv.entries()) {
    if (!kKnownKeys.contains(key)) throw Error(Errc::InvalidArgument, "unknown config key '" + key + "'");
  }

  RunConfig c;
  if (auto v = kv.get("video_id")) c.video_id = *v;
  if (auto v = kv.get("fixation_dir")) c.fixation_dir = resolve(base_dir, *v);
  if (auto v = kv.get("asc_file")) c.asc_file = resolve(base_dir, *v);
  if (auto v = kv.get("eeg_dir")) c.eeg_dir = resolve(base_dir, *v);
  if (auto v = kv.get("answers_file")) c.answers_file = resolve(base_dir, *v);
  if (auto v = kv.get_double("eeg_rate_hz")) c.eeg_rate_hz = *v;
  if (auto v = kv.get_int("eeg_offset_ms")) c.eeg_offset_ms = *v;
  if (auto v = kv.get_int("duration_ms")) c.duration_ms = *v;

  if (auto v = kv.get_double("source_rate_hz")) c.preprocess.source_rate_hz = *v;
  if (auto v = kv.get_double("smooth_window_ms")) c.preprocess.smooth_window_ms = *v;
  if (auto v = kv.get_double("missing_threshold")) c.preprocess.missing_threshold = *v;
  if (auto v = kv.get_double("target_fps")) c.preprocess.target_fps = *v;
  if (auto v = kv.get_double("fill_value")) c.preprocess.fill_value = *v;
  if (auto v = kv.get_double("max_interp_gap_ms")) c.preprocess.max_interp_gap_ms = *v;
  if (auto v = kv.get("fill_mode")) {
    if (*v == "zero") {
      c.preprocess.fill_mode = FillMode::Zero;
    } else if (*v == "linear") {
      c.preprocess.fill_mode = FillMode::Linear;
    } else {
      throw Error(Errc::InvalidArgument, "fill_mode must be 'zero' or 'linear'");
    }
  }

  if (auto v = kv.get_double("window_s")) c.window_s = *v;
  if (auto v = kv.get_double("lambda")) c.twed.lambda = *v;
  if (auto v = kv.get_double("gamma")) c.twed.gamma = *v;
  if (auto v = kv.get("normalization")) c.normalization = parse_normalization(*v);

  if (auto v = kv.get("scales")) c.scales = parse_number_list(*v);
  if (auto v = kv.get_int("seed")) {
    if (*v < 0) throw Error(Errc::InvalidArgument, "seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = kv.get_double("min_weight")) c.min_weight = *v;

  if (auto v = kv.get("sweep_lambdas")) c.sweep_lambdas = parse_number_list(*v);
  if (auto v = kv.get("sweep_gammas")) c.sweep_gammas = parse_number_list(*v);
  if (auto v = kv.get_double("sweep_start_s")) c.sweep_start_s = *v;
  if (auto v = kv.get_double("sweep_length_s")) c.sweep_length_s = *v;
  if (auto v = kv.get("trail_pairs")) {
    for (const auto& item : parse_name_list(*v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw Error(Errc::InvalidArgument, "trail pair '" + item + "' must be a:b");
      c.trail_pairs.emplace_back(item.substr(0, colon), item.substr(colon + 1));
    }
  }

  if (auto v = kv.get("questions")) c.questions = parse_name_list(*v);
  if (auto v = kv.get_double("correlate_start_s")) c.correlate_start_s = *v;
  if (auto v = kv.get_double("correlate_length_s")) c.correlate_length_s = *v;

  c.out_dir = resolve(base_dir, kv.get("out").value_or("out"));
  if (auto v = kv.get_int("port")) c.port = static_cast<int>(*v);
  if (auto v = kv.get("ui_dir")) c.ui_dir = resolve(base_dir, *v);
  if (auto v = kv.get_int("cache_capacity")) {
    if (*v < 1) throw Error(Errc::InvalidArgument, "cache_capacity must be >= 1");
    c.cache_capacity = static_cast<std::size_t>(*v);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig c = parse_run_config(read_text_file(path), path.parent_path());
  const std::pair<const char*, const std::filesystem::path*> inputs[] = {
      {"fixation_dir", &c.fixation_dir}, {"asc_file", &c.asc_file}, {"eeg_dir", &c.eeg_dir},
      {"answers_file", &c.answers_file}, {"ui_dir", &c.ui_dir}};
  for (const auto& [key, p] : inputs) {
    if (!p->empty() && !std::filesystem::exists(*p)) {
      throw Error(Errc::Io, std::string(key) + " " + p->string() + " does not exist");
    }
  }
  return c;
}

}  // namespace gazesim
