#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gazesim/elastic.hpp"
#include "gazesim/preprocess.hpp"
#include "gazesim/simmatrix.hpp"

namespace gazesim {

/// Everything a CLI run needs. Loaded from a `key = value` file; relative
/// paths are resolved against the directory of that file.
struct RunConfig {
  std::string video_id = "video";

  // inputs
  std::filesystem::path fixation_dir;
  std::filesystem::path asc_file;
  std::filesystem::path eeg_dir;
  std::filesystem::path answers_file;
  double eeg_rate_hz = 500.0;
  std::int64_t eeg_offset_ms = 0;
  std::optional<std::int64_t> duration_ms;  // default: latest fixation end

  PreprocessConfig preprocess;

  // similarity
  double window_s = 30.0;
  TwedParams twed{5000.0, 5000.0};
  Normalization normalization = Normalization::PerWindow;

  // clustering
  std::vector<double> scales{1.0};
  std::uint64_t seed = 0;
  double min_weight = 0.0;

  // sweep
  std::vector<double> sweep_lambdas;
  std::vector<double> sweep_gammas;
  double sweep_start_s = 0.0;
  double sweep_length_s = 5.0;
  std::vector<std::pair<std::string, std::string>> trail_pairs;

  // correlation
  std::vector<std::string> questions;
  double correlate_start_s = 0.0;
  std::optional<double> correlate_length_s;  // default: window_s

  // output / service
  std::filesystem::path out_dir = "out";  // relative to the config file when loaded from one
  int port = 8080;
  std::filesystem::path ui_dir;
  std::size_t cache_capacity = 64;

  /// Where `preprocess` writes and the other commands read.
  std::filesystem::path dataset_dir() const { return out_dir / "preprocessed"; }

  /// Checks numeric fields against the module preconditions.
  void validate() const;
};

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

std::vector<double> parse_number_list(std::string_view text);
std::vector<std::string> parse_name_list(std::string_view text);

}  // namespace gazesim
