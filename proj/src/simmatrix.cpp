#include "gazesim/simmatrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

#include "gazesim/csv.hpp"
#include "gazesim/error.hpp"
#include "parallel.hpp"
#include "gazesim/keyvalue.hpp"

namespace gazesim {

namespace {

std::vector<std::pair<std::size_t, std::size_t>> upper_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

}  // namespace

void check_window_series(std::span<const PointSeries> series) {
  if (series.size() < 2) {
    throw Error(Errc::TooFewViewers, "need at least 2 viewers, got " + std::to_string(series.size()));
  }
  for (const auto& s : series) {
    if (s.size() != series.front().size()) {
      throw Error(Errc::LengthMismatch, "all trajectories in a window must have the same length");
    }
    if (s.empty()) throw Error(Errc::EmptySeries, "window holds no frames");
    for (const auto& p : s) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw Error(Errc::InvalidArgument, "trajectory has a non-finite coordinate (fill missing samples first)");
      }
    }
  }
}

double SquareMatrix::max() const noexcept {
  if (cells_.empty()) return 0.0;
  return *std::max_element(cells_.begin(), cells_.end());
}

bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.n_ != b.n_) return false;
  for (std::size_t k = 0; k < a.cells_.size(); ++k) {
    if (std::bit_cast<std::uint64_t>(a.cells_[k]) != std::bit_cast<std::uint64_t>(b.cells_[k])) return false;
  }
  return true;
}

void WindowSpec::validate() const {
  if (!(length_s > 0.0) || !std::isfinite(length_s)) throw Error(Errc::InvalidArgument, "window length must be > 0");
  if (!(start_s >= 0.0) || !std::isfinite(start_s)) throw Error(Errc::InvalidArgument, "window start must be >= 0");
}

std::string_view normalization_name(Normalization mode) noexcept {
  return mode == Normalization::Global ? "global" : "per_window";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "per_window") return Normalization::PerWindow;
  if (text == "global") return Normalization::Global;
  throw Error(Errc::InvalidArgument, "normalization must be 'per_window' or 'global', got '" + std::string(text) + "'");
}

SquareMatrix pairwise_matrix(std::span<const PointSeries> series, const PairKernel& kernel) {
  const std::size_t n = series.size();
  SquareMatrix grid(n);
  if (n < 2) return grid;
  const auto pairs = upper_pairs(n);
  const auto count = static_cast<std::ptrdiff_t>(pairs.size());
  detail::parallel_for(count, [&](std::ptrdiff_t k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    const double d = kernel(series[i], series[j]);
    grid(i, j) = d;
    grid(j, i) = d;
  });
  return grid;
}

SquareMatrix pairwise_matrix_serial(std::span<const PointSeries> series, const PairKernel& kernel) {
  const std::size_t n = series.size();
  SquareMatrix grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = kernel(series[i], series[j]);
      grid(i, j) = d;
      grid(j, i) = d;
    }
  }
  return grid;
}

SquareMatrix pairwise_distance_matrix(std::span<const PointSeries> series, const TwedParams& params) {
  check_window_series(series);
  params.validate();
  return pairwise_matrix(series, [&](const PointSeries& a, const PointSeries& b) { return twed(a, b, params); });
}

SquareMatrix pairwise_distance_matrix_serial(std::span<const PointSeries> series, const TwedParams& params) {
  check_window_series(series);
  params.validate();
  return pairwise_matrix_serial(series,
                                [&](const PointSeries& a, const PointSeries& b) { return twed(a, b, params); });
}

SquareMatrix normalize_to_similarity(const SquareMatrix& distances) {
  return normalize_to_similarity(distances, distances.max());
}

SquareMatrix normalize_to_similarity(const SquareMatrix& distances, double scale) {
  const std::size_t n = distances.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0) throw Error(Errc::InvalidArgument, "distance diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double d = distances(i, j);
      if (std::isnan(d) || d < 0.0) {
        throw Error(Errc::NegativeDistance,
                    "distance (" + std::to_string(i) + ", " + std::to_string(j) + ") is negative or NaN");
      }
      if (d != distances(j, i)) throw Error(Errc::InvalidArgument, "distance grid is not symmetric");
    }
  }
  if (!(scale >= distances.max())) throw Error(Errc::InvalidArgument, "normalization scale below the largest distance");

  SquareMatrix sim(n, 1.0);
  if (scale == 0.0) return sim;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sim(i, j) = i == j ? 1.0 : 1.0 - distances(i, j) / scale;
    }
  }
  return sim;
}

std::vector<PointSeries> window_points(const CohortDataset& cohort, const WindowSpec& window) {
  window.validate();
  const std::size_t frames = cohort.frame_count();
  const double fps = cohort.frame_rate_fps;
  const auto first = std::llround(window.start_s * fps);
  const auto count = std::llround(window.length_s * fps);
  if (count <= 0) throw Error(Errc::InvalidArgument, "window shorter than one frame");
  if (static_cast<std::size_t>(first + count) > frames) {
    throw Error(Errc::OutOfRange, "window [" + csv::format_double(window.start_s) + " s, +" +
                                      csv::format_double(window.length_s) + " s) exceeds the " +
                                      csv::format_double(static_cast<double>(frames) / fps) + " s of data");
  }
  std::vector<PointSeries> out;
  out.reserve(cohort.viewers.size());
  for (const auto& [id, series] : cohort.viewers) {
    const PointSeries all = series.points();
    out.emplace_back(all.begin() + first, all.begin() + first + count);
  }
  return out;
}

std::vector<SimilarityMatrix> compute_window_matrices(const CohortDataset& cohort, std::span<const WindowSpec> windows,
                                                      const TwedParams& params, Normalization mode) {
  std::vector<SquareMatrix> distances;
  distances.reserve(windows.size());
  for (const auto& w : windows) distances.push_back(pairwise_distance_matrix(window_points(cohort, w), params));

  double global_scale = 0.0;
  for (const auto& d : distances) global_scale = std::max(global_scale, d.max());

  std::vector<SimilarityMatrix> out;
  out.reserve(windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k) {
    SimilarityMatrix sim;
    sim.viewer_ids = cohort.viewer_ids();
    sim.window = windows[k];
    sim.params = params;
    sim.normalization = mode;
    sim.distance_scale = mode == Normalization::Global ? global_scale : distances[k].max();
    sim.values = normalize_to_similarity(distances[k], sim.distance_scale);
    out.push_back(std::move(sim));
  }
  return out;
}

std::vector<WindowSpec> tile_windows(const CohortDataset& cohort, double length_s) {
  if (!(length_s > 0.0)) throw Error(Errc::InvalidArgument, "window length must be > 0");
  const auto per_window = std::llround(length_s * cohort.frame_rate_fps);
  if (per_window <= 0) throw Error(Errc::InvalidArgument, "window shorter than one frame");
  const std::size_t count = cohort.frame_count() / static_cast<std::size_t>(per_window);
  std::vector<WindowSpec> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back({static_cast<double>(k) * length_s, length_s});
  return out;
}

std::string similarity_to_csv(const SimilarityMatrix& sim) {
  std::string out = "viewer_id";
  for (const auto& id : sim.viewer_ids) out += "," + csv::escape(id);
  out += '\n';
  for (std::size_t i = 0; i < sim.viewer_ids.size(); ++i) {
    out += csv::escape(sim.viewer_ids[i]);
    for (std::size_t j = 0; j < sim.viewer_ids.size(); ++j) out += "," + csv::format_double(sim.values(i, j));
    out += '\n';
  }
  return out;
}

std::string similarity_metadata(const SimilarityMatrix& sim, const MatrixFileMeta& meta) {
  KeyValueFile kv;
  kv.set("video_id", meta.video_id);
  kv.set("frame_rate_fps", csv::format_double(meta.frame_rate_fps));
  kv.set("window_start_s", csv::format_double(sim.window.start_s));
  kv.set("window_length_s", csv::format_double(sim.window.length_s));
  kv.set("lambda", csv::format_double(sim.params.lambda));
  kv.set("gamma", csv::format_double(sim.params.gamma));
  kv.set("normalization", std::string(normalization_name(sim.normalization)));
  kv.set("distance_scale", csv::format_double(sim.distance_scale));
  kv.set("viewers", std::to_string(sim.viewer_ids.size()));
  const char* note = sim.normalization == Normalization::PerWindow
                         ? "similarity = 1 - distance / distance_scale, where distance_scale is this window's\n"
                           "largest pairwise TWED distance. Values are NOT comparable across windows."
                         : "similarity = 1 - distance / distance_scale, where distance_scale is the largest\n"
                           "pairwise TWED distance over all windows of the run.";
  return kv.serialize(note);
}

SimilarityMatrix similarity_from_files(std::string_view csv_text, std::string_view meta_text, MatrixFileMeta* meta_out) {
  const auto kv = KeyValueFile::parse(meta_text);
  auto require_double = [&](const std::string& key) {
    const auto v = kv.get_double(key);
    if (!v) throw Error(Errc::InvalidArgument, "matrix metadata lacks '" + key + "'");
    return *v;
  };

  SimilarityMatrix sim;
  sim.window = {require_double("window_start_s"), require_double("window_length_s")};
  sim.params = {require_double("lambda"), require_double("gamma")};
  sim.normalization = parse_normalization(kv.get("normalization").value_or("per_window"));
  sim.distance_scale = require_double("distance_scale");
  if (meta_out) {
    meta_out->video_id = kv.get("video_id").value_or("");
    meta_out->frame_rate_fps = kv.get_double("frame_rate_fps").value_or(0.0);
  }

  std::vector<csv::Row> rows;
  for (const auto line : csv::lines(csv_text)) {
    if (!csv::is_blank(line)) rows.push_back(csv::split_line(line, ','));
  }
  if (rows.empty()) throw Error(Errc::EmptyInput, "matrix CSV is empty");
  const std::size_t n = rows.front().size() - 1;
  sim.viewer_ids.assign(rows.front().begin() + 1, rows.front().end());
  if (rows.size() != n + 1) throw Error(Errc::MalformedRow, "matrix CSV must have one row per viewer");
  sim.values = SquareMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != n + 1 || row.front() != sim.viewer_ids[i]) {
      throw Error(Errc::MalformedRow, "matrix CSV row " + std::to_string(i + 2) + " does not match the header");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = csv::parse_double(row[j + 1]);
      if (!v) throw Error(Errc::MalformedRow, "matrix CSV row " + std::to_string(i + 2) + ": non-numeric cell");
      sim.values(i, j) = *v;
    }
  }
  return sim;
}

std::string matrix_basename(const WindowSpec& window, const TwedParams& params) {
  return "sim_l" + csv::format_double(params.lambda) + "_g" + csv::format_double(params.gamma) + "_s" +
         csv::format_double(window.start_s) + "_len" + csv::format_double(window.length_s);
}

}  // namespace gazesim
