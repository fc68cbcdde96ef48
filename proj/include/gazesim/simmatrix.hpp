#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gazesim/elastic.hpp"
#include "gazesim/ingest.hpp"
#include "gazesim/series.hpp"

namespace gazesim {

/// Dense row-major N x N grid.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), cells_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
  std::span<const double> cells() const noexcept { return cells_; }

  /// Largest entry (0 for an empty matrix).
  double max() const noexcept;

  /// Bitwise equality of every cell.
  friend bool operator==(const SquareMatrix& a, const SquareMatrix& b);

 private:
  std::size_t n_ = 0;
  std::vector<double> cells_;
};

struct WindowSpec {
  double start_s = 0.0;
  double length_s = 0.0;

  void validate() const;
  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

enum class Normalization {
  PerWindow,  // each window divided by its own maximum distance
  Global,     // every window divided by the maximum over all windows
};

std::string_view normalization_name(Normalization mode) noexcept;
Normalization parse_normalization(std::string_view text);

struct SimilarityMatrix {
  std::vector<std::string> viewer_ids;
  SquareMatrix values;
  WindowSpec window;
  TwedParams params;
  Normalization normalization = Normalization::PerWindow;
  /// The distance that maps to similarity 0 (the divisor used).
  double distance_scale = 0.0;
};

using PairKernel = std::function<double(const PointSeries&, const PointSeries&)>;

/// Upper-triangle pairwise evaluation, mirrored, zero diagonal. Pairs are
/// distributed over OpenMP threads; each cell is written by exactly one
/// kernel call, so the result does not depend on the thread count.
SquareMatrix pairwise_matrix(std::span<const PointSeries> series, const PairKernel& kernel);

/// Single-threaded reference for pairwise_matrix.
SquareMatrix pairwise_matrix_serial(std::span<const PointSeries> series, const PairKernel& kernel);

/// Throws unless there are >= 2 non-empty, equal-length, finite trajectories.
void check_window_series(std::span<const PointSeries> series);

/// TWED between every pair of equal-length trajectories (>= 2 required).
SquareMatrix pairwise_distance_matrix(std::span<const PointSeries> series, const TwedParams& params);
SquareMatrix pairwise_distance_matrix_serial(std::span<const PointSeries> series, const TwedParams& params);

/// s = 1 - d / max(d); all ones when max(d) = 0.
SquareMatrix normalize_to_similarity(const SquareMatrix& distances);

/// s = 1 - d / scale, with an externally chosen scale (>= max(d)).
SquareMatrix normalize_to_similarity(const SquareMatrix& distances, double scale);

/// Frames of `window` for every viewer, in viewer-id order. Throws OutOfRange
/// if the window does not fit inside the cohort's series.
std::vector<PointSeries> window_points(const CohortDataset& cohort, const WindowSpec& window);

/// One similarity matrix per window over the (already preprocessed) cohort.
std::vector<SimilarityMatrix> compute_window_matrices(const CohortDataset& cohort, std::span<const WindowSpec> windows,
                                                      const TwedParams& params,
                                                      Normalization mode = Normalization::PerWindow);

/// Consecutive windows of `length_s` covering the cohort (trailing partial dropped).
std::vector<WindowSpec> tile_windows(const CohortDataset& cohort, double length_s);

// --- matrix files -----------------------------------------------------------

struct MatrixFileMeta {
  std::string video_id;
  double frame_rate_fps = 0.0;
};

/// CSV with a viewer-id header row and first column; shortest round-trip
/// number formatting, so reading gives back bit-identical values.
std::string similarity_to_csv(const SimilarityMatrix& sim);

/// Sidecar key=value record: window, lambda, gamma, video id, frame rate,
/// normalization mode and scale.
std::string similarity_metadata(const SimilarityMatrix& sim, const MatrixFileMeta& meta);

/// Rebuilds a matrix from the CSV and its sidecar.
SimilarityMatrix similarity_from_files(std::string_view csv_text, std::string_view meta_text,
                                       MatrixFileMeta* meta_out = nullptr);

/// Base file name for a window/parameter combination, e.g. "sim_l5000_g5000_s33_len5".
std::string matrix_basename(const WindowSpec& window, const TwedParams& params);

}  // namespace gazesim
