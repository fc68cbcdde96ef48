#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gazesim/ingest.hpp"
#include "gazesim/simmatrix.hpp"

namespace gazesim {

/// Lambda/gamma values visited by the default sweep.
inline const std::vector<double> kDefaultSweepValues{0.0, 1000.0, 5000.0, 10000.0, 20000.0};

struct SweepGrid {
  std::vector<double> lambda_values;
  std::vector<double> gamma_values;
  /// Keyed by (lambda, gamma).
  std::map<std::pair<double, double>, SimilarityMatrix> results;

  const SimilarityMatrix& at(double lambda, double gamma) const;
};

/// One similarity matrix per (lambda, gamma) cell over the same window. Cells
/// are evaluated in parallel; each equals a standalone computation bit for bit.
SweepGrid parameter_sweep(const CohortDataset& cohort, const WindowSpec& window, std::span<const double> lambda_values,
                          std::span<const double> gamma_values);

struct PenaltyMatrix {
  std::vector<std::string> viewer_ids;
  std::vector<std::vector<int>> counts;
};

/// counts[i][j] = number of selected questions both viewers answered correctly.
PenaltyMatrix answer_penalty_matrix(const AnswerSheet& sheet, std::span<const std::string> question_ids);

struct PairSample {
  std::string viewer_i;
  std::string viewer_j;
  int penalty = 0;
  double similarity = 0.0;
};

struct Correlation {
  std::vector<PairSample> samples;
  /// Absent when either coordinate has zero variance.
  std::optional<double> pearson_r;
};

/// One (penalty, similarity) sample per unordered viewer pair, plus Pearson r.
/// Both inputs must list the same viewers in the same order (N >= 3).
Correlation correlate(const PenaltyMatrix& penalty, const SimilarityMatrix& sim);

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

std::string scatter_csv(const Correlation& corr);

/// Restricts a penalty matrix to the given viewers, in that order.
PenaltyMatrix select_viewers(const PenaltyMatrix& penalty, std::span<const std::string> viewer_ids);

struct TrailRow {
  std::size_t frame = 0;
  std::int64_t t_ms = 0;
  std::optional<Point2> a;
  std::optional<Point2> b;
  double intensity = 0.0;
};

/// Two viewers' trajectories over a window with a colour intensity rising
/// linearly from 0 (first frame) to 1 (last). The frame index doubles as the
/// time axis of the 3D view. Unobserved frames carry no position.
std::vector<TrailRow> trail_plot_data(const CohortDataset& cohort, const std::string& viewer_a,
                                      const std::string& viewer_b, const WindowSpec& window);

/// frame,t_ms,x_a,y_a,x_b,y_b,intensity; unobserved coordinates are empty cells.
std::string trail_csv(const std::vector<TrailRow>& rows);

}  // namespace gazesim
