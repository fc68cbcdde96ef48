#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gazesim/series.hpp"

namespace gazesim {

/// Time Warp Edit Distance parameters, both in pixel units.
///  - lambda: constant penalty paid by every delete step.
///  - gamma:  stiffness; charged once per delete step (one frame of index
///            advance) and 2 * |p - q| on a match between frames p and q.
struct TwedParams {
  double lambda = 0.0;
  double gamma = 0.0;

  void validate() const;

  friend bool operator==(const TwedParams&, const TwedParams&) = default;
};

/// Accumulated-cost grid of an elastic alignment, (n+1) x (m+1) with the
/// origin at [0][0] and +inf borders.
struct DpCostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cells;

  double operator()(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
};

/// Euclidean distance in pixels.
inline double ground_distance(Point2 p, Point2 q) noexcept;

/// TWED between two trajectories. Both series get a virtual sample (0, 0) at
/// index 0; the result is the accumulated cost at [n][m]. Arguments are put
/// in a canonical order first, so twed(a, b) and twed(b, a) are bit-identical.
double twed(std::span<const Point2> a, std::span<const Point2> b, const TwedParams& params);

/// Full TWED cost grid for (a, b) as given (no canonical reordering).
DpCostMatrix twed_cost_matrix(std::span<const Point2> a, std::span<const Point2> b, const TwedParams& params);

/// Classic DTW with the Euclidean ground distance, unconstrained.
double dtw(std::span<const Point2> a, std::span<const Point2> b);

DpCostMatrix dtw_cost_matrix(std::span<const Point2> a, std::span<const Point2> b);

/// sqrt(sum_k |a_k - b_k|^2); requires equal lengths.
double lockstep_euclidean(std::span<const Point2> a, std::span<const Point2> b);

inline double ground_distance(Point2 p, Point2 q) noexcept {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace gazesim
