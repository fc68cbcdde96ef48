#include "gazesim/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "gazesim/error.hpp"

namespace gazesim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_points(std::span<const Point2> s, const char* name) {
  if (s.empty()) throw Error(Errc::EmptySeries, std::string(name) + " is empty");
  for (const auto& p : s) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(Errc::InvalidArgument, std::string(name) + " has a non-finite coordinate");
    }
  }
}

bool canonical_less(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Cost of stepping from sample k-1 to k of one series (virtual zero sample at 0).
std::vector<double> delete_costs(std::span<const Point2> s, const TwedParams& params) {
  std::vector<double> out(s.size() + 1, 0.0);
  Point2 prev{0.0, 0.0};
  for (std::size_t k = 1; k <= s.size(); ++k) {
    out[k] = ground_distance(s[k - 1], prev) + params.gamma + params.lambda;
    prev = s[k - 1];
  }
  return out;
}

// Row-by-row TWED recursion. `on_row(p, row)` observes each finished row.
template <typename RowSink>
double twed_rows(std::span<const Point2> a, std::span<const Point2> b, const TwedParams& params, RowSink&& on_row) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const auto del_a = delete_costs(a, params);
  const auto del_b = delete_costs(b, params);
  const double two_gamma = 2.0 * params.gamma;

  std::vector<double> prev(m + 1, kInf);
  std::vector<double> curr(m + 1, kInf);
  // d(a_{p-1}, b_{q-1}) for the previous row, indexed by q; row 0 is the virtual pair.
  std::vector<double> prev_d(m + 1, 0.0);
  std::vector<double> curr_d(m + 1, 0.0);
  for (std::size_t q = 1; q <= m; ++q) prev_d[q] = ground_distance({0.0, 0.0}, b[q - 1]);

  prev[0] = 0.0;
  on_row(0, std::span<const double>(prev));
  for (std::size_t p = 1; p <= n; ++p) {
    const Point2 ap = a[p - 1];
    curr[0] = kInf;
    curr_d[0] = ground_distance(ap, {0.0, 0.0});
    for (std::size_t q = 1; q <= m; ++q) {
      const double d_pq = ground_distance(ap, b[q - 1]);
      curr_d[q] = d_pq;
      const auto lag = static_cast<double>(p > q ? p - q : q - p);
      const double match = prev[q - 1] + (d_pq + prev_d[q - 1] + two_gamma * lag);
      const double delete_a = prev[q] + del_a[p];
      const double delete_b = curr[q - 1] + del_b[q];
      curr[q] = std::min(match, std::min(delete_a, delete_b));
    }
    on_row(p, std::span<const double>(curr));
    std::swap(prev, curr);
    std::swap(prev_d, curr_d);
  }
  return prev[m];
}

}  // namespace

void TwedParams::validate() const {
  if (!std::isfinite(lambda) || !std::isfinite(gamma) || lambda < 0.0 || gamma < 0.0) {
    throw Error(Errc::InvalidArgument, "TWED lambda and gamma must be finite and non-negative");
  }
}

double twed(std::span<const Point2> a, std::span<const Point2> b, const TwedParams& params) {
  params.validate();
  require_points(a, "first series");
  require_points(b, "second series");
  if (canonical_less(b, a)) std::swap(a, b);
  return twed_rows(a, b, params, [](std::size_t, std::span<const double>) {});
}

DpCostMatrix twed_cost_matrix(std::span<const Point2> a, std::span<const Point2> b, const TwedParams& params) {
  params.validate();
  require_points(a, "first series");
  require_points(b, "second series");
  DpCostMatrix grid{a.size() + 1, b.size() + 1, std::vector<double>((a.size() + 1) * (b.size() + 1))};
  twed_rows(a, b, params, [&](std::size_t p, std::span<const double> row) {
    std::copy(row.begin(), row.end(), grid.cells.begin() + static_cast<std::ptrdiff_t>(p * grid.cols));
  });
  return grid;
}

DpCostMatrix dtw_cost_matrix(std::span<const Point2> a, std::span<const Point2> b) {
  require_points(a, "first series");
  require_points(b, "second series");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  DpCostMatrix grid{n + 1, m + 1, std::vector<double>((n + 1) * (m + 1), kInf)};
  grid(0, 0) = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const double best = std::min(grid(i, j - 1), std::min(grid(i - 1, j), grid(i - 1, j - 1)));
      grid(i, j) = ground_distance(a[i - 1], b[j - 1]) + best;
    }
  }
  return grid;
}

double dtw(std::span<const Point2> a, std::span<const Point2> b) {
  require_points(a, "first series");
  require_points(b, "second series");
  if (canonical_less(b, a)) std::swap(a, b);
  const std::size_t m = b.size();
  std::vector<double> prev(m + 1, kInf);
  std::vector<double> curr(m + 1, kInf);
  prev[0] = 0.0;
  for (const Point2 ai : a) {
    curr[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double best = std::min(curr[j - 1], std::min(prev[j], prev[j - 1]));
      curr[j] = ground_distance(ai, b[j - 1]) + best;
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

double lockstep_euclidean(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::LengthMismatch,
                "lock-step distance needs equal lengths (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double dx = a[k].x - b[k].x;
    const double dy = a[k].y - b[k].y;
    sum += dx * dx + dy * dy;
  }
  return std::sqrt(sum);
}

}  // namespace gazesim
