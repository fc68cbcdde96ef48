#include "gazesim/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "gazesim/csv.hpp"
#include "gazesim/error.hpp"
#include "parallel.hpp"

namespace gazesim {

const SimilarityMatrix& SweepGrid::at(double lambda, double gamma) const {
  const auto it = results.find({lambda, gamma});
  if (it == results.end()) throw Error(Errc::InvalidArgument, "sweep has no cell for this (lambda, gamma)");
  return it->second;
}

SweepGrid parameter_sweep(const CohortDataset& cohort, const WindowSpec& window, std::span<const double> lambda_values,
                          std::span<const double> gamma_values) {
  if (lambda_values.empty() || gamma_values.empty()) throw Error(Errc::InvalidArgument, "sweep grids must be non-empty");
  std::vector<TwedParams> cells;
  for (const double l : lambda_values) {
    for (const double g : gamma_values) {
      TwedParams p{l, g};
      p.validate();
      cells.push_back(p);
    }
  }
  const auto points = window_points(cohort, window);
  check_window_series(points);

  std::vector<SquareMatrix> distances(cells.size());
  const auto count = static_cast<std::ptrdiff_t>(cells.size());
  detail::parallel_for(count, [&](std::ptrdiff_t k) {
    const auto params = cells[k];
    distances[k] = pairwise_matrix_serial(points, [&](const PointSeries& a, const PointSeries& b) {
      return twed(a, b, params);
    });
  });

  SweepGrid grid;
  grid.lambda_values.assign(lambda_values.begin(), lambda_values.end());
  grid.gamma_values.assign(gamma_values.begin(), gamma_values.end());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    SimilarityMatrix sim;
    sim.viewer_ids = cohort.viewer_ids();
    sim.window = window;
    sim.params = cells[k];
    sim.distance_scale = distances[k].max();
    sim.values = normalize_to_similarity(distances[k]);
    grid.results.insert_or_assign({cells[k].lambda, cells[k].gamma}, std::move(sim));
  }
  return grid;
}

PenaltyMatrix answer_penalty_matrix(const AnswerSheet& sheet, std::span<const std::string> question_ids) {
  if (question_ids.empty()) throw Error(Errc::InvalidArgument, "no questions selected");
  std::vector<std::size_t> columns;
  for (const auto& q : question_ids) {
    const auto it = std::find(sheet.question_ids.begin(), sheet.question_ids.end(), q);
    if (it == sheet.question_ids.end()) throw Error(Errc::UnknownQuestion, "'" + q + "'");
    columns.push_back(static_cast<std::size_t>(it - sheet.question_ids.begin()));
  }
  const std::size_t n = sheet.viewer_ids.size();
  PenaltyMatrix out;
  out.viewer_ids = sheet.viewer_ids;
  out.counts.assign(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      int both = 0;
      for (const std::size_t c : columns) {
        if (sheet.correctness[i][c] && sheet.correctness[j][c]) ++both;
      }
      out.counts[i][j] = both;
      out.counts[j][i] = both;
    }
  }
  return out;
}

PenaltyMatrix select_viewers(const PenaltyMatrix& penalty, std::span<const std::string> viewer_ids) {
  std::vector<std::size_t> index;
  for (const auto& id : viewer_ids) {
    const auto it = std::find(penalty.viewer_ids.begin(), penalty.viewer_ids.end(), id);
    if (it == penalty.viewer_ids.end()) throw Error(Errc::ViewerMismatch, "viewer '" + id + "' has no answers");
    index.push_back(static_cast<std::size_t>(it - penalty.viewer_ids.begin()));
  }
  PenaltyMatrix out;
  out.viewer_ids.assign(viewer_ids.begin(), viewer_ids.end());
  out.counts.assign(index.size(), std::vector<int>(index.size(), 0));
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t j = 0; j < index.size(); ++j) out.counts[i][j] = penalty.counts[index[i]][index[j]];
  }
  return out;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
  auto constant = [](std::span<const double> v) { return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }); };
  if (constant(xs) || constant(ys)) return std::nullopt;
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx;
    const double dy = ys[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Correlation correlate(const PenaltyMatrix& penalty, const SimilarityMatrix& sim) {
  if (penalty.viewer_ids != sim.viewer_ids) {
    throw Error(Errc::ViewerMismatch, "penalty and similarity matrices list different viewers");
  }
  const std::size_t n = sim.viewer_ids.size();
  if (n < 3) throw Error(Errc::TooFewViewers, "correlation needs at least 3 viewers");
  Correlation out;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.samples.push_back({sim.viewer_ids[i], sim.viewer_ids[j], penalty.counts[i][j], sim.values(i, j)});
      xs.push_back(penalty.counts[i][j]);
      ys.push_back(sim.values(i, j));
    }
  }
  out.pearson_r = pearson(xs, ys);
  return out;
}

std::string scatter_csv(const Correlation& corr) {
  std::string out = "viewer_i,viewer_j,penalty,similarity\n";
  for (const auto& s : corr.samples) {
    out += csv::escape(s.viewer_i) + "," + csv::escape(s.viewer_j) + "," + std::to_string(s.penalty) + "," +
           csv::format_double(s.similarity) + "\n";
  }
  return out;
}

std::vector<TrailRow> trail_plot_data(const CohortDataset& cohort, const std::string& viewer_a,
                                      const std::string& viewer_b, const WindowSpec& window) {
  window.validate();
  const auto ia = cohort.viewers.find(viewer_a);
  const auto ib = cohort.viewers.find(viewer_b);
  if (ia == cohort.viewers.end()) throw Error(Errc::UnknownViewer, "'" + viewer_a + "'");
  if (ib == cohort.viewers.end()) throw Error(Errc::UnknownViewer, "'" + viewer_b + "'");

  const double fps = cohort.frame_rate_fps;
  const auto first = static_cast<std::size_t>(std::llround(window.start_s * fps));
  const auto count = static_cast<std::size_t>(std::llround(window.length_s * fps));
  if (count == 0 || first + count > cohort.frame_count()) throw Error(Errc::OutOfRange, "window outside the data");

  const auto& a = ia->second;
  const auto& b = ib->second;
  std::vector<TrailRow> rows(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t f = first + k;
    auto& r = rows[k];
    r.frame = f;
    r.t_ms = a.time_ms(f);
    if (a.mask[f]) r.a = Point2{a.xs[f], a.ys[f]};
    if (b.mask[f]) r.b = Point2{b.xs[f], b.ys[f]};
    r.intensity = count > 1 ? static_cast<double>(k) / static_cast<double>(count - 1) : 0.0;
  }
  return rows;
}

std::string trail_csv(const std::vector<TrailRow>& rows) {
  auto coord = [](const std::optional<Point2>& p, bool x) {
    return p ? csv::format_double(x ? p->x : p->y) : std::string();
  };
  std::string out = "frame,t_ms,x_a,y_a,x_b,y_b,intensity\n";
  for (const auto& r : rows) {
    out += std::to_string(r.frame) + "," + std::to_string(r.t_ms) + "," + coord(r.a, true) + "," + coord(r.a, false) +
           "," + coord(r.b, true) + "," + coord(r.b, false) + "," + csv::format_double(r.intensity) + "\n";
  }
  return out;
}

}  // namespace gazesim
