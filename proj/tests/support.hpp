#pragma once

// Shared test fixtures: seeded generators, brute-force oracles and synthetic
// cohort files. Nothing here calls into the code under test except where a
// fixture needs library types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gazesim/cluster.hpp"
#include "gazesim/elastic.hpp"
#include "gazesim/ingest.hpp"
#include "gazesim/series.hpp"

namespace testsupport {

using gazesim::Point2;
using gazesim::PointSeries;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double dist(Point2 p, Point2 q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline PointSeries random_series(std::mt19937_64& rng, std::size_t len, double lo = -50.0, double hi = 50.0,
                                 bool integral = false) {
  std::uniform_real_distribution<double> u(lo, hi);
  PointSeries s(len);
  for (auto& p : s) {
    p = {u(rng), u(rng)};
    if (integral) p = {std::round(p.x), std::round(p.y)};
  }
  return s;
}

inline std::size_t random_len(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// --- elastic distance oracles ----------------------------------------------
//
// Enumerate every monotone alignment path from the origin (0,0) to (n,m) and
// accumulate step costs left to right. Border cells (0,q>0) and (p>0,0) are
// not reachable, so every path starts with a match of the first samples.

inline double twed_paths(const PointSeries& a, const PointSeries& b, double lambda, double gamma) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  auto at = [](const PointSeries& s, std::size_t k) { return k == 0 ? Point2{0.0, 0.0} : s[k - 1]; };
  double best = kInf;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t p, std::size_t q, double acc) {
    if (p == n && q == m) {
      best = std::min(best, acc);
      return;
    }
    if (p < n && q < m) {
      const double lag = static_cast<double>(p + 1 > q + 1 ? p - q : q - p);
      walk(p + 1, q + 1, acc + (dist(at(a, p + 1), at(b, q + 1)) + dist(at(a, p), at(b, q)) + 2.0 * gamma * lag));
    }
    if (q > 0 && p < n) walk(p + 1, q, acc + (dist(at(a, p + 1), at(a, p)) + gamma + lambda));
    if (p > 0 && q < m) walk(p, q + 1, acc + (dist(at(b, q + 1), at(b, q)) + gamma + lambda));
  };
  walk(0, 0, 0.0);
  return best;
}

inline double dtw_paths(const PointSeries& a, const PointSeries& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  double best = kInf;
  // (i, j) is the last aligned pair, 1-based.
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    if (i == n && j == m) {
      best = std::min(best, acc);
      return;
    }
    if (i < n && j < m) walk(i + 1, j + 1, dist(a[i], b[j]) + acc);
    if (i < n) walk(i + 1, j, dist(a[i], b[j - 1]) + acc);
    if (j < m) walk(i, j + 1, dist(a[i - 1], b[j]) + acc);
  };
  walk(1, 1, dist(a[0], b[0]) + 0.0);
  return best;
}

inline bool canonical_less(const PointSeries& a, const PointSeries& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](Point2 p, Point2 q) {
    return p.x != q.x ? p.x < q.x : p.y < q.y;
  });
}

// --- modularity oracles ----------------------------------------------------

inline gazesim::CouplingGraph random_graph(std::mt19937_64& rng, std::size_t n, double density = 0.6) {
  gazesim::CouplingGraph g;
  for (std::size_t i = 0; i < n; ++i) g.node_ids.push_back("v" + std::to_string(i));
  g.weights = gazesim::SquareMatrix(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = u(rng) < density ? u(rng) : 0.0;
      g.weights(i, j) = w;
      g.weights(j, i) = w;
    }
  }
  return g;
}

// Straight from the definition: pairs inside a community over W, minus the
// scaled squared share of each community's strength.
inline double q_reference(const std::vector<std::size_t>& labels, const gazesim::CouplingGraph& g, double scale) {
  const std::size_t n = labels.size();
  double total = 0.0;
  std::vector<double> strength(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      strength[i] += g.weights(i, j);
      if (i < j) total += g.weights(i, j);
    }
  }
  if (total == 0.0) return 0.0;
  double inside = 0.0;
  std::map<std::size_t, double> by_comm;
  for (std::size_t i = 0; i < n; ++i) {
    by_comm[labels[i]] += strength[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (labels[i] == labels[j]) inside += g.weights(i, j);
    }
  }
  double penalty = 0.0;
  for (const auto& [c, s] : by_comm) penalty += (s / (2.0 * total)) * (s / (2.0 * total));
  return inside / total - scale * penalty;
}

// Visits every set partition of {0..n-1} as a restricted growth string.
inline void for_each_partition(std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> labels(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      visit(labels);
      return;
    }
    for (std::size_t c = 0; c <= used && c < n; ++c) {
      labels[i] = c;
      rec(i + 1, std::max(used, c + 1));
    }
  };
  if (n == 0) {
    visit(labels);
    return;
  }
  labels[0] = 0;
  rec(1, 1);
}

inline double exhaustive_max_q(const gazesim::CouplingGraph& g, double scale) {
  double best = -kInf;
  for_each_partition(g.size(), [&](const std::vector<std::size_t>& labels) {
    best = std::max(best, q_reference(labels, g, scale));
  });
  return best;
}

// Two cliques of `half` nodes with unit weights joined by one edge of `bridge`.
inline gazesim::CouplingGraph two_cliques(std::size_t half, double bridge) {
  gazesim::CouplingGraph g;
  const std::size_t n = 2 * half;
  for (std::size_t i = 0; i < n; ++i) g.node_ids.push_back("n" + std::to_string(i));
  g.weights = gazesim::SquareMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && (i < half) == (j < half)) g.weights(i, j) = 1.0;
    }
  }
  g.weights(half - 1, half) = bridge;
  g.weights(half, half - 1) = bridge;
  return g;
}

// --- answer penalty oracle -------------------------------------------------

inline std::vector<std::vector<int>> penalty_nested_loops(const gazesim::AnswerSheet& sheet,
                                                          const std::vector<std::string>& questions) {
  const std::size_t n = sheet.viewer_ids.size();
  std::vector<std::vector<int>> out(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (const auto& q : questions) {
        std::size_t col = 0;
        while (sheet.question_ids[col] != q) ++col;
        if (sheet.correctness[i][col] && sheet.correctness[j][col]) ++out[i][j];
      }
    }
  }
  return out;
}

inline gazesim::AnswerSheet random_answers(std::mt19937_64& rng, std::size_t viewers, std::size_t questions) {
  gazesim::AnswerSheet sheet;
  for (std::size_t v = 0; v < viewers; ++v) sheet.viewer_ids.push_back("p" + std::to_string(v + 1));
  for (std::size_t q = 0; q < questions; ++q) sheet.question_ids.push_back("q" + std::to_string(q + 1));
  std::bernoulli_distribution coin(0.6);
  sheet.correctness.assign(viewers, std::vector<bool>(questions));
  for (auto& row : sheet.correctness) {
    for (std::size_t q = 0; q < questions; ++q) row[q] = coin(rng);
  }
  return sheet;
}

inline std::string answers_csv(const gazesim::AnswerSheet& sheet) {
  std::string out = "viewer";
  for (const auto& q : sheet.question_ids) out += "," + q;
  out += "\n";
  for (std::size_t v = 0; v < sheet.viewer_ids.size(); ++v) {
    out += sheet.viewer_ids[v];
    for (const bool c : sheet.correctness[v]) out += c ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

// --- synthetic cohort --------------------------------------------------------

// Smooth, well separated reference paths on a 1920 x 1080 screen.
inline Point2 trajectory(int which, double t_s) {
  if (which == 0) return {300.0 + 150.0 * std::sin(0.7 * t_s), 300.0 + 120.0 * std::cos(0.45 * t_s)};
  return {1500.0 + 150.0 * std::cos(0.55 * t_s), 800.0 + 120.0 * std::sin(0.8 * t_s)};
}

struct SyntheticViewer {
  std::string id;
  int group = 0;
  std::vector<gazesim::RawFixationRecord> records;
};

// Viewers [0, n/2) follow trajectory 0, the rest trajectory 1; one fixation
// every `fixation_ms` at the path position plus isotropic Gaussian noise.
inline std::vector<SyntheticViewer> synthetic_cohort(std::size_t n, std::int64_t duration_ms, double sigma_px,
                                                     std::uint64_t seed, std::int64_t fixation_ms = 100) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma_px);
  std::vector<SyntheticViewer> out;
  for (std::size_t v = 0; v < n; ++v) {
    SyntheticViewer sv;
    char id[32];
    std::snprintf(id, sizeof id, "s%02zu", v + 1);
    sv.id = id;
    sv.group = v < n / 2 ? 0 : 1;
    for (std::int64_t t = 0; t < duration_ms; t += fixation_ms) {
      const Point2 c = trajectory(sv.group, static_cast<double>(t) / 1000.0);
      gazesim::RawFixationRecord r;
      r.start_ms = t;
      r.end_ms = std::min(t + fixation_ms, duration_ms);
      r.duration_ms = r.end_ms - r.start_ms;
      r.x_px = c.x + noise(rng);
      r.y_px = c.y + noise(rng);
      sv.records.push_back(r);
    }
    out.push_back(std::move(sv));
  }
  return out;
}

// --- filesystem --------------------------------------------------------------

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gazesim_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every regular file under `root`, keyed by relative path.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return files;
}

// Raw input tree for the CLI: fixation exports, an ASC header, EEG files and
// an answer sheet, plus a run configuration pointing at them. Returns the
// configuration path.
inline std::filesystem::path write_cli_inputs(const std::filesystem::path& root, std::size_t viewers,
                                              std::int64_t duration_ms, std::uint64_t seed,
                                              const std::string& extra_config = {}) {
  namespace fs = std::filesystem;
  const auto cohort = synthetic_cohort(viewers, duration_ms, 15.0, seed);
  for (const auto& v : cohort) {
    std::string text = "RECORDING_SESSION_LABEL\tCURRENT_FIX_START\tCURRENT_FIX_END\tCURRENT_FIX_DURATION\t"
                       "CURRENT_FIX_X\tCURRENT_FIX_Y\n";
    for (const auto& r : v.records) {
      std::ostringstream row;
      row.precision(17);
      row << v.id << "\t" << r.start_ms << "\t" << r.end_ms << "\t" << r.duration_ms << "\t" << r.x_px << "\t"
          << r.y_px << "\n";
      text += row.str();
    }
    write_file(root / "fixations" / (v.id + "_export.tsv"), text);

    std::string eeg = "Fz,Cz,Pz\n";
    for (int i = 0; i < 2000; ++i) {
      eeg += std::to_string(i % 7) + "," + std::to_string((i * 3) % 11) + "," + std::to_string(-(i % 5)) + "\n";
    }
    write_file(root / "eeg" / (v.id + "_eeg.csv"), eeg);
  }
  write_file(root / "session.asc",
             "** CONVERTED FROM session.edf\nMSG\t1000 RECCFG CR 1000 2 1 L\nMSG\t1001 DISPLAY_COORDS 0 0 1919 1079\n");
  std::mt19937_64 rng(seed + 1);
  auto sheet = random_answers(rng, viewers, 5);
  for (std::size_t v = 0; v < viewers; ++v) sheet.viewer_ids[v] = cohort[v].id;
  write_file(root / "answers.csv", answers_csv(sheet));

  const fs::path config = root / "run.cfg";
  write_file(config, "video_id = clip01\n"
                     "fixation_dir = fixations\n"
                     "asc_file = session.asc\n"
                     "eeg_dir = eeg\n"
                     "answers_file = answers.csv\n"
                     "eeg_rate_hz = 500\n"
                     "window_s = 2\n"
                     "lambda = 5000\n"
                     "gamma = 5000\n"
                     "scales = 0.5,1,2\n"
                     "seed = 7\n"
                     "sweep_lambdas = 0,5000\n"
                     "sweep_gammas = 1000,5000\n"
                     "sweep_start_s = 0\n"
                     "sweep_length_s = 1\n"
                     "trail_pairs = s01:s02\n"
                     "questions = q1,q2,q3,q4,q5\n"
                     "out = out\n" +
                         extra_config);
  return config;
}

}  // namespace testsupport
