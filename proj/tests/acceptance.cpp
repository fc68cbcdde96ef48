// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "gazesim/analysis.hpp"
#include "gazesim/cli.hpp"
#include "gazesim/cluster.hpp"
#include "gazesim/dataset_io.hpp"
#include "gazesim/preprocess.hpp"
#include "gazesim/service.hpp"
#include "gazesim/simmatrix.hpp"
#include "support.hpp"

using namespace gazesim;
namespace ts = testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

const double kSweep[] = {0.0, 1.0, 5.0, 10.0};

Outcome twed_oracle() {
  Outcome o;
  std::mt19937_64 rng(1001);
  const auto t0 = Clock::now();
  for (int c = 0; c < 500; ++c) {
    auto a = ts::random_series(rng, ts::random_len(rng, 1, 6), -20, 20, c % 2 == 0);
    auto b = ts::random_series(rng, ts::random_len(rng, 1, 6), -20, 20, c % 2 == 0);
    const TwedParams p{kSweep[rng() % 4], kSweep[rng() % 4]};
    if (ts::canonical_less(b, a)) std::swap(a, b);
    const double dp = twed(a, b, p);
    const double brute = ts::twed_paths(a, b, p.lambda, p.gamma);
    if (dp != brute) {
      std::ostringstream s;
      s.precision(17);
      s << "case " << c << ": dp " << dp << " vs enumeration " << brute;
      o.fail(s.str());
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 10.0) o.fail("took " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "500 pairs exact, " + std::to_string(elapsed) + " s";
  return o;
}

Outcome twed_metric() {
  Outcome o;
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const auto a = ts::random_series(rng, ts::random_len(rng, 1, 20));
    const auto b = ts::random_series(rng, ts::random_len(rng, 1, 20));
    const auto x = ts::random_series(rng, ts::random_len(rng, 1, 20));
    const TwedParams p{kSweep[rng() % 4], kSweep[1 + rng() % 3]};
    const double ab = twed(a, b, p), ba = twed(b, a, p);
    const double bx = twed(b, x, p), ax = twed(a, x, p);
    if (ab != ba || twed(x, b, p) != bx || twed(x, a, p) != ax) o.fail("asymmetric at case " + std::to_string(c));
    if (twed(a, a, p) != 0.0 || twed(b, b, p) != 0.0 || twed(x, x, p) != 0.0) {
      o.fail("d(a, a) != 0 at case " + std::to_string(c));
    }
    if (a != b && !(ab > 0.0)) o.fail("distinct series at distance 0, case " + std::to_string(c));
    const double excess = std::max({ax - (ab + bx), ab - (ax + bx), bx - (ab + ax)});
    worst = std::max(worst, excess);
    if (excess > 1e-9) o.fail("triangle violated by " + std::to_string(excess) + " at case " + std::to_string(c));
  }
  if (o.pass) {
    std::ostringstream s;
    s << "200 triples, worst triangle excess " << worst;
    o.detail = s.str();
  }
  return o;
}

Outcome dtw_oracle() {
  Outcome o;
  std::mt19937_64 rng(1003);
  for (int c = 0; c < 500; ++c) {
    auto a = ts::random_series(rng, ts::random_len(rng, 1, 6));
    auto b = ts::random_series(rng, ts::random_len(rng, 1, 6));
    if (ts::canonical_less(b, a)) std::swap(a, b);
    if (dtw(a, b) != ts::dtw_paths(a, b)) o.fail("case " + std::to_string(c));
  }
  if (o.pass) o.detail = "500 cases exact";
  return o;
}

CohortDataset cohort_of(const std::vector<PointSeries>& paths, double fps) {
  CohortDataset c;
  c.frame_rate_fps = fps;
  for (std::size_t v = 0; v < paths.size(); ++v) {
    FixationSeries s;
    char id[32];
    std::snprintf(id, sizeof id, "p%02zu", v + 1);
    s.viewer_id = id;
    s.frame_rate_fps = fps;
    for (const auto& p : paths[v]) {
      s.xs.push_back(p.x);
      s.ys.push_back(p.y);
      s.mask.push_back(true);
    }
    c.viewers.emplace(s.viewer_id, s);
  }
  return c;
}

Outcome similarity_contract() {
  Outcome o;
  std::mt19937_64 rng(1004);
  const double params[] = {0.0, 1.0, 100.0, 5000.0};
  for (int w = 0; w < 100; ++w) {
    const std::size_t n = ts::random_len(rng, 2, 10);
    const std::size_t len = ts::random_len(rng, 1, 40);
    std::vector<PointSeries> paths;
    for (std::size_t v = 0; v < n; ++v) paths.push_back(ts::random_series(rng, len, 0, 1920));
    if (w % 10 == 0) paths[1] = paths[0];
    if (w % 25 == 0) paths.assign(n, paths[0]);
    const auto cohort = cohort_of(paths, 32.0);
    const WindowSpec win{0.0, static_cast<double>(len) / 32.0};
    const TwedParams p{params[rng() % 4], params[rng() % 4]};
    const auto mode = w % 2 ? Normalization::Global : Normalization::PerWindow;
    const auto sim = compute_window_matrices(cohort, std::span<const WindowSpec>(&win, 1), p, mode).front();
    const auto dist = pairwise_distance_matrix_serial(window_points(cohort, win), p);
    const std::string at = "window " + std::to_string(w);
    const double dmax = dist.max();
    for (std::size_t i = 0; i < n; ++i) {
      if (sim.values(i, i) != 1.0) o.fail(at + ": diagonal not 1");
      for (std::size_t j = 0; j < n; ++j) {
        const double s = sim.values(i, j);
        if (s != sim.values(j, i)) o.fail(at + ": asymmetric");
        if (!(s >= 0.0 && s <= 1.0)) o.fail(at + ": entry outside [0,1]");
        if (i != j && dmax > 0.0 && dist(i, j) == dmax && s != 0.0) o.fail(at + ": max distance not mapped to 0");
        if (dmax == 0.0 && s != 1.0) o.fail(at + ": zero distances not mapped to 1");
      }
    }
  }
  if (o.pass) o.detail = "100 windows";
  return o;
}

Outcome clustering() {
  Outcome o;
  const auto planted = ts::two_cliques(4, 0.1);
  const std::vector<std::size_t> expected{0, 0, 0, 0, 1, 1, 1, 1};
  std::mt19937_64 seeds(1005);
  for (int k = 0; k < 20; ++k) {
    const std::uint64_t seed = seeds();
    if (detect_communities_at(planted, 1.0, seed).assignment != expected) {
      o.fail("planted bipartition missed for seed " + std::to_string(seed));
    }
  }

  std::mt19937_64 rng(1006);
  double worst_gap = 0.0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = ts::random_len(rng, 1, 8);
    const auto g = ts::random_graph(rng, n, 0.3 + 0.7 * std::uniform_real_distribution<double>(0, 1)(rng));
    const double p = std::uniform_real_distribution<double>(0.25, 2.0)(rng);
    const auto part = detect_communities_at(g, p, rng());
    const double best = ts::exhaustive_max_q(g, p);
    const double recomputed = ts::q_reference(part.assignment, g, p);
    if (part.q_value > best + 1e-12) o.fail("greedy Q above the exhaustive maximum, case " + std::to_string(c));
    if (std::abs(part.q_value - recomputed) > 1e-9) o.fail("reported Q disagrees with recomputation");
    worst_gap = std::max(worst_gap, best - part.q_value);
  }

  int moves = 0;
  double worst_err = 0.0;
  while (moves < 1000) {
    const std::size_t n = ts::random_len(rng, 2, 12);
    const auto g = ts::random_graph(rng, n, 0.8);
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = rng() % n;
    const std::size_t node = rng() % n;
    std::vector<std::size_t> targets;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != node && g.weights(node, j) > 0.0) targets.push_back(labels[j]);
    }
    if (targets.empty()) continue;
    const std::size_t target = targets[rng() % targets.size()];
    const double p = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    auto after = labels;
    after[node] = target;
    const double full = ts::q_reference(after, g, p) - ts::q_reference(labels, g, p);
    const double err = std::abs(delta_q_move(node, target, labels, g, p) - full);
    worst_err = std::max(worst_err, err);
    if (err > 1e-9) o.fail("move gain off by " + std::to_string(err));
    ++moves;
  }
  if (o.pass) {
    std::ostringstream s;
    s << "20 seeds planted; 50 graphs, largest gap to optimum " << worst_gap << "; 1000 moves, max error "
      << worst_err;
    o.detail = s.str();
  }
  return o;
}

Outcome end_to_end() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto synthetic = ts::synthetic_cohort(12, 30000, 15.0, 1007);
  std::vector<ViewerInput> inputs;
  for (const auto& v : synthetic) inputs.push_back({v.id, v.records});
  const auto pre = preprocess_cohort(inputs, 30000, PreprocessConfig{});
  if (pre.cohort.viewers.size() != 12) o.fail("viewers lost in preprocessing");
  if (pre.cohort.frame_count() != 960) o.fail("expected 960 frames, got " + std::to_string(pre.cohort.frame_count()));

  const auto windows = tile_windows(pre.cohort, 30.0);
  const auto sim = compute_window_matrices(pre.cohort, windows, {5000.0, 5000.0}).front();
  const auto graph = build_graph(sim);
  const auto part = detect_communities_at(graph, 1.0, 0);

  std::vector<std::size_t> truth;
  for (const auto& v : synthetic) truth.push_back(static_cast<std::size_t>(v.group));
  if (part.community_count() != 2) o.fail(std::to_string(part.community_count()) + " communities");
  if (canonicalize(part.assignment) != canonicalize(truth)) o.fail("communities differ from the planted groups");
  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) o.fail("took " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "2 planted communities recovered in " + std::to_string(elapsed) + " s";
  return o;
}

Outcome exclusion_rule() {
  Outcome o;
  auto record = [](std::int64_t start, std::int64_t end) { return RawFixationRecord{start, end, end - start, 500, 400}; };
  // 10 s at 120 Hz = 1200 samples: 240 missing is 20 %, 252 missing is 21 %.
  const std::vector<ViewerInput> inputs{
      {"full", {record(0, 10000)}},
      {"twenty", {record(0, 8000)}},
      {"twentyone", {record(0, 7900)}},
  };
  const auto r = preprocess_cohort(inputs, 10000, PreprocessConfig{});
  if (!r.cohort.viewers.contains("twenty")) o.fail("20% viewer excluded");
  if (!r.cohort.viewers.contains("full")) o.fail("complete viewer excluded");
  if (r.excluded.size() != 1 || r.excluded[0].viewer_id != "twentyone") o.fail("21% viewer retained");
  if (o.pass) o.detail = "21% excluded (ratio " + std::to_string(r.excluded[0].missing_ratio) + "), 20% retained";
  return o;
}

Outcome qa_penalty() {
  Outcome o;
  std::mt19937_64 rng(1008);
  const auto sheet = ts::random_answers(rng, 11, 5);
  const auto questions = sheet.question_ids;
  const auto pm = answer_penalty_matrix(sheet, questions);
  if (pm.counts != ts::penalty_nested_loops(sheet, questions)) o.fail("penalty matrix differs from nested loops");
  const std::vector<std::string> subset{"q1", "q4"};
  if (answer_penalty_matrix(sheet, subset).counts != ts::penalty_nested_loops(sheet, subset)) {
    o.fail("question subset differs from nested loops");
  }

  std::vector<PointSeries> paths;
  for (int v = 0; v < 11; ++v) paths.push_back(ts::random_series(rng, 32, 0, 1000));
  auto cohort = cohort_of(paths, 32.0);
  const WindowSpec w{0, 1};
  const auto sim = compute_window_matrices(cohort, std::span<const WindowSpec>(&w, 1), {5000, 5000}).front();
  AnswerSheet renamed = sheet;
  renamed.viewer_ids = sim.viewer_ids;
  const auto corr = correlate(answer_penalty_matrix(renamed, questions), sim);
  if (corr.samples.size() != 55) o.fail(std::to_string(corr.samples.size()) + " scatter samples");
  if (o.pass) o.detail = "11x11 matrix exact, 55 samples";
  return o;
}

Outcome determinism() {
  Outcome o;
  ts::TempDir tmp("acceptance_det");
  const auto cfg = ts::write_cli_inputs(tmp.path(), 6, 6000, 1009).string();
  const auto out = tmp.path() / "out";
  const std::vector<std::string> commands{"preprocess", "similarity", "cluster", "sweep", "correlate"};

  auto run_all = [&](int threads) {
    omp_set_num_threads(threads);
    std::string console;
    for (const auto& c : commands) {
      std::ostringstream so, se;
      const int code = cli::run({c, "--config", cfg}, so, se);
      if (code != 0) o.fail(c + " exited with " + std::to_string(code) + ": " + se.str());
      console += so.str() + se.str();
    }
    return std::make_pair(ts::snapshot(out), console);
  };
  const auto first = run_all(1);
  std::filesystem::remove_all(out);
  const auto second = run_all(4);
  const auto third = run_all(3);  // over the previous outputs
  if (first.first.size() < 10) o.fail("too few output files");
  if (first.first != second.first || first.first != third.first) {
    for (const auto& [name, text] : first.first) {
      const auto it = second.first.find(name);
      if (it == second.first.end() || it->second != text) {
        o.fail("output differs: " + name);
        break;
      }
    }
    o.fail("output trees differ");
  }
  if (first.second != second.second || first.second != third.second) o.fail("console output differs");

  // serve: identical answers from two independent service instances.
  const std::vector<std::pair<std::string, std::multimap<std::string, std::string>>> queries{
      {"/api/meta", {}},
      {"/api/gaze", {{"from_ms", "0"}, {"to_ms", "2000"}}},
      {"/api/eeg", {{"center_ms", "1000"}}},
      {"/api/similarity", {{"start_s", "0"}, {"len_s", "2"}}},
      {"/api/clusters", {{"start_s", "2"}, {"len_s", "2"}, {"scale", "1"}, {"seed", "3"}}},
  };
  const auto dataset = load_preprocessed(out / "preprocessed");
  omp_set_num_threads(1);
  const GazeService a(dataset, {});
  std::vector<std::string> answers;
  for (const auto& [path, q] : queries) answers.push_back(a.handle(path, q).body);
  omp_set_num_threads(4);
  const GazeService b(dataset, {});
  for (std::size_t k = 0; k < queries.size(); ++k) {
    if (b.handle(queries[k].first, queries[k].second).body != answers[k]) o.fail("serve answer differs: " + queries[k].first);
  }
  if (o.pass) o.detail = std::to_string(first.first.size()) + " files byte-identical over 3 runs (1/4/3 threads); serve stable";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Outcome (*)()>> criteria{
      {"twed-oracle-equivalence", twed_oracle},
      {"twed-metric-suite", twed_metric},
      {"dtw-oracle-equivalence", dtw_oracle},
      {"similarity-matrix-contract", similarity_contract},
      {"clustering-correctness", clustering},
      {"end-to-end-synthetic-cohort", end_to_end},
      {"exclusion-rule", exclusion_rule},
      {"qa-penalty", qa_penalty},
      {"cli-determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " - " << o.detail << std::endl;
    if (!o.pass) ++failures;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/" << criteria.size()
            << std::endl;
  return failures ? 1 : 0;
}
