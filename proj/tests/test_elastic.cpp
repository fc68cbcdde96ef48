#include "doctest.h"

#include "gazesim/elastic.hpp"
#include "gazesim/error.hpp"
#include "support.hpp"

using namespace gazesim;
using testsupport::canonical_less;
using testsupport::dtw_paths;
using testsupport::twed_paths;

TEST_CASE("twed of hand-worked pair") {
  // a = (1,0), b = (1,0),(2,0): best path matches a1-b1 then deletes b2.
  const PointSeries a{{1, 0}};
  const PointSeries b{{1, 0}, {2, 0}};
  const TwedParams p{2.0, 0.5};
  // match (1,1): d(a1,b1)=0 + d(0,0)=0 + 0 ; delete b2: d(b2,b1)=1 + gamma + lambda
  CHECK(twed(a, b, p) == 1.0 + 0.5 + 2.0);
  CHECK(twed(b, a, p) == 1.0 + 0.5 + 2.0);
}

TEST_CASE("twed identical series is zero") {
  const PointSeries a{{3, 4}, {5, 6}, {-1, 2}};
  CHECK(twed(a, a, {10.0, 10.0}) == 0.0);
}

TEST_CASE("twed lag term charges index mismatch") {
  // Matching every sample costs 2*gamma per unit of lag, so shifted copies of
  // a constant series are cheaper to align diagonally.
  const PointSeries a{{0, 0}, {0, 0}, {0, 0}};
  const PointSeries b{{0, 0}, {0, 0}, {0, 0}};
  CHECK(twed(a, b, {0.0, 100.0}) == 0.0);
  const PointSeries c{{0, 0}, {0, 0}};
  // Two diagonal matches then one deletion of a zero-length step: gamma + lambda.
  CHECK(twed(a, c, {1.0, 3.0}) == 4.0);
}

TEST_CASE("twed equals path enumeration on small inputs") {
  std::mt19937_64 rng(11);
  const double values[] = {0.0, 1.0, 5.0, 10.0};
  for (int t = 0; t < 200; ++t) {
    auto a = testsupport::random_series(rng, testsupport::random_len(rng, 1, 5));
    auto b = testsupport::random_series(rng, testsupport::random_len(rng, 1, 5));
    const TwedParams p{values[rng() % 4], values[rng() % 4]};
    const auto grid = twed_cost_matrix(a, b, p);
    CHECK(grid(a.size(), b.size()) == twed_paths(a, b, p.lambda, p.gamma));
    if (canonical_less(b, a)) std::swap(a, b);
    CHECK(twed(a, b, p) == twed_paths(a, b, p.lambda, p.gamma));
  }
}

TEST_CASE("twed cost grid borders") {
  const PointSeries a{{1, 1}, {2, 2}};
  const PointSeries b{{1, 1}};
  const auto g = twed_cost_matrix(a, b, {1.0, 1.0});
  CHECK(g.rows == 3);
  CHECK(g.cols == 2);
  CHECK(g(0, 0) == 0.0);
  CHECK(std::isinf(g(0, 1)));
  CHECK(std::isinf(g(1, 0)));
  CHECK(std::isinf(g(2, 0)));
}

TEST_CASE("twed argument validation") {
  const PointSeries a{{1, 1}};
  const PointSeries empty;
  CHECK_THROWS_AS(twed(a, empty, {1, 1}), Error);
  try {
    twed(empty, a, {1, 1});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptySeries);
  }
  try {
    twed(a, a, {-1, 1});
    FAIL("negative lambda accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidArgument);
  }
  const PointSeries bad{{std::nan(""), 0}};
  CHECK_THROWS_AS(twed(a, bad, {1, 1}), Error);
}

TEST_CASE("dtw equals path enumeration") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    auto a = testsupport::random_series(rng, testsupport::random_len(rng, 1, 6));
    auto b = testsupport::random_series(rng, testsupport::random_len(rng, 1, 6));
    CHECK(dtw_cost_matrix(a, b)(a.size(), b.size()) == dtw_paths(a, b));
    if (canonical_less(b, a)) std::swap(a, b);
    CHECK(dtw(a, b) == dtw_paths(a, b));
  }
}

TEST_CASE("dtw small example") {
  const PointSeries a{{0, 0}, {1, 0}, {2, 0}};
  const PointSeries b{{0, 0}, {2, 0}};
  // 0-0, 1-? (1 either way), 2-2
  CHECK(dtw(a, b) == 1.0);
}

TEST_CASE("lock-step euclidean") {
  const PointSeries a{{0, 0}, {3, 0}};
  const PointSeries b{{0, 4}, {3, 0}};
  CHECK(lockstep_euclidean(a, b) == 4.0);
  const PointSeries c{{0, 0}};
  try {
    lockstep_euclidean(a, c);
    FAIL("length mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::LengthMismatch);
  }
}

TEST_CASE("twed symmetric bit for bit") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const auto a = testsupport::random_series(rng, testsupport::random_len(rng, 1, 12));
    const auto b = testsupport::random_series(rng, testsupport::random_len(rng, 1, 12));
    const TwedParams p{std::uniform_real_distribution<double>(0, 20)(rng),
                       std::uniform_real_distribution<double>(0, 20)(rng)};
    CHECK(twed(a, b, p) == twed(b, a, p));
    CHECK(dtw(a, b) == dtw(b, a));
  }
}
