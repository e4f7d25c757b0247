#include "avor/error.hpp"
#include "avor/metrics.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <optional>

namespace avor
{
namespace
{

std::vector<double> grid(double t0, double t1, double dt)
{
  std::vector<double> t;
  for (int k = 0; t0 + k * dt <= t1 + 1e-9; ++k) t.push_back(t0 + k * dt);
  return t;
}

RatingTrace rating(const std::vector<double> & t, const std::vector<double> & srr, const std::string & id = "r")
{
  RatingTrace r;
  r.rater_id = id;
  r.scenario_id = "hrs";
  r.t = t;
  r.srr = srr;
  return r;
}

TEST(Normalize, DirectExample)
{
  const std::vector<double> raw{0.0, 5.0, 10.0};
  const auto n = normalize_risk(raw, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(n[0], 2.0);
  EXPECT_DOUBLE_EQ(n[1], 2.5);
  EXPECT_DOUBLE_EQ(n[2], 3.0);
  EXPECT_DOUBLE_EQ(default_normalization_scale(4.0), 6.0);
}

TEST(Normalize, BoundsOrderAndAffineInvariance)
{
  auto g = test::rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> raw(50);
    for (double & v : raw) v = test::uniform(g, 0.0, 1e5);
    const double c = test::uniform(g, 0.0, 8.0);
    const double scale = default_normalization_scale(c);
    const auto n = normalize_risk(raw, c, scale);
    for (std::size_t k = 0; k < raw.size(); ++k) {
      EXPECT_GE(n[k], c);
      EXPECT_LE(n[k], c + scale);
      for (std::size_t m = 0; m < raw.size(); ++m) {
        if (raw[k] < raw[m]) {
          ASSERT_LE(n[k], n[m]);
        }
      }
    }
    const double a = test::uniform(g, 0.1, 100.0);
    const double b = test::uniform(g, -50.0, 50.0);
    std::vector<double> moved(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) moved[k] = a * raw[k] + b;
    const auto m = normalize_risk(moved, c, scale);
    for (std::size_t k = 0; k < raw.size(); ++k) EXPECT_NEAR(m[k], n[k], 1e-12);
  }
}

TEST(Normalize, DegenerateTraceIsRejected)
{
  try {
    normalize_risk(std::vector<double>(10, 3.0), 5.0, 5.0);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate);
    EXPECT_NE(std::string(e.what()).find("degenerate trace"), std::string::npos);
  }
  EXPECT_THROW(normalize_risk(std::vector<double>{}, 5.0, 5.0), Error);
}

TEST(Hold, PreviousValueSemantics)
{
  const std::vector<double> t{1.0, 2.0, 3.5};
  const std::vector<double> v{4.0, 6.0, 2.0};
  EXPECT_EQ(hold_value(t, v, 0.5), 4.0);
  EXPECT_EQ(hold_value(t, v, 1.0), 4.0);
  EXPECT_EQ(hold_value(t, v, 1.99), 4.0);
  EXPECT_EQ(hold_value(t, v, 2.0), 6.0);
  EXPECT_EQ(hold_value(t, v, 9.0), 2.0);
  const auto r = resample_hold(t, v, std::vector<double>{0.0, 2.5, 4.0});
  EXPECT_EQ(r, (std::vector<double>{4.0, 6.0, 2.0}));
}

TEST(Aggregate, SingletonAndTwoRaters)
{
  const auto t = grid(0.0, 2.0, 0.1);
  const auto one = aggregate_ratings(std::vector{rating({0.0, 1.0}, {3.0, 7.0})}, t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_EQ(one.mean[k], t[k] < 1.0 ? 3.0 : 7.0);
    EXPECT_EQ(one.std[k], 0.0);
  }
  const auto two = aggregate_ratings(std::vector{rating({0.0}, {3.0}), rating({0.0}, {5.0})}, t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_DOUBLE_EQ(two.mean[k], 4.0);
    EXPECT_DOUBLE_EQ(two.std[k], std::sqrt(2.0));
  }
  EXPECT_THROW(aggregate_ratings(std::vector<RatingTrace>{}, t), Error);
}

TEST(Aggregate, MatchesPerTimestampOracle)
{
  auto g = test::rng(3);
  const auto t = grid(0.0, 10.0, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<RatingTrace> raters;
    const int n = 2 + trial % 5;
    for (int r = 0; r < n; ++r) {
      std::vector<double> ts{0.0};
      std::vector<double> vs{std::round(test::uniform(g, 0, 10) * 10) / 10};
      while (ts.back() < 9.0) {
        ts.push_back(ts.back() + test::uniform(g, 0.05, 2.0));
        vs.push_back(std::round(test::uniform(g, 0, 10) * 10) / 10);
      }
      raters.push_back(rating(ts, vs));
    }
    const auto agg = aggregate_ratings(raters, t);
    for (std::size_t k = 0; k < t.size(); ++k) {
      double sum = 0.0;
      double lo = 10.0;
      double hi = 0.0;
      std::vector<double> vals;
      for (const auto & r : raters) {
        // linear scan instead of a binary search
        double held = r.srr.front();
        for (std::size_t m = 0; m < r.t.size(); ++m) {
          if (r.t[m] <= t[k]) held = r.srr[m];
        }
        vals.push_back(held);
        sum += held;
        lo = std::min(lo, held);
        hi = std::max(hi, held);
      }
      const double mean = sum / n;
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      EXPECT_NEAR(agg.mean[k], mean, 1e-12);
      EXPECT_NEAR(agg.std[k], std::sqrt(ss / (n - 1)), 1e-12);
      EXPECT_GE(agg.mean[k], lo);
      EXPECT_LE(agg.mean[k], hi);
    }
  }
}

const PhaseSegmentation kSeg{2.0, 4.0, 6.0, 8.5, 9.5};

TEST(Rmse, IdenticalAndConstantOffset)
{
  const auto t = grid(0.0, 12.0, 0.1);
  std::vector<double> a(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) a[k] = 5.0 + std::sin(t[k]);
  const auto same = rmse_per_phase(t, a, a, kSeg);
  EXPECT_EQ(same.initiation, 0.0);
  EXPECT_EQ(same.execution, 0.0);
  EXPECT_EQ(same.completion, 0.0);
  std::vector<double> b = a;
  for (double & v : b) v -= 0.75;
  const auto off = rmse_per_phase(t, a, b, kSeg);
  EXPECT_NEAR(off.initiation, 0.75, 1e-12);
  EXPECT_NEAR(off.execution, 0.75, 1e-12);
  EXPECT_NEAR(off.completion, 0.75, 1e-12);
}

TEST(Rmse, MatchesTwoPassOracleAndIsSymmetric)
{
  auto g = test::rng(4);
  const auto t = grid(0.0, 12.0, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(t.size());
    std::vector<double> b(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
      a[k] = test::uniform(g, 0, 10);
      b[k] = test::uniform(g, 0, 10);
    }
    const auto r = rmse_per_phase(t, a, b, kSeg);
    const auto rs = rmse_per_phase(t, b, a, kSeg);
    EXPECT_EQ(r.initiation, rs.initiation);
    const auto oracle = [&](double lo, double hi) {
      std::vector<double> sq;
      for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= lo && t[k] < hi) sq.push_back((a[k] - b[k]) * (a[k] - b[k]));
      }
      double mean = 0.0;
      for (double v : sq) mean += v / static_cast<double>(sq.size());
      return std::sqrt(mean);
    };
    EXPECT_NEAR(r.initiation, oracle(4.0, 6.0), 1e-12);
    EXPECT_NEAR(r.execution, oracle(6.0, 8.5), 1e-12);
    EXPECT_NEAR(r.completion, oracle(8.5, 9.5), 1e-12);
  }
}

TEST(Rmse, EmptyWindowIsAnError)
{
  const auto t = grid(0.0, 5.0, 0.1);
  const std::vector<double> a(t.size(), 1.0);
  try {
    rmse_per_phase(t, a, a, kSeg);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_range);
  }
}

TEST(Onset, FlatAndStep)
{
  const auto t = grid(0.0, 12.0, 0.1);
  EXPECT_FALSE(detect_onset(rating(t, std::vector<double>(t.size(), 5.0)), kSeg));
  const auto step = rating({0.0, 4.5}, {2.0, 3.0});
  const auto r = measure_onset(step, kSeg, 0.5);
  EXPECT_TRUE(r.onset);
  EXPECT_DOUBLE_EQ(r.delta, 1.0);
}

TEST(Onset, TimeWeightedBaselineAndShiftInvariance)
{
  // 2.0 for 1.5 s then 4.0 for 0.5 s of the 2 s baseline; 4.2 reached in phase I
  const auto r = rating({0.0, 3.5, 5.0, 7.0}, {2.0, 4.0, 4.2, 9.0});
  const auto m = measure_onset(r, kSeg, 0.5);
  EXPECT_NEAR(m.phase0_mean, 2.5, 1e-12);
  EXPECT_DOUBLE_EQ(m.phase1_max, 4.2);
  EXPECT_TRUE(m.onset);
  auto shifted = r;
  for (double & v : shifted.srr) v -= 1.5;
  shifted.srr.back() = 7.5;
  const auto s = measure_onset(shifted, kSeg, 0.5);
  EXPECT_NEAR(s.delta, m.delta, 1e-12);
}

TEST(Onset, RatingMustCoverTheWindows)
{
  try {
    measure_onset(rating({3.0, 5.0}, {5.0, 6.0}), kSeg, 0.5);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_range);
  }
  EXPECT_THROW(measure_onset(rating({0.0, 1.0}, {5.0, 6.0}), kSeg, 0.5), Error);
}

TEST(Phase0Mean, SampleMeanOverBaseline)
{
  const auto t = grid(0.0, 6.0, 0.5);
  std::vector<double> v(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) v[k] = t[k];
  // samples 2.0, 2.5, 3.0, 3.5
  EXPECT_DOUBLE_EQ(phase0_mean(t, v, kSeg), 2.75);
  const PhaseSegmentation at_start{0.0, 0.0, 1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(phase0_mean(t, v, at_start), 0.0);
}

TEST(RatingJson, RoundTripAndSchemaErrors)
{
  auto r = rating({0.0, 0.1, 0.2}, {5.0, 5.5, 6.1});
  r.population = Population::all_actors_road;
  const std::string text = rating_to_json(r, {{"session_id", "s1"}});
  const auto back = parse_rating(text);
  EXPECT_EQ(back.rater_id, r.rater_id);
  EXPECT_EQ(back.population, Population::all_actors_road);
  EXPECT_EQ(back.t, r.t);
  EXPECT_EQ(back.srr, r.srr);

  const auto code = [](const std::string & s) -> std::optional<ErrorCode> {
    try {
      parse_rating(s);
    } catch (const Error & e) {
      return e.code();
    }
    return std::nullopt;
  };
  EXPECT_EQ(code("[1"), ErrorCode::parse);
  EXPECT_EQ(code(R"({"rater_id":"a","scenario_id":"s","population":"O","samples":[],"x":1})"), ErrorCode::parse);
  EXPECT_EQ(code(R"({"rater_id":"a","scenario_id":"s","population":"B","samples":[{"t":0,"srr":1}]})"),
            ErrorCode::parse);
  EXPECT_EQ(code(R"({"rater_id":"a","scenario_id":"s","population":"O","samples":[{"t":0}]})"), ErrorCode::parse);
  EXPECT_EQ(code(R"({"rater_id":"a","scenario_id":"s","population":"O","samples":[{"t":0,"srr":11}]})"),
            ErrorCode::validation);
  EXPECT_EQ(code(R"({"rater_id":"a","scenario_id":"s","population":"O","samples":[{"t":1,"srr":1},{"t":1,"srr":2}]})"),
            ErrorCode::validation);
  EXPECT_EQ(code(R"({"schema":"avor-rating/2","rater_id":"a","scenario_id":"s","population":"O","samples":[]})"),
            ErrorCode::parse);
}

}  // namespace
}  // namespace avor
