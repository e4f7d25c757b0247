#include "avor/metrics.hpp"

#include "avor/error.hpp"

#include <algorithm>
#include <cmath>

namespace avor
{

void RatingTrace::validate() const
{
  if (t.empty() || t.size() != srr.size()) {
    throw Error(ErrorCode::validation, "rating: need matching, non-empty t and srr arrays");
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !(srr[k] >= 0.0 && srr[k] <= 10.0)) {
      throw Error(ErrorCode::validation, "rating: srr must lie in [0, 10]");
    }
    if (k > 0 && !(t[k] > t[k - 1])) {
      throw Error(ErrorCode::validation, "rating: timestamps must be strictly increasing");
    }
  }
}

std::vector<double> normalize_risk(std::span<const double> raw, double phase0_mean_srr, double scale)
{
  if (raw.empty()) {
    throw Error(ErrorCode::degenerate, "degenerate trace: empty series");
  }
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double z_min = *lo;
  const double z_max = *hi;
  if (!(z_max > z_min)) {
    throw Error(ErrorCode::degenerate, "degenerate trace: z_max equals z_min");
  }
  const double range = z_max - z_min;
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out[k] = scale * ((raw[k] - z_min) / range) + phase0_mean_srr;
  }
  return out;
}

double hold_value(std::span<const double> t, std::span<const double> v, double q)
{
  if (t.empty() || t.size() != v.size()) {
    throw Error(ErrorCode::invalid_argument, "hold_value: need matching, non-empty series");
  }
  const auto it = std::upper_bound(t.begin(), t.end(), q);
  if (it == t.begin()) return v.front();
  return v[static_cast<std::size_t>(it - t.begin()) - 1];
}

std::vector<double> resample_hold(std::span<const double> t, std::span<const double> v,
                                  std::span<const double> grid_t)
{
  std::vector<double> out;
  out.reserve(grid_t.size());
  for (double q : grid_t) out.push_back(hold_value(t, v, q));
  return out;
}

RatingAggregate aggregate_ratings(std::span<const RatingTrace> ratings, std::span<const double> grid_t)
{
  if (ratings.empty()) {
    throw Error(ErrorCode::invalid_argument, "aggregate_ratings: no rating traces");
  }
  std::vector<std::vector<double>> held;
  held.reserve(ratings.size());
  for (const auto & r : ratings) {
    r.validate();
    held.push_back(resample_hold(r.t, r.srr, grid_t));
  }
  const auto n = static_cast<double>(ratings.size());
  RatingAggregate agg;
  agg.mean.resize(grid_t.size());
  agg.std.resize(grid_t.size());
  for (std::size_t k = 0; k < grid_t.size(); ++k) {
    double sum = 0.0;
    double lo = held.front()[k];
    double hi = lo;
    for (const auto & h : held) {
      sum += h[k];
      lo = std::min(lo, h[k]);
      hi = std::max(hi, h[k]);
    }
    const double mean = std::clamp(sum / n, lo, hi);
    double ss = 0.0;
    for (const auto & h : held) ss += (h[k] - mean) * (h[k] - mean);
    agg.mean[k] = mean;
    agg.std[k] = held.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return agg;
}

namespace
{

double window_rmse(std::span<const double> t, std::span<const double> a, std::span<const double> b, double lo,
                   double hi, const char * name)
{
  double ss = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < lo || t[k] >= hi) continue;
    const double r = a[k] - b[k];
    ss += r * r;
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorCode::out_of_range, std::string("rmse_per_phase: phase ") + name + " window is empty");
  }
  return std::sqrt(ss / static_cast<double>(count));
}

}  // namespace

PhaseRmse rmse_per_phase(std::span<const double> t, std::span<const double> model_norm,
                         std::span<const double> mean_srr, const PhaseSegmentation & seg)
{
  if (t.size() != model_norm.size() || t.size() != mean_srr.size()) {
    throw Error(ErrorCode::invalid_argument, "rmse_per_phase: series must share one time grid");
  }
  PhaseRmse out;
  out.initiation = window_rmse(t, model_norm, mean_srr, seg.t_I_start, seg.t_II_start, "I");
  out.execution = window_rmse(t, model_norm, mean_srr, seg.t_II_start, seg.t_III_start, "II");
  out.completion = window_rmse(t, model_norm, mean_srr, seg.t_III_start, seg.t_III_end, "III");
  return out;
}

double phase0_mean(std::span<const double> t, std::span<const double> v, const PhaseSegmentation & seg)
{
  if (t.empty() || t.size() != v.size()) {
    throw Error(ErrorCode::invalid_argument, "phase0_mean: need matching, non-empty series");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= seg.t_phase0_start && t[k] < seg.t_I_start) {
      sum += v[k];
      ++count;
    }
  }
  // No baseline window when the manoeuvre starts with the trace.
  if (count == 0) return hold_value(t, v, seg.t_I_start);
  return sum / static_cast<double>(count);
}

OnsetResult measure_onset(const RatingTrace & rating, const PhaseSegmentation & seg, double threshold)
{
  rating.validate();
  constexpr double eps = 1e-6;
  if (rating.t.front() > seg.t_phase0_start + eps || rating.t.back() < seg.t_I_start - eps) {
    throw Error(ErrorCode::out_of_range, "detect_onset: phase windows lie outside the rating time span");
  }
  const std::span<const double> t = rating.t;
  const std::span<const double> v = rating.srr;

  OnsetResult r;
  const double span0 = seg.t_I_start - seg.t_phase0_start;
  if (span0 > 0.0) {
    double area = 0.0;
    double q = seg.t_phase0_start;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] <= q) continue;
      if (t[k] >= seg.t_I_start) break;
      area += hold_value(t, v, q) * (t[k] - q);
      q = t[k];
    }
    area += hold_value(t, v, q) * (seg.t_I_start - q);
    r.phase0_mean = area / span0;
  } else {
    r.phase0_mean = hold_value(t, v, seg.t_I_start);
  }

  r.phase1_max = hold_value(t, v, seg.t_I_start);
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] > seg.t_I_start && t[k] < seg.t_II_start) r.phase1_max = std::max(r.phase1_max, v[k]);
  }
  r.delta = r.phase1_max - r.phase0_mean;
  r.onset = r.delta > threshold;
  return r;
}

}  // namespace avor
