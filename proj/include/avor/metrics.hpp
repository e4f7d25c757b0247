#pragma once

#include "avor/phases.hpp"
#include "avor/scenario.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace avor
{

/// Inverse time-to-collision and inverse time headway per frame. Undefined samples hold 0 and
/// have their mask entry cleared.
struct SurrogateTrace
{
  std::vector<double> t;
  std::vector<double> ttc_inv;
  std::vector<double> thw_inv;
  std::vector<std::uint8_t> ttc_valid;
  std::vector<std::uint8_t> thw_valid;
  std::vector<double> gap;  // bumper-to-bumper gap to the target, 0 when there is none
};

/// Gap target is the cut-in actor once it laterally overlaps the ego lane, otherwise the
/// nearest vehicle ahead inside the ego lane.
SurrogateTrace surrogate_metrics(const ScenarioTrace & trace);

struct RatingSample
{
  double t{0.0};
  double srr{0.0};
};

/// Subjective risk ratings of one rater for one condition, on the 0..10 scale.
struct RatingTrace
{
  std::string rater_id;
  std::string scenario_id;
  Population population{Population::objects};
  std::vector<double> t;
  std::vector<double> srr;

  void validate() const;
};

/// Default scale makes the normalised ceiling 10.
inline double default_normalization_scale(double phase0_mean_srr) { return 10.0 - phase0_mean_srr; }

/// scale * (z - z_min) / (z_max - z_min) + phase0_mean_srr, min and max over the whole series.
std::vector<double> normalize_risk(std::span<const double> raw, double phase0_mean_srr, double scale);

/// Value of the step function defined by (t, v) at time q: the last sample at or before q; the
/// first sample before the series starts.
double hold_value(std::span<const double> t, std::span<const double> v, double q);
std::vector<double> resample_hold(std::span<const double> t, std::span<const double> v,
                                  std::span<const double> grid_t);

struct RatingAggregate
{
  std::vector<double> mean;
  std::vector<double> std;  // sample standard deviation, 0 for a single rater
};

RatingAggregate aggregate_ratings(std::span<const RatingTrace> ratings, std::span<const double> grid_t);

struct PhaseRmse
{
  double initiation{0.0};
  double execution{0.0};
  double completion{0.0};
};

/// RMSE between two series on the same grid over the half-open windows of phases I, II, III.
PhaseRmse rmse_per_phase(std::span<const double> t, std::span<const double> model_norm,
                         std::span<const double> mean_srr, const PhaseSegmentation & seg);

/// Mean of the series over samples in [t_phase0_start, t_I_start).
double phase0_mean(std::span<const double> t, std::span<const double> v, const PhaseSegmentation & seg);

struct OnsetResult
{
  double phase0_mean{0.0};
  double phase1_max{0.0};
  double delta{0.0};
  bool onset{false};
};

/// Rise of a held rating between its time-weighted phase-0 mean and its phase-I maximum.
OnsetResult measure_onset(const RatingTrace & rating, const PhaseSegmentation & seg, double threshold);
inline bool detect_onset(const RatingTrace & rating, const PhaseSegmentation & seg, double threshold = 0.5)
{
  return measure_onset(rating, seg, threshold).onset;
}

// avor-rating/1 documents
RatingTrace parse_rating(std::string_view json_text);
std::string rating_to_json(const RatingTrace & rating, const std::map<std::string, std::string> & extra = {});

}  // namespace avor
