#pragma once

#include "avor/metrics.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace avor
{

struct SessionRecord
{
  std::string session_id;
  std::string rater_id;
  std::string scenario_id;
  Population population{Population::objects};
  std::string started_at;  // ISO 8601, UTC
  RatingTrace rating;
  bool completed{false};
  std::filesystem::path file;  // set once completed
};

/// Server-side rating rate; denser uploads are reduced by previous-value hold.
inline constexpr double kRatingPeriod = 0.1;

/// Samples of the hold function on the multiples of `period` spanned by the input.
RatingTrace downsample_hold(const RatingTrace & rating, double period = kRatingPeriod);

/// Rating sessions with one append-only JSON file per completed session under
/// `<data_dir>/ratings`. Safe to use from several threads.
class SessionStore
{
public:
  explicit SessionStore(std::filesystem::path data_dir);

  SessionRecord create(const std::string & rater_id, const std::string & scenario_id, Population population);
  std::optional<SessionRecord> get(const std::string & session_id) const;

  /// Stores the samples and writes the rating file. Throws not_found for an unknown session,
  /// conflict when it is already completed, validation for bad samples.
  SessionRecord complete(const std::string & session_id, const std::vector<RatingSample> & samples);

  /// Completed ratings on disk, optionally only those of one scenario.
  std::vector<RatingTrace> ratings(const std::optional<std::string> & scenario_id = std::nullopt) const;

  const std::filesystem::path & ratings_dir() const { return ratings_dir_; }

private:
  std::filesystem::path ratings_dir_;
  mutable std::mutex mutex_;
  std::map<std::string, SessionRecord> sessions_;
  std::uint64_t counter_{0};
};

}  // namespace avor
