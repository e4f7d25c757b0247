#include "avor/session.hpp"

#include "avor/error.hpp"
#include "avor/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <random>

namespace avor
{

RatingTrace downsample_hold(const RatingTrace & rating, double period)
{
  rating.validate();
  const double first = std::ceil(rating.t.front() / period - 1e-9);
  const double last = std::floor(rating.t.back() / period + 1e-9);
  if (last < first) return rating;

  RatingTrace out = rating;
  out.t.clear();
  out.srr.clear();
  for (double k = first; k <= last; k += 1.0) {
    // Round to the decimal grid so that 10 Hz input keeps its exact timestamps.
    const double q = std::round(k * period * 1e9) / 1e9;
    out.t.push_back(q);
    out.srr.push_back(hold_value(rating.t, rating.srr, q + 1e-9));
  }
  return out;
}

namespace
{

std::string utc_now()
{
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string safe_name(const std::string & s)
{
  std::string out;
  for (char ch : s) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                    ch == '-' || ch == '_';
    out += ok ? ch : '_';
  }
  return out.empty() ? "_" : out;
}

const char * population_tag(Population p)
{
  switch (p) {
    case Population::objects: return "O";
    case Population::all_actors: return "A";
    case Population::all_actors_road: return "AR";
  }
  return "X";
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path data_dir)
: ratings_dir_(std::move(data_dir) / "ratings")
{
  std::error_code ec;
  std::filesystem::create_directories(ratings_dir_, ec);
  if (ec) {
    throw Error(ErrorCode::io, "cannot create ratings directory '" + ratings_dir_.string() + "': " + ec.message());
  }
}

SessionRecord SessionStore::create(const std::string & rater_id, const std::string & scenario_id,
                                   Population population)
{
  if (rater_id.empty() || scenario_id.empty()) {
    throw Error(ErrorCode::validation, "session: rater_id and scenario_id are required");
  }
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex_);
  SessionRecord rec;
  char id[40];
  std::snprintf(id, sizeof(id), "s%04llx%012llx", static_cast<unsigned long long>(++counter_ & 0xffff),
                static_cast<unsigned long long>(rng() & 0xffffffffffffULL));
  rec.session_id = id;
  rec.rater_id = rater_id;
  rec.scenario_id = scenario_id;
  rec.population = population;
  rec.started_at = utc_now();
  rec.rating.rater_id = rater_id;
  rec.rating.scenario_id = scenario_id;
  rec.rating.population = population;
  sessions_.emplace(rec.session_id, rec);
  return rec;
}

std::optional<SessionRecord> SessionStore::get(const std::string & session_id) const
{
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

SessionRecord SessionStore::complete(const std::string & session_id, const std::vector<RatingSample> & samples)
{
  RatingTrace rating;
  std::filesystem::path path;
  std::string document;
  {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::not_found, "unknown session '" + session_id + "'");
    SessionRecord & rec = it->second;
    if (rec.completed) throw Error(ErrorCode::conflict, "session '" + session_id + "' is already completed");
    if (samples.empty()) throw Error(ErrorCode::validation, "session: at least one rating sample is required");

    rating = rec.rating;
    for (const auto & s : samples) {
      rating.t.push_back(s.t);
      rating.srr.push_back(s.srr);
    }
    rating = downsample_hold(rating);
    path = ratings_dir_ / (safe_name(rec.scenario_id) + "_" + population_tag(rec.population) + "_" +
                           safe_name(rec.rater_id) + "_" + rec.session_id + ".json");
    document = rating_to_json(rating, {{"session_id", rec.session_id}, {"started_at", rec.started_at}});
    // Claim the session before releasing the lock so a second upload sees the conflict.
    rec.completed = true;
  }

  // "x": fail instead of replacing an existing file
  std::FILE * f = std::fopen(path.c_str(), "wx");
  bool ok = f != nullptr && std::fwrite(document.data(), 1, document.size(), f) == document.size();
  if (f != nullptr) ok = std::fclose(f) == 0 && ok;

  std::lock_guard lock(mutex_);
  SessionRecord & rec = sessions_.at(session_id);
  if (!ok) {
    rec.completed = false;
    throw Error(ErrorCode::io, "cannot write rating file '" + path.string() + "'");
  }
  rec.rating = std::move(rating);
  rec.file = path;
  return rec;
}

std::vector<RatingTrace> SessionStore::ratings(const std::optional<std::string> & scenario_id) const
{
  std::lock_guard lock(mutex_);
  auto all = load_ratings(ratings_dir_);
  if (!scenario_id) return all;
  std::vector<RatingTrace> out;
  for (auto & r : all) {
    if (r.scenario_id == *scenario_id) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace avor
