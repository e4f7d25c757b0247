#pragma once

#include "avor/scenario.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace avor::test
{

/// Straight three-lane road, ego in the middle lane at constant speed, one actor that starts
/// in the left lane and drifts towards the ego lane from `start_frame` on.
struct CutInSpec
{
  std::string id{"synthetic"};
  double dt{0.1};
  std::size_t frames{120};
  double ego_speed{12.0};
  double cut_speed{11.0};
  double gap{12.0};  // centre-to-centre x offset of the cut-in at t = 0
  double y0{3.5};
  double v_lat{-0.8};  // m/s, negative moves towards the ego lane from the left
  std::size_t start_frame{40};
  double length{4.6};
  double width{1.9};
  bool neighbours{false};  // adds a lead car and one car in each adjacent lane
  Population population{Population::all_actors};
};

ScenarioTrace make_cutin(const CutInSpec & spec);

/// avor-scenario/1 text of a trace (velocities included, accelerations dropped).
std::string scenario_json(const ScenarioTrace & trace);

/// Shipped data directory.
std::filesystem::path data_dir();
std::filesystem::path scenario_path(const std::string & name);

/// Fresh empty directory under the system temp dir, removed by the destructor.
class TempDir
{
public:
  explicit TempDir(const std::string & tag);
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;
  const std::filesystem::path & path() const { return path_; }

private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path & path, const std::string & text);
std::string read_text(const std::filesystem::path & path);

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }
inline double uniform(std::mt19937_64 & g, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace avor::test
