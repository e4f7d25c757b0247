#pragma once

#include "avor/geometry.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace avor
{

/// Regular grid in the road frame. Cell (i, j) has its centre at
/// (origin_x + i * res, origin_y + j * res); i runs along x, j along y.
struct GridSpec
{
  double origin_x{0.0};
  double origin_y{0.0};
  double res{0.25};
  std::size_t nx{2};
  std::size_t ny{2};

  void validate() const;

  Vec2 cell_center(std::size_t i, std::size_t j) const
  {
    return {origin_x + static_cast<double>(i) * res, origin_y + static_cast<double>(j) * res};
  }

  /// True if `p` lies inside the area covered by the cells (half a cell beyond the outer centres).
  bool covers(const Vec2 & p) const;

  struct CellIndex
  {
    std::size_t i;
    std::size_t j;
  };
  std::optional<CellIndex> cell_of(const Vec2 & p) const;

  std::size_t size() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }

  bool operator==(const GridSpec &) const = default;
};

/// Extent of the ego-centred grid that is rebuilt every frame.
struct GridExtent
{
  double res{0.25};
  double ahead{100.0};
  double behind{10.0};
  double lateral{12.0};

  void validate() const;
};

/// Grid aligned with the road axes whose cell (0,0) sits `behind` metres behind and
/// `lateral` metres to the right of `anchor`; `anchor` itself is a cell centre.
GridSpec ego_centered_spec(const Vec2 & anchor, const GridExtent & extent);

/// Non-negative scalar field on a GridSpec. Storage is row-major with rows along y.
class GridField
{
public:
  GridField() = default;
  explicit GridField(const GridSpec & spec, double fill = 0.0);

  const GridSpec & spec() const { return spec_; }
  double at(std::size_t i, std::size_t j) const { return values_[spec_.index(i, j)]; }
  double & at(std::size_t i, std::size_t j) { return values_[spec_.index(i, j)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Throws validation error if any value is negative or not finite.
  void validate() const;

  bool operator==(const GridField &) const = default;

private:
  GridSpec spec_{};
  std::vector<double> values_;
};

// CSV: a header line "# origin_x=..,origin_y=..,res=..,nx=..,ny=.." followed by ny rows of nx values.
void write_csv(const GridField & field, std::ostream & out);
GridField read_csv(std::istream & in);

// Binary: "AVGF1", origin_x, origin_y, res (f64), nx, ny (u64), then nx*ny f64 values; little-endian.
void write_binary(const GridField & field, std::ostream & out);
GridField read_binary(std::istream & in);

}  // namespace avor
