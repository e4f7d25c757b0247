#include "avor/grid.hpp"

#include "avor/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace avor
{

void GridSpec::validate() const
{
  if (!(res > 0.0) || !std::isfinite(res)) {
    throw Error(ErrorCode::validation, "grid: res must be positive");
  }
  if (nx < 2 || ny < 2) {
    throw Error(ErrorCode::validation, "grid: nx and ny must be >= 2");
  }
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
    throw Error(ErrorCode::validation, "grid: origin must be finite");
  }
}

bool GridSpec::covers(const Vec2 & p) const
{
  const double half = 0.5 * res;
  const double max_x = origin_x + static_cast<double>(nx - 1) * res;
  const double max_y = origin_y + static_cast<double>(ny - 1) * res;
  return p.x >= origin_x - half && p.x <= max_x + half && p.y >= origin_y - half &&
         p.y <= max_y + half;
}

std::optional<GridSpec::CellIndex> GridSpec::cell_of(const Vec2 & p) const
{
  if (!covers(p)) {
    return std::nullopt;
  }
  const double fi = std::floor((p.x - origin_x) / res + 0.5);
  const double fj = std::floor((p.y - origin_y) / res + 0.5);
  // the far boundary rounds up one past the last cell
  const auto i = static_cast<std::size_t>(std::clamp(fi, 0.0, static_cast<double>(nx - 1)));
  const auto j = static_cast<std::size_t>(std::clamp(fj, 0.0, static_cast<double>(ny - 1)));
  return CellIndex{i, j};
}

void GridExtent::validate() const
{
  if (!(res > 0.0) || !(ahead > 0.0) || behind < 0.0 || !(lateral > 0.0)) {
    throw Error(ErrorCode::validation, "grid extent: res, ahead, lateral must be positive, behind >= 0");
  }
}

GridSpec ego_centered_spec(const Vec2 & anchor, const GridExtent & extent)
{
  extent.validate();
  const auto cells = [&](double length) {
    return static_cast<std::size_t>(std::llround(length / extent.res));
  };
  GridSpec spec;
  spec.res = extent.res;
  spec.origin_x = anchor.x - static_cast<double>(cells(extent.behind)) * extent.res;
  spec.origin_y = anchor.y - static_cast<double>(cells(extent.lateral)) * extent.res;
  spec.nx = cells(extent.behind) + cells(extent.ahead) + 1;
  spec.ny = 2 * cells(extent.lateral) + 1;
  return spec;
}

GridField::GridField(const GridSpec & spec, double fill) : spec_(spec)
{
  spec_.validate();
  values_.assign(spec_.size(), fill);
}

void GridField::validate() const
{
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::validation, "grid field: values must be finite and non-negative");
    }
  }
}

void write_csv(const GridField & field, std::ostream & out)
{
  using detail::format_double;
  const auto & s = field.spec();
  out << "# origin_x=" << format_double(s.origin_x) << ",origin_y=" << format_double(s.origin_y)
      << ",res=" << format_double(s.res) << ",nx=" << s.nx << ",ny=" << s.ny << '\n';
  for (std::size_t j = 0; j < s.ny; ++j) {
    for (std::size_t i = 0; i < s.nx; ++i) {
      if (i) out << ',';
      out << format_double(field.at(i, j));
    }
    out << '\n';
  }
}

GridField read_csv(std::istream & in)
{
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0) {
    throw Error(ErrorCode::parse, "grid csv: missing header line");
  }
  GridSpec spec;
  bool seen[5] = {false, false, false, false, false};
  std::stringstream hs(header.substr(2));
  std::string kv;
  while (std::getline(hs, kv, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::parse, "grid csv: bad header entry '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const auto value = detail::parse_double(std::string_view(kv).substr(eq + 1));
    if (!value) throw Error(ErrorCode::parse, "grid csv: bad value for '" + key + "'");
    if (key == "origin_x") { spec.origin_x = *value; seen[0] = true; }
    else if (key == "origin_y") { spec.origin_y = *value; seen[1] = true; }
    else if (key == "res") { spec.res = *value; seen[2] = true; }
    else if (key == "nx") { spec.nx = static_cast<std::size_t>(*value); seen[3] = true; }
    else if (key == "ny") { spec.ny = static_cast<std::size_t>(*value); seen[4] = true; }
    else throw Error(ErrorCode::parse, "grid csv: unknown header key '" + key + "'");
  }
  for (bool b : seen) {
    if (!b) throw Error(ErrorCode::parse, "grid csv: incomplete header");
  }
  GridField field(spec);
  std::string line;
  for (std::size_t j = 0; j < spec.ny; ++j) {
    if (!std::getline(in, line)) throw Error(ErrorCode::parse, "grid csv: too few rows");
    std::stringstream ls(line);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ls, cell, ',')) {
      if (i >= spec.nx) throw Error(ErrorCode::parse, "grid csv: too many columns");
      const auto v = detail::parse_double(cell);
      if (!v) throw Error(ErrorCode::parse, "grid csv: bad number '" + cell + "'");
      field.at(i++, j) = *v;
    }
    if (i != spec.nx) throw Error(ErrorCode::parse, "grid csv: too few columns");
  }
  return field;
}

namespace
{

constexpr char kMagic[5] = {'A', 'V', 'G', 'F', '1'};

template <typename T>
void put_le(std::ostream & out, T value)
{
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  unsigned char bytes[8];
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xffu);
  out.write(reinterpret_cast<const char *>(bytes), 8);
}

template <typename T>
T get_le(std::istream & in)
{
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char *>(bytes), 8)) {
    throw Error(ErrorCode::parse, "grid binary: truncated");
  }
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_binary(const GridField & field, std::ostream & out)
{
  const auto & s = field.spec();
  out.write(kMagic, sizeof(kMagic));
  put_le(out, s.origin_x);
  put_le(out, s.origin_y);
  put_le(out, s.res);
  put_le(out, static_cast<std::uint64_t>(s.nx));
  put_le(out, static_cast<std::uint64_t>(s.ny));
  for (double v : field.values()) put_le(out, v);
}

GridField read_binary(std::istream & in)
{
  char magic[5];
  if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
    throw Error(ErrorCode::parse, "grid binary: bad magic");
  }
  GridSpec spec;
  spec.origin_x = get_le<double>(in);
  spec.origin_y = get_le<double>(in);
  spec.res = get_le<double>(in);
  spec.nx = static_cast<std::size_t>(get_le<std::uint64_t>(in));
  spec.ny = static_cast<std::size_t>(get_le<std::uint64_t>(in));
  GridField field(spec);
  for (double & v : field.values()) v = get_le<double>(in);
  return field;
}

}  // namespace avor
