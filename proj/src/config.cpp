#include "avor/config.hpp"

#include "avor/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace avor
{

void Config::validate() const
{
  engine.validate();
  kinematics.validate();
  phases.validate();
  if (!(normalize.phase0_srr >= 0.0 && normalize.phase0_srr <= 10.0)) {
    throw Error(ErrorCode::validation, "normalize.phase0_srr must lie in [0, 10]");
  }
  if (normalize.scale && !(*normalize.scale > 0.0)) {
    throw Error(ErrorCode::validation, "normalize.scale must be positive");
  }
}

EvalOptions Config::eval_options() const
{
  EvalOptions o;
  o.phases = phases;
  o.normalize = normalize;
  o.onset_threshold = onset_threshold;
  return o;
}

namespace
{

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char * expected)
{
  throw Error(ErrorCode::parse,
              "config: '" + std::string(key) + "' expects " + expected + ", got '" + std::string(value) + "'");
}

std::string unquote(std::string_view v)
{
  v = detail::trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    v = v.substr(1, v.size() - 2);
  }
  return std::string(v);
}

double as_number(std::string_view key, std::string_view v)
{
  const auto d = detail::parse_double(unquote(v));
  if (!d) bad_value(key, v, "a number");
  return *d;
}

bool as_bool(std::string_view key, std::string_view v)
{
  const std::string s = unquote(v);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  bad_value(key, v, "true or false");
}

unsigned as_count(std::string_view key, std::string_view v)
{
  const double d = as_number(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 1e6) bad_value(key, v, "a non-negative integer");
  return static_cast<unsigned>(d);
}

struct Entry
{
  const char * key;
  std::function<void(Config &, std::string_view, std::string_view)> set;
  std::function<std::string(const Config &)> get;
};

#define AVOR_NUMBER(name, field)                                                                 \
  Entry                                                                                          \
  {                                                                                              \
    name, [](Config & c, std::string_view k, std::string_view v) { c.field = as_number(k, v); }, \
      [](const Config & c) { return detail::format_double(c.field); }                            \
  }

const std::vector<Entry> & entries()
{
  static const std::vector<Entry> table = {
    AVOR_NUMBER("drf.t_la", engine.drf.t_la),
    AVOR_NUMBER("drf.p_height", engine.drf.p_height),
    AVOR_NUMBER("drf.m_width", engine.drf.m_width),
    AVOR_NUMBER("drf.c_width", engine.drf.c_width),
    AVOR_NUMBER("drf.k_steer", engine.drf.k_steer),
    AVOR_NUMBER("drf.wheelbase", engine.drf.wheelbase),
    Entry{"drf.origin",
          [](Config & c, std::string_view k, std::string_view v) {
            const auto o = parse_drf_origin(unquote(v));
            if (!o) bad_value(k, v, "\"front\" or \"cg\"");
            c.engine.drf.origin = *o;
          },
          [](const Config & c) { return "\"" + std::string(to_string(c.engine.drf.origin)) + "\""; }},
    AVOR_NUMBER("grid.res", engine.grid.res),
    AVOR_NUMBER("grid.ahead", engine.grid.ahead),
    AVOR_NUMBER("grid.behind", engine.grid.behind),
    AVOR_NUMBER("grid.lateral", engine.grid.lateral),
    AVOR_NUMBER("cost.car", engine.cost.cost_car),
    AVOR_NUMBER("cost.offroad", engine.cost.cost_offroad),
    AVOR_NUMBER("cost.lane_marking", engine.cost.cost_lane_marking),
    AVOR_NUMBER("cost.building", engine.cost.cost_building),
    AVOR_NUMBER("cost.tree", engine.cost.cost_tree),
    AVOR_NUMBER("cost.marking_width", engine.cost.marking_width),
    AVOR_NUMBER("vcc.v_lat_min", engine.vcc.v_lat_min),
    Entry{"vcc.kernel",
          [](Config & c, std::string_view k, std::string_view v) {
            const auto kern = parse_vcc_kernel(unquote(v));
            if (!kern) bad_value(k, v, "\"point\" or \"footprint\"");
            c.engine.vcc.kernel = *kern;
          },
          [](const Config & c) { return "\"" + std::string(to_string(c.engine.vcc.kernel)) + "\""; }},
    Entry{"vcc.drop_inside_lane",
          [](Config & c, std::string_view k, std::string_view v) { c.engine.vcc.drop_inside_lane = as_bool(k, v); },
          [](const Config & c) { return std::string(c.engine.vcc.drop_inside_lane ? "true" : "false"); }},
    AVOR_NUMBER("phases.v_lat_init", phases.v_lat_init),
    AVOR_NUMBER("phases.sustain", phases.sustain),
    AVOR_NUMBER("phases.ttc_safe", phases.ttc_safe),
    AVOR_NUMBER("phases.phase0_length", phases.phase0_length),
    Entry{"kinematics.smoothing_window",
          [](Config & c, std::string_view k, std::string_view v) {
            c.kinematics.smoothing_window = static_cast<int>(as_count(k, v));
          },
          [](const Config & c) { return std::to_string(c.kinematics.smoothing_window); }},
    Entry{"engine.threads",
          [](Config & c, std::string_view k, std::string_view v) { c.engine.threads = as_count(k, v); },
          [](const Config & c) { return std::to_string(c.engine.threads); }},
    Entry{"engine.steering",
          [](Config & c, std::string_view k, std::string_view v) {
            const auto s = parse_steering_source(unquote(v));
            if (!s) bad_value(k, v, "\"trajectory\" or \"zero\"");
            c.engine.steering = *s;
          },
          [](const Config & c) { return "\"" + std::string(to_string(c.engine.steering)) + "\""; }},
    AVOR_NUMBER("normalize.phase0_srr", normalize.phase0_srr),
    Entry{"normalize.scale",
          [](Config & c, std::string_view k, std::string_view v) {
            const std::string s = unquote(v);
            if (s == "auto") {
              c.normalize.scale.reset();
            } else {
              c.normalize.scale = as_number(k, v);
            }
          },
          [](const Config & c) {
            return c.normalize.scale ? detail::format_double(*c.normalize.scale) : std::string("\"auto\"");
          }},
    AVOR_NUMBER("eval.onset_threshold", onset_threshold),
  };
  return table;
}

#undef AVOR_NUMBER

std::string strip_comment(std::string_view line)
{
  char quote = 0;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quote != 0) {
      if (ch == quote) quote = 0;
    } else if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == '#') {
      return std::string(line.substr(0, k));
    }
  }
  return std::string(line);
}

}  // namespace

void set_config_value(Config & config, std::string_view dotted_key, std::string_view value)
{
  for (const auto & e : entries()) {
    if (dotted_key == e.key) {
      e.set(config, dotted_key, value);
      return;
    }
  }
  throw Error(ErrorCode::parse, "config: unknown key '" + std::string(dotted_key) + "'");
}

std::vector<std::string> config_keys()
{
  std::vector<std::string> keys;
  for (const auto & e : entries()) keys.emplace_back(e.key);
  return keys;
}

void apply_config_text(Config & config, std::string_view text)
{
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string stripped = strip_comment(raw);
    const std::string_view line = detail::trim(stripped);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::parse, where + ": unterminated section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::parse, where + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw Error(ErrorCode::parse, where + ": expected key = value");
    const std::string dotted = section.empty() ? key : section + "." + key;
    try {
      set_config_value(config, dotted, value);
    } catch (const Error & e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
}

Config load_config(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Config config;
  apply_config_text(config, buf.str());
  return config;
}

void apply_env_overrides(Config & config, const EnvLookup & lookup)
{
  for (const auto & e : entries()) {
    std::string name = std::string("AVOR_") + e.key;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) {
      return ch == '.' ? '_' : static_cast<char>(std::toupper(ch));
    });
    if (const auto v = lookup(name)) {
      try {
        e.set(config, e.key, *v);
      } catch (const Error & err) {
        throw Error(err.code(), name + ": " + err.what());
      }
    }
  }
}

void apply_env_overrides(Config & config)
{
  apply_env_overrides(config, [](const std::string & name) -> std::optional<std::string> {
    const char * v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  });
}

std::string config_to_text(const Config & config)
{
  std::string out;
  std::string section;
  for (const auto & e : entries()) {
    const std::string_view key = e.key;
    const auto dot = key.find('.');
    const std::string_view sec = key.substr(0, dot);
    if (sec != section) {
      if (!out.empty()) out += '\n';
      section = std::string(sec);
      out += "[" + section + "]\n";
    }
    out += std::string(key.substr(dot + 1)) + " = " + e.get(config) + "\n";
  }
  return out;
}

}  // namespace avor
