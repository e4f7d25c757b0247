#include "avor/risk_engine.hpp"

#include "avor/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace avor
{

const char * to_string(RiskModel m) noexcept
{
  return m == RiskModel::drf ? "DRF" : "AVOR";
}

std::optional<RiskModel> parse_risk_model(std::string_view s)
{
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "drf") return RiskModel::drf;
  if (lower == "avor") return RiskModel::avor;
  return std::nullopt;
}

const char * to_string(SteeringSource s) noexcept
{
  return s == SteeringSource::trajectory ? "trajectory" : "zero";
}

std::optional<SteeringSource> parse_steering_source(std::string_view s)
{
  if (s == "trajectory") return SteeringSource::trajectory;
  if (s == "zero") return SteeringSource::zero;
  return std::nullopt;
}

void RiskTrace::validate() const
{
  if (t.size() != value.size()) {
    throw Error(ErrorCode::validation, "risk trace: t and value lengths differ");
  }
  for (double v : value) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::validation, "risk trace: values must be finite and >= 0");
  }
}

double evaluate_risk(const GridField & field, const GridField & cost)
{
  if (!(field.spec() == cost.spec())) {
    throw Error(ErrorCode::spec_mismatch, "evaluate_risk: field and cost map are on different grids");
  }
  const auto z = field.values();
  const auto c = cost.values();
  // Neumaier summation
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double term = z[k] * c[k];
    const double next = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - next) + term;
    } else {
      comp += (term - next) + sum;
    }
    sum = next;
  }
  const double res = field.spec().res;
  return (sum + comp) * res * res;
}

std::vector<double> estimate_steering(std::span<const VehicleState> ego, double wheelbase)
{
  const std::size_t n = ego.size();
  std::vector<double> delta(n, 0.0);
  if (n < 3) return delta;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Vec2 a = ego[k - 1].position();
    const Vec2 b = ego[k].position();
    const Vec2 c = ego[k + 1].position();
    const double ab = norm(b - a);
    const double bc = norm(c - b);
    const double ca = norm(a - c);
    const double den = ab * bc * ca;
    if (!(den > 1e-12)) continue;
    const double kappa = 2.0 * cross(b - a, c - b) / den;
    delta[k] = std::atan(wheelbase * kappa);
  }
  delta.front() = delta[1];
  delta.back() = delta[n - 2];
  return delta;
}

void EngineParams::validate() const
{
  drf.validate();
  cost.validate();
  vcc.validate();
  grid.validate();
}

namespace
{

struct FrameContext
{
  const ScenarioTrace & trace;
  const EngineParams & params;
  Population population;
  std::vector<double> steering;
};

FrameFields evaluate_frame(const FrameContext & ctx, std::size_t k)
{
  const auto & trace = ctx.trace;
  const auto & params = ctx.params;
  const VehicleState & ego = trace.ego[k];
  // The field starts abruptly at its origin; keeping that line on a cell edge makes the
  // cell sum a midpoint rule along the path.
  const Vec2 anchor = drf_origin(ego, params.drf) - Vec2{0.5 * params.grid.res, 0.0};
  const GridSpec spec = ego_centered_spec(anchor, params.grid);

  FrameFields out;
  out.detail.steering = ctx.steering[k];
  out.drf = build_drf(ego, out.detail.steering, params.drf, spec);

  const auto actors = scene_actors(trace, k);
  GridField static_layer = build_static_costmap(trace.road, actors, ctx.population, spec, params.cost);

  const VehicleState & cut = trace.cutin()[k];
  out.detail.vcc = compute_vcc(ego, cut, params.vcc);
  bool apply = out.detail.vcc.valid && spec.covers({out.detail.vcc.x, out.detail.vcc.y});
  if (apply && params.vcc.drop_inside_lane && inside_ego_lane(cut, trace.road)) apply = false;
  out.detail.vcc_applied = apply;

  VccPoint applied = out.detail.vcc;
  applied.valid = apply;
  GridField dynamic_layer = build_dynamic_costmap(applied, spec, params.cost, params.vcc.kernel);
  out.costs = compose_costmap(static_layer, dynamic_layer);
  return out;
}

FrameContext make_context(const ScenarioTrace & trace, const EngineParams & params,
                          std::optional<Population> population)
{
  params.validate();
  trace.validate();
  FrameContext ctx{trace, params, population.value_or(trace.population), {}};
  if (params.steering == SteeringSource::trajectory) {
    ctx.steering = estimate_steering(trace.ego, params.drf.wheelbase);
  } else {
    ctx.steering.assign(trace.frame_count(), 0.0);
  }
  return ctx;
}

}  // namespace

FrameFields frame_fields(const ScenarioTrace & trace, std::size_t frame, const EngineParams & params,
                         std::optional<Population> population)
{
  if (frame >= trace.frame_count()) {
    throw Error(ErrorCode::out_of_range, "frame index outside the trace");
  }
  const auto ctx = make_context(trace, params, population);
  return evaluate_frame(ctx, frame);
}

ScenarioRun run_scenario(const ScenarioTrace & trace, std::span<const RiskModel> models,
                         const EngineParams & params, std::optional<Population> population)
{
  if (models.empty()) {
    throw Error(ErrorCode::invalid_argument, "run_scenario: no model requested");
  }
  const auto ctx = make_context(trace, params, population);
  const std::size_t n = trace.frame_count();

  std::vector<double> drf_values(n, 0.0);
  std::vector<double> avor_values(n, 0.0);
  std::vector<FrameDetail> details(n);

  // Frames are independent; each worker writes only its own indices so results do not
  // depend on scheduling.
  unsigned workers = params.threads != 0 ? params.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned w) {
    try {
      for (std::size_t k = w; k < n; k += workers) {
        const FrameFields f = evaluate_frame(ctx, k);
        drf_values[k] = evaluate_risk(f.drf, f.costs.static_layer);
        avor_values[k] = f.detail.vcc_applied ? evaluate_risk(f.drf, f.costs.composed) : drf_values[k];
        details[k] = f.detail;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto & th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ScenarioRun run;
  run.population = ctx.population;
  run.frames = std::move(details);
  const auto times = trace.times();
  for (RiskModel m : models) {
    RiskTrace rt;
    rt.model = m;
    rt.t = times;
    rt.value = m == RiskModel::drf ? drf_values : avor_values;
    rt.scenario_id = trace.id;
    rt.population = ctx.population;
    run.traces.push_back(std::move(rt));
  }
  return run;
}

}  // namespace avor
