#include "tem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "errors.hpp"

namespace temcodec {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::constant_bias: return "conv";
    case Scheme::variable_bias: return "vb";
    case Scheme::linear_bias: return "lb";
  }
  throw std::invalid_argument("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "conv") return Scheme::constant_bias;
  if (name == "vb") return Scheme::variable_bias;
  if (name == "lb") return Scheme::linear_bias;
  throw std::invalid_argument("unknown scheme name: " + name);
}

void ConstantBiasParams::validate() const {
  require(delta_c > 0.0, "ConstantBiasParams: delta_c must be positive");
  require(amp_bound >= 0.0, "ConstantBiasParams: amp_bound must be non-negative");
  require(bias > amp_bound, "ConstantBiasParams: bias must exceed amp_bound");
}

void VariableBiasParams::validate() const {
  require(delta_v > 0.0, "VariableBiasParams: delta_v must be positive");
  require(epsilon > 0.0, "VariableBiasParams: epsilon must be positive");
}

double VariableBiasParams::t_max() const {
  return std::sqrt(2.0 * delta_v / epsilon);
}

void LinearBiasParams::validate() const {
  require(delta > 0.0, "LinearBiasParams: delta must be positive");
  require(mu > 0.0, "LinearBiasParams: mu must be positive");
  require(epsilon > 0.0, "LinearBiasParams: epsilon must be positive");
  require(t_nyq > 0.0, "LinearBiasParams: t_nyq must be positive");
  require(alpha > 0.0 && alpha < beta, "LinearBiasParams: need 0 < alpha < beta");
  require(beta <= 1.0 + 1e-9, "LinearBiasParams: beta must not exceed 1");
  require(std::fabs(delta - mu * beta * t_nyq) <= 1e-9 * delta,
          "LinearBiasParams: delta != mu * beta * t_nyq");
}

LinearBiasParams LinearBiasParams::from_thresholds(double delta, double mu,
                                                   double omega0,
                                                   double amp_bound) {
  require(delta > 0.0 && mu > 0.0, "from_thresholds: thresholds must be positive");
  const double t = nyquist_period(omega0);
  const double eps = slope_bound(omega0, amp_bound);
  require(eps > 0.0, "from_thresholds: zero slope bound");
  LinearBiasParams p;
  p.delta = delta;
  p.mu = mu;
  p.epsilon = eps;
  p.t_nyq = t;
  p.beta = delta / (mu * t);
  require(p.beta <= 1.0 + 1e-9,
          "from_thresholds: delta / mu exceeds the Nyquist period");
  p.alpha = lb_interval_bounds(p).t_min / t;
  return p;
}

LinearBiasParams lb_design(double alpha, double beta, double omega0,
                           double amp_bound) {
  require(alpha > 0.0, "lb_design: alpha must be positive");
  require(alpha < beta, "lb_design: alpha must be below beta");
  require(beta <= 1.0, "lb_design: beta must not exceed 1");
  require(amp_bound > 0.0, "lb_design: amp_bound must be positive");
  const double t = nyquist_period(omega0);
  const double eps = slope_bound(omega0, amp_bound);
  LinearBiasParams p;
  p.epsilon = eps;
  p.t_nyq = t;
  p.alpha = alpha;
  p.beta = beta;
  p.delta = eps * alpha * beta * t * t * (beta + alpha) / (beta - alpha);
  p.mu = eps * alpha * t * (beta + alpha) / (beta - alpha);
  return p;
}

IntervalBounds lb_interval_bounds(const LinearBiasParams& p) {
  require(p.delta > 0.0 && p.mu > 0.0 && p.epsilon > 0.0,
          "lb_interval_bounds: thresholds and epsilon must be positive");
  const double t_max = p.delta / p.mu;
  // Worst-case previous interval is maximal: t_prev = beta * t_nyq = t_max.
  const double s = p.epsilon * t_max + p.mu;
  const double t_min =
      (-s + std::sqrt(s * s + 4.0 * p.epsilon * p.delta)) / (2.0 * p.epsilon);
  return {t_min, t_max};
}

IntervalBounds vb_interval_bounds(const VariableBiasParams& p) {
  p.validate();
  const double t_max = p.t_max();
  return {(std::sqrt(5.0) - 2.0) * t_max, t_max};
}

IntervalBounds conv_interval_bounds(const ConstantBiasParams& p) {
  p.validate();
  return {p.delta_c / (p.bias + p.amp_bound), p.delta_c / (p.bias - p.amp_bound)};
}

Scheme scheme_of(const SchemeParams& p) {
  return static_cast<Scheme>(static_cast<int>(p.index()));
}

IntervalBounds interval_bounds(const SchemeParams& p) {
  return std::visit(
      [](const auto& v) -> IntervalBounds {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantBiasParams>)
          return conv_interval_bounds(v);
        else if constexpr (std::is_same_v<T, VariableBiasParams>)
          return vb_interval_bounds(v);
        else
          return lb_interval_bounds(v);
      },
      p);
}

double threshold_of(const SchemeParams& p) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantBiasParams>) return v.delta_c;
        else if constexpr (std::is_same_v<T, VariableBiasParams>) return v.delta_v;
        else return v.delta;
      },
      p);
}

void validate(const SchemeParams& p) {
  std::visit([](const auto& v) { v.validate(); }, p);
}

BiasSegment lb_bias(const BiasState& state, const LinearBiasParams& p) {
  return {p.epsilon,
          p.mu + 0.5 * p.epsilon * state.t_prev - state.fhat_prev};
}

double running_average(double delta, double t_prev, double bias_integral) {
  require(t_prev > 0.0, "running_average: t_prev must be positive");
  return (delta - bias_integral) / t_prev;
}

std::string FiringRecord::to_json() const {
  nlohmann::json j;
  j["scheme"] = scheme_name(scheme);
  j["t_first"] = t_first;
  j["intervals"] = intervals;
  auto& trace = j["bias_trace"] = nlohmann::json::array();
  for (const auto& b : bias_trace)
    trace.push_back({{"slope", b.slope}, {"offset", b.offset}});
  return j.dump();
}

FiringRecord FiringRecord::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), "record JSON: parse error");
  require(j.is_object() && j.contains("scheme") && j.contains("t_first") &&
              j.contains("intervals") && j.contains("bias_trace"),
          "record JSON: missing field");
  FiringRecord r;
  r.scheme = scheme_from_name(j["scheme"].get<std::string>());
  r.t_first = j["t_first"].get<double>();
  r.intervals = j["intervals"].get<std::vector<double>>();
  for (const auto& b : j["bias_trace"])
    r.bias_trace.push_back({b.at("slope").get<double>(), b.at("offset").get<double>()});
  return r;
}

namespace detail {

FiringOutcome solve_firing(const std::function<double(double)>& integral,
                           const std::function<double(double)>& value,
                           const BiasSegment& bias, double t_n, double delta,
                           double step, double infeasible_span, double t_end,
                           double resolution) {
  const auto g = [&](double t) {
    return integral(t) + bias.integral(t - t_n) - delta;
  };
  const auto gp = [&](double t) { return value(t) + bias.slope * (t - t_n) + bias.offset; };

  // Bracket by walking forward; track how long the integrand stays <= 0.
  double lo = t_n, hi = t_n;
  double g_hi = -delta;
  double nonpos_start = 0.0;
  bool nonpos = false;
  for (;;) {
    lo = hi;
    hi = std::min(lo + step, t_end);
    g_hi = g(hi);
    if (gp(hi) <= 0.0) {
      if (!nonpos) {
        nonpos = true;
        nonpos_start = hi;
      } else if (hi - nonpos_start >= infeasible_span) {
        return {FiringOutcome::Status::infeasible, nonpos_start};
      }
    } else {
      nonpos = false;
    }
    if (g_hi >= 0.0) break;
    if (hi >= t_end) return {FiringOutcome::Status::past_window, t_end};
  }

  // Safeguarded Newton within [lo, hi]; g(lo) < 0 <= g(hi).
  const double g_tol = 1e-12 * delta;
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gt = g(t);
    if (std::fabs(gt) <= g_tol) return {FiringOutcome::Status::fired, t};
    if (gt > 0.0)
      hi = t;
    else
      lo = t;
    if (hi - lo <= std::min(resolution, 1e-9) * 1e-3 + 1e-16 * std::fabs(hi))
      return {FiringOutcome::Status::fired, 0.5 * (lo + hi)};
    const double d = gp(t);
    double t_next = d > 0.0 ? t - gt / d : lo;
    if (!(t_next > lo && t_next < hi)) t_next = 0.5 * (lo + hi);
    t = t_next;
  }
  return {FiringOutcome::Status::fired, 0.5 * (lo + hi)};
}

}  // namespace detail

BiasSegment initial_bias(const SchemeParams& params, double amp_bound) {
  return std::visit(
      [&](const auto& p) -> BiasSegment {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantBiasParams>) {
          return {0.0, p.bias};
        } else if constexpr (std::is_same_v<T, VariableBiasParams>) {
          // Worst-case-safe start: assume f(t_0) at its lower bound -c.
          return {0.0, p.epsilon * p.t_max() + amp_bound};
        } else {
          return {p.epsilon, amp_bound + p.mu};
        }
      },
      params);
}

BiasSegment next_bias(const SchemeParams& params, const BiasState& state) {
  return std::visit(
      [&](const auto& p) -> BiasSegment {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantBiasParams>) {
          return {0.0, p.bias};
        } else if constexpr (std::is_same_v<T, VariableBiasParams>) {
          return {0.0, p.epsilon * p.t_max() +
                           0.5 * p.epsilon * state.t_prev - state.fhat_prev};
        } else {
          return lb_bias(state, p);
        }
      },
      params);
}

FiringRecord encode(const BandlimitedSignal& f, const SchemeParams& params,
                    double t_start, double t_end, double resolution) {
  validate(params);
  require(t_start < t_end, "encode: empty window");
  const auto [sup_lo, sup_hi] = f.nominal_support();
  require(sup_lo <= t_start + 1e-12 && t_end <= sup_hi + 1e-12,
          "encode: signal support does not cover the window");

  const IntervalBounds bounds = interval_bounds(params);
  const double delta = threshold_of(params);
  const double step = bounds.t_min / 8.0;

  FiringRecord record;
  record.scheme = scheme_of(params);
  record.t_first = t_start;

  double t_n = t_start;
  BiasSegment bias = initial_bias(params, f.amp_bound());
  for (;;) {
    RunningIntegral integral(f, t_n);
    const auto outcome = detail::solve_firing(
        [&](double t) { return integral(t); },
        [&](double t) { return f.evaluate(t); }, bias, t_n, delta, step,
        bounds.t_max, t_end, resolution);
    if (outcome.status == detail::FiringOutcome::Status::past_window) break;
    if (outcome.status == detail::FiringOutcome::Status::infeasible)
      throw InfeasibleError("encode: integrand non-positive over a full span",
                            outcome.time);
    const double duration = outcome.time - t_n;
    record.intervals.push_back(duration);
    record.bias_trace.push_back(bias);
    const BiasState state{
        running_average(delta, duration, bias.integral(duration)), duration};
    bias = next_bias(params, state);
    t_n = outcome.time;
  }
  return record;
}

DensityStats firing_density(const FiringRecord& record) {
  require(!record.intervals.empty(), "firing_density: empty record");
  DensityStats stats;
  stats.rates.reserve(record.intervals.size());
  for (double t : record.intervals) stats.rates.push_back(1.0 / t);
  const auto [mn, mx] = std::minmax_element(stats.rates.begin(), stats.rates.end());
  stats.min = *mn;
  stats.max = *mx;
  stats.spread = stats.max - stats.min;
  return stats;
}

}  // namespace temcodec
