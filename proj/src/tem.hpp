#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "signal.hpp"

namespace temcodec {

enum class Scheme : int { constant_bias = 0, variable_bias = 1, linear_bias = 2 };

const char* scheme_name(Scheme s);        // "conv" | "vb" | "lb"
Scheme scheme_from_name(const std::string& name);

struct IntervalBounds {
  double t_min = 0.0;
  double t_max = 0.0;
  double range() const { return t_max - t_min; }
};

// Constant-bias integrate-and-fire: fires when the integral of f + b
// reaches delta_c. Requires b > c so the integrand stays positive.
struct ConstantBiasParams {
  double delta_c = 0.0;
  double bias = 0.0;
  double amp_bound = 0.0;

  void validate() const;
};

// Per-interval constant bias refreshed from the previous running average.
struct VariableBiasParams {
  double delta_v = 0.0;
  double epsilon = 0.0;  // slope bound of the signal class

  void validate() const;
  double t_max() const;  // sqrt(2 delta_v / epsilon)
};

// Affine per-interval bias with slope epsilon, refreshed after each firing.
// The invariant delta == mu * beta * t_nyq ties the threshold to the upper
// interval bound beta * t_nyq.
struct LinearBiasParams {
  double delta = 0.0;
  double mu = 0.0;
  double epsilon = 0.0;
  double t_nyq = 0.0;
  double alpha = 0.0;  // lower bound fraction, 0 < alpha < beta <= 1
  double beta = 0.0;   // upper bound fraction

  void validate() const;
  static LinearBiasParams from_thresholds(double delta, double mu,
                                          double omega0, double amp_bound);
};

// Designs (delta, mu) so every firing interval lands in
// [alpha * t_nyq, beta * t_nyq] for signals of the class (omega0, amp_bound).
LinearBiasParams lb_design(double alpha, double beta, double omega0,
                           double amp_bound);

// Worst-case interval bounds per scheme.
IntervalBounds lb_interval_bounds(const LinearBiasParams& p);
IntervalBounds vb_interval_bounds(const VariableBiasParams& p);
IntervalBounds conv_interval_bounds(const ConstantBiasParams& p);

using SchemeParams =
    std::variant<ConstantBiasParams, VariableBiasParams, LinearBiasParams>;

Scheme scheme_of(const SchemeParams& p);
IntervalBounds interval_bounds(const SchemeParams& p);
double threshold_of(const SchemeParams& p);
void validate(const SchemeParams& p);

// Recursion state after a firing: previous interval and its running average.
struct BiasState {
  double fhat_prev = 0.0;
  double t_prev = 0.0;
};

// Affine bias over one interval: b(t) = slope * (t - t_n) + offset.
struct BiasSegment {
  double slope = 0.0;
  double offset = 0.0;

  double integral(double duration) const {
    return 0.5 * slope * duration * duration + offset * duration;
  }
};

// Bias for the interval after a firing, from the previous interval's state.
BiasSegment lb_bias(const BiasState& state, const LinearBiasParams& p);

// Worst-case-safe bias for the first interval, before any firing history
// exists: the running-average margin is replaced by the class bound -c.
BiasSegment initial_bias(const SchemeParams& params, double amp_bound);

// Bias for the next interval from the previous interval's state. Constant
// schemes ignore the state.
BiasSegment next_bias(const SchemeParams& params, const BiasState& state);

// Average of f over the previous interval recovered from the firing
// equation: (delta - bias_integral) / t_prev.
double running_average(double delta, double t_prev, double bias_integral);

struct FiringRecord {
  Scheme scheme = Scheme::constant_bias;
  double t_first = 0.0;
  std::vector<double> intervals;
  std::vector<BiasSegment> bias_trace;

  std::string to_json() const;
  static FiringRecord from_json(const std::string& text);
};

// Encodes f over [t_start, t_end]: successive times where the integral of
// f + b_n reaches the threshold. t_first is the conventional start firing at
// t_start; the first interval uses the worst-case-safe initial bias, each
// later one the scheme's recursion. Stops at the last firing <= t_end.
// Throws InfeasibleError if the integrand stays non-positive over a whole
// t_max-long span.
FiringRecord encode(const BandlimitedSignal& f, const SchemeParams& params,
                    double t_start, double t_end, double resolution = 1e-9);

struct DensityStats {
  std::vector<double> rates;  // 1 / T_n, Hz
  double min = 0.0;
  double max = 0.0;
  double spread = 0.0;  // max - min
};

DensityStats firing_density(const FiringRecord& record);

namespace detail {

struct FiringOutcome {
  enum class Status { fired, past_window, infeasible } status;
  double time = 0.0;  // firing time, or where the integrand went non-positive
};

// Locates the next threshold crossing of integral(t) + bias.integral(t - t_n)
// by bracketing with `step` and safeguarded Newton refinement.
// `integral` is the running integral of f from t_n; `value` is f itself.
FiringOutcome solve_firing(const std::function<double(double)>& integral,
                           const std::function<double(double)>& value,
                           const BiasSegment& bias, double t_n, double delta,
                           double step, double infeasible_span, double t_end,
                           double resolution);

}  // namespace detail

}  // namespace temcodec
