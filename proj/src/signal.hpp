#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace temcodec {

// T_nyq = pi / omega0.
double nyquist_period(double omega0);

// Slope bound of the class: |f'(t)| <= amp_bound * omega0.
// amp_bound may be zero (the zero-amplitude class); omega0 must be positive.
double slope_bound(double omega0, double amp_bound);

struct SignalSpec {
  double omega0 = 0.0;     // angular bandwidth, rad/s
  double amp_bound = 0.0;  // amplitude bound c
  double t_start = 0.0;    // support [t_start, t_end]
  double t_end = 0.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// Finite sinc series on the Nyquist grid:
//   f(t) = sum_k coeffs[k] * sinc(omega0 * (t - tau_k)),
//   tau_k = grid_origin + k * T_nyq.
// Generated signals carry kGuard coefficients per side beyond the nominal
// support, so nominal_support() is [origin + 5T, origin + (n-5)T].
class BandlimitedSignal {
 public:
  static constexpr int kGuard = 5;

  BandlimitedSignal(double omega0, double amp_bound, double grid_origin,
                    std::vector<double> coeffs);

  double omega0() const { return omega0_; }
  double amp_bound() const { return amp_bound_; }
  double grid_origin() const { return grid_origin_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double t_nyq() const;
  double coeff_time(std::size_t k) const;

  double evaluate(double t) const;
  // Closed-form integral of f over [t1, t2] via the sine integral.
  double integrate(double t1, double t2) const;
  // Dense-grid max of |f| (32x Nyquist density) refined to a local max.
  double peak() const;
  std::pair<double, double> nominal_support() const;

  // {"c": ..., "coeffs": [...], "grid_origin": ..., "omega0": ...};
  // doubles round-trip bit-exactly.
  std::string to_json() const;
  static BandlimitedSignal from_json(const std::string& text);

  bool operator==(const BandlimitedSignal&) const = default;

 private:
  double omega0_;
  double amp_bound_;
  double grid_origin_;
  std::vector<double> coeffs_;
};

// Coefficients i.i.d. uniform on [-1, 1] at every grid point covering the
// support plus kGuard periods per side, rescaled so peak() == amp_bound.
// Deterministic per spec.seed.
BandlimitedSignal generate(const SignalSpec& spec);

// Integral of f from a fixed origin, with the origin endpoint cached so
// repeated evaluations cost one sine-integral pass.
class RunningIntegral {
 public:
  RunningIntegral(const BandlimitedSignal& f, double origin);
  double operator()(double t) const;

 private:
  const BandlimitedSignal* f_;
  double origin_;
  std::vector<double> si_origin_;
};

}  // namespace temcodec
