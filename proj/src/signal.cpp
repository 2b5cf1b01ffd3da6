#include "signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "rng.hpp"
#include "sine_integral.hpp"

namespace temcodec {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace

double nyquist_period(double omega0) {
  require(omega0 > 0.0, "nyquist_period: omega0 must be positive");
  return kPi / omega0;
}

double slope_bound(double omega0, double amp_bound) {
  require(omega0 > 0.0, "slope_bound: omega0 must be positive");
  require(amp_bound >= 0.0, "slope_bound: amp_bound must be non-negative");
  return amp_bound * omega0;
}

void SignalSpec::validate() const {
  require(omega0 > 0.0, "SignalSpec: omega0 must be positive");
  require(amp_bound > 0.0, "SignalSpec: amp_bound must be positive");
  require(t_start < t_end, "SignalSpec: t_start must precede t_end");
}

BandlimitedSignal::BandlimitedSignal(double omega0, double amp_bound,
                                     double grid_origin,
                                     std::vector<double> coeffs)
    : omega0_(omega0),
      amp_bound_(amp_bound),
      grid_origin_(grid_origin),
      coeffs_(std::move(coeffs)) {
  require(omega0_ > 0.0, "BandlimitedSignal: omega0 must be positive");
  require(amp_bound_ >= 0.0, "BandlimitedSignal: amp_bound must be non-negative");
  require(!coeffs_.empty(), "BandlimitedSignal: empty coefficient list");
  for (double a : coeffs_)
    require(std::isfinite(a), "BandlimitedSignal: non-finite coefficient");
}

double BandlimitedSignal::t_nyq() const { return kPi / omega0_; }

double BandlimitedSignal::coeff_time(std::size_t k) const {
  return grid_origin_ + static_cast<double>(k) * t_nyq();
}

double BandlimitedSignal::evaluate(double t) const {
  const double step = t_nyq();
  double sum = 0.0;
  double tau = grid_origin_;
  for (const double a : coeffs_) {
    sum += a * sinc(omega0_ * (t - tau));
    tau += step;
  }
  return sum;
}

double BandlimitedSignal::integrate(double t1, double t2) const {
  require(t1 <= t2, "integrate: t1 must not exceed t2");
  if (t1 == t2) return 0.0;
  const double step = t_nyq();
  double sum = 0.0;
  double tau = grid_origin_;
  for (const double a : coeffs_) {
    sum += a * (sine_integral(omega0_ * (t2 - tau)) -
                sine_integral(omega0_ * (t1 - tau)));
    tau += step;
  }
  return sum / omega0_;
}

std::pair<double, double> BandlimitedSignal::nominal_support() const {
  const double step = t_nyq();
  const double lo = grid_origin_ + kGuard * step;
  const double hi =
      grid_origin_ + (static_cast<double>(coeffs_.size()) - kGuard) * step;
  return {lo, hi};
}

namespace {

// Brent-style local refinement of a maximum of |f| bracketed by grid steps.
double refine_abs_max(const BandlimitedSignal& f, double t, double h) {
  double lo = t - h, hi = t + h;
  for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (std::fabs(f.evaluate(m1)) < std::fabs(f.evaluate(m2)))
      lo = m1;
    else
      hi = m2;
  }
  const double tm = 0.5 * (lo + hi);
  return std::fabs(f.evaluate(tm));
}

}  // namespace

double BandlimitedSignal::peak() const {
  const double step = t_nyq();
  const double h = step / 32.0;
  const double lo = grid_origin_ - kGuard * step;
  const double hi = coeff_time(coeffs_.size() - 1) + kGuard * step;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1;

  std::vector<double> vals(n);
  double grid_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = lo + static_cast<double>(i) * h;
    vals[i] = std::fabs(evaluate(t));
    grid_max = std::max(grid_max, vals[i]);
  }
  if (grid_max == 0.0) return 0.0;

  // Refine every interior grid-local maximum that could beat the best point.
  double best = grid_max;
  const double margin = 1e-4 * grid_max;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] &&
        vals[i] >= grid_max - margin) {
      best = std::max(best, refine_abs_max(*this, lo + static_cast<double>(i) * h, h));
    }
  }
  return best;
}

std::string BandlimitedSignal::to_json() const {
  nlohmann::json j;
  j["omega0"] = omega0_;
  j["c"] = amp_bound_;
  j["grid_origin"] = grid_origin_;
  j["coeffs"] = coeffs_;
  return j.dump();
}

BandlimitedSignal BandlimitedSignal::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), "signal JSON: parse error");
  require(j.is_object() && j.contains("omega0") && j.contains("c") &&
              j.contains("grid_origin") && j.contains("coeffs"),
          "signal JSON: missing field");
  return BandlimitedSignal(j["omega0"].get<double>(), j["c"].get<double>(),
                           j["grid_origin"].get<double>(),
                           j["coeffs"].get<std::vector<double>>());
}

BandlimitedSignal generate(const SignalSpec& spec) {
  spec.validate();
  const double step = nyquist_period(spec.omega0);
  const double span = spec.t_end - spec.t_start;
  require(span >= step * (1.0 - 1e-9),
          "generate: support shorter than one Nyquist period");

  const auto n_support =
      static_cast<std::size_t>(std::max(1.0, std::floor(span / step + 1e-9)));
  const std::size_t n = n_support + 2 * BandlimitedSignal::kGuard;
  const double origin = spec.t_start - BandlimitedSignal::kGuard * step;

  UniformRng rng(spec.seed);
  std::vector<double> coeffs(n);
  for (auto& a : coeffs) a = rng.next_symmetric();

  BandlimitedSignal raw(spec.omega0, spec.amp_bound, origin, std::move(coeffs));
  const double p = raw.peak();
  require(p > 0.0, "generate: degenerate draw with zero peak");
  const double scale = spec.amp_bound / p;

  std::vector<double> scaled = raw.coeffs();
  for (auto& a : scaled) a *= scale;
  return BandlimitedSignal(spec.omega0, spec.amp_bound, origin, std::move(scaled));
}

RunningIntegral::RunningIntegral(const BandlimitedSignal& f, double origin)
    : f_(&f), origin_(origin), si_origin_(f.coeffs().size()) {
  const double step = f.t_nyq();
  double tau = f.grid_origin();
  for (std::size_t k = 0; k < si_origin_.size(); ++k) {
    si_origin_[k] = sine_integral(f.omega0() * (origin - tau));
    tau += step;
  }
}

double RunningIntegral::operator()(double t) const {
  if (t == origin_) return 0.0;
  const double step = f_->t_nyq();
  const auto& coeffs = f_->coeffs();
  double sum = 0.0;
  double tau = f_->grid_origin();
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    sum += coeffs[k] * (sine_integral(f_->omega0() * (t - tau)) - si_origin_[k]);
    tau += step;
  }
  return sum / f_->omega0();
}

}  // namespace temcodec
