#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "experiments.hpp"
#include "signal.hpp"
#include "tem.hpp"

namespace testutil {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kOmega0 = 100.0 * kPi;

// Composite 10-point Gauss-Legendre quadrature, the independent oracle for
// the closed-form sine-integral path.
inline double quad_gl(const std::function<double(double)>& fn, double a,
                      double b, int panels_per_unit = 8000) {
  static constexpr double node[5] = {0.1488743389816312, 0.4333953941292472,
                                     0.6794095682990244, 0.8650633666889845,
                                     0.9739065285171717};
  static constexpr double weight[5] = {0.2955242247147529, 0.2692667193099963,
                                       0.2190863625159820, 0.1494513491505806,
                                       0.0666713443086881};
  if (a == b) return 0.0;
  const int panels =
      std::max(1, static_cast<int>(std::ceil((b - a) * panels_per_unit)));
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = a + (i + 0.5) * h;
    const double half = 0.5 * h;
    for (int g = 0; g < 5; ++g) {
      sum += weight[g] * half *
             (fn(mid + half * node[g]) + fn(mid - half * node[g]));
    }
  }
  return sum;
}

inline temcodec::BandlimitedSignal random_signal(std::uint64_t seed,
                                                 double amp = 1.0) {
  return temcodec::generate({kOmega0, amp, -0.45, 0.45, seed});
}

inline temcodec::BandlimitedSignal zero_signal(double amp = 1.0) {
  const double step = kPi / kOmega0;
  return temcodec::BandlimitedSignal(kOmega0, amp, -0.45 - 5 * step,
                                     std::vector<double>(100, 0.0));
}

inline temcodec::ExperimentConfig small_config(int eval, int train = 4) {
  temcodec::ExperimentConfig cfg;
  cfg.train_size = train;
  cfg.eval_size = eval;
  return cfg;
}

// Footnote thresholds used across the experiments.
inline temcodec::LinearBiasParams footnote_lb() {
  return temcodec::LinearBiasParams::from_thresholds(0.0314159, 3.14159,
                                                     kOmega0, 1.0);
}

inline temcodec::VariableBiasParams default_vb() {
  return {0.0157, temcodec::slope_bound(kOmega0, 1.0)};
}

inline temcodec::ConstantBiasParams default_conv() {
  return {0.005, 1.5, 1.0};
}

}  // namespace testutil
