#include "sine_integral.hpp"

#include <cmath>
#include <complex>

namespace temcodec {

double sinc(double x) {
  if (std::fabs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

namespace {

constexpr double kHalfPi = 1.5707963267948966;

// Alternating series sum_{n>=0} (-1)^n x^(2n+1) / ((2n+1)(2n+1)!).
// Largest term at x = 6 is ~8, so cancellation stays below ~1e-15.
double si_series(double x) {
  double p = x;  // (-1)^n x^(2n+1) / (2n+1)!
  double sum = x;
  const double x2 = x * x;
  for (int n = 1; n < 64; ++n) {
    p *= -x2 / static_cast<double>((2 * n) * (2 * n + 1));
    const double term = p / static_cast<double>(2 * n + 1);
    sum += term;
    if (std::fabs(term) < 1e-18 * (1.0 + std::fabs(sum))) break;
  }
  return sum;
}

// E1(ix) via the modified Lentz continued fraction, then
// Si(x) = pi/2 + Im(e^{-ix} * h) with h the fraction value.
double si_continued_fraction(double x) {
  using cd = std::complex<double>;
  const cd z(0.0, x);
  cd b = z + 1.0;
  cd c = cd(1e290, 0.0);
  cd d = 1.0 / b;
  cd h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cd del = c * d;
    h *= del;
    if (std::fabs(del.real() - 1.0) + std::fabs(del.imag()) < 1e-17) break;
  }
  const cd e1 = cd(std::cos(x), -std::sin(x)) * h;
  return kHalfPi + e1.imag();
}

}  // namespace

double sine_integral(double x) {
  const double ax = std::fabs(x);
  const double v = ax <= 6.0 ? si_series(ax) : si_continued_fraction(ax);
  return x < 0.0 ? -v : v;
}

}  // namespace temcodec
