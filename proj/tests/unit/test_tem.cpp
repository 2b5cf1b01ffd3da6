#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "helpers.hpp"
#include "tem.hpp"

using namespace temcodec;
using testutil::kOmega0;
using testutil::kPi;

namespace {

double lb_fixed_point(const LinearBiasParams& p) {
  // zero-signal steady interval: eps T^2 + mu T = delta
  return (-p.mu + std::sqrt(p.mu * p.mu + 4.0 * p.epsilon * p.delta)) /
         (2.0 * p.epsilon);
}

std::vector<double> firing_times(const FiringRecord& r) {
  std::vector<double> t{r.t_first};
  for (const double d : r.intervals) t.push_back(t.back() + d);
  return t;
}

}  // namespace

TEST_CASE("lb_design reproduces the reference thresholds at alpha = sqrt(2)-1") {
  const double alpha = std::sqrt(2.0) - 1.0;
  const auto p = lb_design(alpha, 1.0, kOmega0, 1.0);
  CHECK(std::fabs(p.delta - 0.0314159) <= 1e-6);
  CHECK(std::fabs(p.mu - 3.14159) <= 1e-4);
  // closed forms collapse to eps T^2 and eps T at this alpha
  CHECK(p.delta == doctest::Approx(p.epsilon * p.t_nyq * p.t_nyq).epsilon(1e-12));
  CHECK(p.mu == doctest::Approx(p.epsilon * p.t_nyq).epsilon(1e-12));
  CHECK(p.delta == doctest::Approx(p.mu * p.beta * p.t_nyq).epsilon(1e-12));
}

TEST_CASE("lb_design satisfies the quadratic-substitution identity") {
  // delta == alpha eps T^2 (beta + alpha) + alpha T mu, the relation the
  // closed forms were solved from.
  for (const auto [alpha, beta] :
       {std::pair{0.2, 0.7}, {0.41421356, 1.0}, {0.05, 0.95}, {0.6, 0.61}}) {
    const auto p = lb_design(alpha, beta, kOmega0, 1.0);
    const double lhs = p.delta;
    const double rhs = alpha * p.epsilon * p.t_nyq * p.t_nyq * (beta + alpha) +
                       alpha * p.t_nyq * p.mu;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("lb_design at alpha = 0.5") {
  const auto p = lb_design(0.5, 1.0, kOmega0, 1.0);
  CHECK(p.delta == doctest::Approx(0.0471239).epsilon(1e-5));
  CHECK(p.mu == doctest::Approx(4.71239).epsilon(1e-5));
}

TEST_CASE("lb_design limit alpha -> 0") {
  const auto p = lb_design(1e-8, 1.0, kOmega0, 1.0);
  CHECK(p.delta < 1e-6);
  CHECK(p.mu < 1e-4);
}

TEST_CASE("lb_design rejects bad fractions") {
  CHECK_THROWS_AS(lb_design(0.5, 0.5, kOmega0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lb_design(0.7, 0.5, kOmega0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lb_design(0.2, 1.2, kOmega0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lb_design(0.0, 0.5, kOmega0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lb_design(0.2, 0.9, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lb_design(0.2, 0.9, kOmega0, 0.0), std::invalid_argument);
}

TEST_CASE("design -> bounds round-trip returns the prescribed fractions") {
  for (const auto [alpha, beta] :
       {std::pair{0.05, 0.3}, {0.3, 1.0}, {0.41421356237, 1.0}, {0.5, 1.0},
        {0.89, 0.9}, {0.25, 0.75}}) {
    const auto p = lb_design(alpha, beta, kOmega0, 1.0);
    const auto b = lb_interval_bounds(p);
    CHECK(b.t_min == doctest::Approx(alpha * p.t_nyq).epsilon(1e-12));
    CHECK(b.t_max == doctest::Approx(beta * p.t_nyq).epsilon(1e-12));
  }
}

TEST_CASE("lb_interval_bounds at the reference thresholds matches the table row") {
  const auto b = lb_interval_bounds(testutil::footnote_lb());
  CHECK(std::fabs(b.t_min - 4.14e-3) <= 0.01 * 4.14e-3);
  CHECK(std::fabs(b.t_max - 10e-3) <= 0.01 * 10e-3);
}

TEST_CASE("lb_interval_bounds degenerates to delta/mu as the slope bound vanishes") {
  // epsilon = 1e-6 via a vanishing amplitude bound
  const double c = 1e-6 / kOmega0;
  const auto p = LinearBiasParams::from_thresholds(0.005, 1.0, kOmega0, c);
  const auto b = lb_interval_bounds(p);
  CHECK(std::fabs(b.t_min - b.t_max) <= 1e-6 * b.t_max);
  CHECK(b.t_max == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("from_thresholds rejects thresholds beyond the Nyquist period") {
  CHECK_THROWS_AS(LinearBiasParams::from_thresholds(0.05, 3.14159, kOmega0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("vb_interval_bounds") {
  const auto b = vb_interval_bounds(testutil::default_vb());
  CHECK(b.t_max == doctest::Approx(9.997e-3).epsilon(1e-3));
  CHECK(std::fabs(b.t_min - 2.36e-3) <= 0.01 * 2.36e-3);
  CHECK(std::fabs(b.range() - 7.6e-3) <= 0.01 * 7.6e-3);
  // algebraic oversampling cap sqrt(5) + 2
  CHECK(b.t_max / b.t_min ==
        doctest::Approx(std::sqrt(5.0) + 2.0).epsilon(1e-12));

  const auto b4 = vb_interval_bounds({4.0 * 0.0157, slope_bound(kOmega0, 1.0)});
  CHECK(b4.t_max == doctest::Approx(2.0 * b.t_max).epsilon(1e-12));
  CHECK(b4.t_max == doctest::Approx(0.02).epsilon(1e-3));
}

TEST_CASE("conv_interval_bounds") {
  const auto b = conv_interval_bounds(testutil::default_conv());
  CHECK(b.t_min == doctest::Approx(0.002).epsilon(1e-14));
  CHECK(b.t_max == doctest::Approx(0.01).epsilon(1e-14));

  const auto b0 = conv_interval_bounds({0.005, 1.5, 0.0});
  CHECK(b0.t_min == b0.t_max);

  // the footnote parameters give 40 ms / 8 ms, not the table's 10 / 1.2
  const auto bf = conv_interval_bounds({0.02, 1.5, 1.0});
  CHECK(bf.t_max == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(bf.t_min == doctest::Approx(0.008).epsilon(1e-14));

  CHECK_THROWS_AS(conv_interval_bounds({0.005, 0.9, 1.0}), std::invalid_argument);
}

TEST_CASE("lb_bias at the zero-signal fixed point") {
  const auto p = testutil::footnote_lb();
  const double t_star = lb_fixed_point(p);
  CHECK(std::fabs(t_star - 6.18e-3) <= 5e-6);
  const auto bias = lb_bias({0.0, t_star}, p);
  CHECK(bias.slope == p.epsilon);
  CHECK(bias.offset ==
        doctest::Approx(p.mu + 0.5 * p.epsilon * t_star).epsilon(1e-12));
  CHECK(std::fabs(bias.offset - 4.112) <= 1e-2);
}

TEST_CASE("lb_bias cancels to a pure ramp") {
  const auto p = testutil::footnote_lb();
  const double t_prev = 5e-3;
  const auto bias = lb_bias({p.mu + 0.5 * p.epsilon * t_prev, t_prev}, p);
  CHECK(std::fabs(bias.offset) <= 1e-12);
}

TEST_CASE("running_average") {
  CHECK(running_average(0.03, 0.005, 0.03) == 0.0);
  CHECK_THROWS_AS(running_average(0.03, 0.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(running_average(0.03, -1.0, 0.01), std::invalid_argument);
}

TEST_CASE("running averages equal the true interval means") {
  const auto f = testutil::random_signal(21);
  const auto p = testutil::footnote_lb();
  const auto r = encode(f, SchemeParams{p}, -0.45, 0.45);
  const auto times = firing_times(r);
  for (std::size_t n = 0; n < r.intervals.size(); ++n) {
    const double duration = r.intervals[n];
    const double fhat =
        running_average(p.delta, duration, r.bias_trace[n].integral(duration));
    const double oracle = f.integrate(times[n], times[n + 1]) / duration;
    CHECK(std::fabs(fhat - oracle) <= 1e-9);
  }
}

TEST_CASE("zero-signal fixed points per scheme") {
  const auto z = testutil::zero_signal();

  SUBCASE("linear bias settles at the golden-ratio interval") {
    const auto p = testutil::footnote_lb();
    const auto r = encode(z, SchemeParams{p}, -0.45, 0.45);
    const double t_star = lb_fixed_point(p);
    REQUIRE(r.intervals.size() > 10);
    for (std::size_t n = 3; n < r.intervals.size(); ++n)
      CHECK(std::fabs(r.intervals[n] - t_star) < 1e-6);
    const double mean =
        std::accumulate(r.intervals.begin() + 1, r.intervals.end(), 0.0) /
        static_cast<double>(r.intervals.size() - 1);
    CHECK(std::fabs(mean - t_star) <= 1e-6);
    CHECK(r.intervals.size() == 145);
  }

  SUBCASE("variable bias settles at (sqrt(2)-1) t_max") {
    const auto p = testutil::default_vb();
    const auto r = encode(z, SchemeParams{p}, -0.45, 0.45);
    const double t_star = (std::sqrt(2.0) - 1.0) * p.t_max();
    CHECK(std::fabs(t_star - 4.14e-3) <= 2e-6);
    for (std::size_t n = 5; n < r.intervals.size(); ++n)
      CHECK(std::fabs(r.intervals[n] - t_star) < 1e-6);
    // consistent with the reported firing budget
    CHECK(std::fabs(static_cast<double>(r.intervals.size()) - 214.0) <=
          0.1 * 214.0);
  }

  SUBCASE("constant bias fires uniformly at delta_c / b") {
    const auto p = testutil::default_conv();
    const auto r = encode(z, SchemeParams{p}, -0.45, 0.45);
    for (const double d : r.intervals)
      CHECK(std::fabs(d - p.delta_c / p.bias) <= 1e-9);
  }
}

TEST_CASE("encode meets the threshold tolerance") {
  const auto f = testutil::random_signal(22);
  const auto p = testutil::footnote_lb();
  const auto r = encode(f, SchemeParams{p}, -0.45, 0.45);
  const auto times = firing_times(r);
  for (std::size_t n = 0; n < std::min<std::size_t>(r.intervals.size(), 12); ++n) {
    const double integral = f.integrate(times[n], times[n + 1]) +
                            r.bias_trace[n].integral(r.intervals[n]);
    CHECK(std::fabs(integral - p.delta) <= 1e-12 * p.delta + 2e-15);
  }
  CHECK(times.back() <= 0.45 + 1e-12);
  CHECK(r.t_first == -0.45);
}

TEST_CASE("encoded intervals stay inside the closed-form bounds") {
  for (std::uint64_t seed = 31; seed < 37; ++seed) {
    const auto f = testutil::random_signal(seed);
    SchemeParams all[] = {SchemeParams{testutil::default_conv()},
                          SchemeParams{testutil::default_vb()},
                          SchemeParams{testutil::footnote_lb()}};
    for (const auto& params : all) {
      const auto b = interval_bounds(params);
      const auto r = encode(f, params, -0.45, 0.45);
      const bool skip_first = scheme_of(params) != Scheme::constant_bias;
      for (std::size_t n = skip_first ? 1 : 0; n < r.intervals.size(); ++n) {
        CHECK(r.intervals[n] >= b.t_min - 1e-9);
        CHECK(r.intervals[n] <= b.t_max + 1e-9);
      }
    }
  }
}

TEST_CASE("running-average amplitude bound holds at every firing") {
  const auto p = testutil::footnote_lb();
  for (std::uint64_t seed = 41; seed < 45; ++seed) {
    const auto f = testutil::random_signal(seed);
    const auto r = encode(f, SchemeParams{p}, -0.45, 0.45);
    const auto times = firing_times(r);
    for (std::size_t n = 0; n < r.intervals.size(); ++n) {
      const double duration = r.intervals[n];
      const double fhat =
          running_average(p.delta, duration, r.bias_trace[n].integral(duration));
      const double margin = 0.5 * p.epsilon * duration + 1e-9;
      const double value = f.evaluate(times[n + 1]);
      CHECK(value >= fhat - margin);
      CHECK(value <= fhat + margin);
    }
  }
}

TEST_CASE("the biased integrand stays positive on every interval") {
  SchemeParams all[] = {SchemeParams{testutil::default_conv()},
                        SchemeParams{testutil::default_vb()},
                        SchemeParams{testutil::footnote_lb()}};
  for (std::uint64_t seed = 51; seed < 54; ++seed) {
    const auto f = testutil::random_signal(seed);
    for (const auto& params : all) {
      const auto r = encode(f, params, -0.45, 0.45);
      const auto times = firing_times(r);
      double worst = 1e300;
      for (std::size_t n = 0; n < r.intervals.size(); ++n) {
        for (int k = 0; k <= 200; ++k) {
          const double d = r.intervals[n] * k / 200.0;
          const double v = f.evaluate(times[n] + d) + r.bias_trace[n].slope * d +
                           r.bias_trace[n].offset;
          worst = std::min(worst, v);
        }
      }
      CHECK(worst > 0.0);
    }
  }
}

TEST_CASE("solve_firing: integrand pinned at mu gives the maximal interval") {
  // signal descending at exactly -eps from the minimum admissible start
  const auto p = testutil::footnote_lb();
  const double t0 = 0.0, f0 = 0.37;
  const BiasSegment bias{p.epsilon, p.mu - f0};
  const auto out = detail::solve_firing(
      [&](double t) { return f0 * (t - t0) - 0.5 * p.epsilon * (t - t0) * (t - t0); },
      [&](double t) { return f0 - p.epsilon * (t - t0); }, bias, t0, p.delta,
      1e-3, 1.0, 1.0, 1e-9);
  REQUIRE(out.status == detail::FiringOutcome::Status::fired);
  CHECK(out.time == doctest::Approx(p.delta / p.mu).epsilon(1e-9));
}

TEST_CASE("encode raises infeasibility when the class assumption is violated") {
  // params designed for a much smaller amplitude class than the signal
  const double step = kPi / kOmega0;
  const BandlimitedSignal liar(kOmega0, 0.05, -0.45 - 5 * step,
                               std::vector<double>(100, -0.9));
  const auto p = lb_design(std::sqrt(2.0) - 1.0, 1.0, kOmega0, 0.05);
  CHECK_THROWS_AS(encode(liar, SchemeParams{p}, -0.45, 0.45), InfeasibleError);
  try {
    encode(liar, SchemeParams{p}, -0.45, 0.45);
  } catch (const InfeasibleError& e) {
    CHECK(e.time() >= -0.45);
    CHECK(e.time() <= 0.45);
  }
}

TEST_CASE("encode validates its window against the signal support") {
  const auto f = testutil::random_signal(61);
  const auto p = testutil::footnote_lb();
  CHECK_THROWS_AS(encode(f, SchemeParams{p}, -0.6, 0.45), std::invalid_argument);
  CHECK_THROWS_AS(encode(f, SchemeParams{p}, 0.45, -0.45), std::invalid_argument);
}

TEST_CASE("firing_density") {
  FiringRecord constant;
  constant.scheme = Scheme::constant_bias;
  constant.t_first = 0.0;
  constant.intervals.assign(20, 0.01);
  constant.bias_trace.assign(20, BiasSegment{0.0, 1.5});
  const auto d = firing_density(constant);
  CHECK(d.spread == 0.0);
  CHECK(d.min == doctest::Approx(100.0).epsilon(1e-12));

  CHECK_THROWS_AS(firing_density(FiringRecord{}), std::invalid_argument);
}

TEST_CASE("density spreads order lb < vb < conv on random signals") {
  for (std::uint64_t seed = 71; seed < 75; ++seed) {
    const auto f = testutil::random_signal(seed);
    const auto lb = firing_density(
        encode(f, SchemeParams{testutil::footnote_lb()}, -0.45, 0.45));
    const auto vb = firing_density(
        encode(f, SchemeParams{testutil::default_vb()}, -0.45, 0.45));
    const auto conv = firing_density(
        encode(f, SchemeParams{testutil::default_conv()}, -0.45, 0.45));
    CHECK(lb.spread < vb.spread);
    CHECK(vb.spread < conv.spread);
  }
}

TEST_CASE("record JSON round-trip") {
  const auto f = testutil::random_signal(81);
  const auto r = encode(f, SchemeParams{testutil::default_vb()}, -0.45, 0.45);
  const auto back = FiringRecord::from_json(r.to_json());
  CHECK(back.scheme == r.scheme);
  CHECK(back.t_first == r.t_first);
  CHECK(back.intervals == r.intervals);
  REQUIRE(back.bias_trace.size() == r.bias_trace.size());
  for (std::size_t i = 0; i < r.bias_trace.size(); ++i) {
    CHECK(back.bias_trace[i].slope == r.bias_trace[i].slope);
    CHECK(back.bias_trace[i].offset == r.bias_trace[i].offset);
  }
  CHECK_THROWS_AS(FiringRecord::from_json("[]"), std::invalid_argument);
}

TEST_CASE("scheme names round-trip") {
  for (const Scheme s : {Scheme::constant_bias, Scheme::variable_bias,
                         Scheme::linear_bias}) {
    CHECK(scheme_from_name(scheme_name(s)) == s);
  }
  CHECK_THROWS_AS(scheme_from_name("nope"), std::invalid_argument);
}
