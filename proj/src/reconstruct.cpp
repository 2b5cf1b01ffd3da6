#include "reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "errors.hpp"
#include "sine_integral.hpp"

namespace temcodec {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGaussNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                  0.5384693101056831, 0.9061798459386640};
constexpr double kGaussWeight[5] = {0.2369268850561891, 0.4786286704993665,
                                    0.5688888888888889, 0.4786286704993665,
                                    0.2369268850561891};

}  // namespace

ReconConfig ReconConfig::for_times(double omega0, double t_first, double t_last) {
  require(t_first < t_last, "ReconConfig: need t_first < t_last");
  const double step = nyquist_period(omega0);
  const auto span = static_cast<int>(std::ceil((t_last - t_first) / step - 1e-9));
  ReconConfig cfg;
  cfg.omega0 = omega0;
  cfg.grid_origin = t_first - BandlimitedSignal::kGuard * step;
  cfg.n_basis = std::max(1, span) + 2 * BandlimitedSignal::kGuard;
  return cfg;
}

void ReconConfig::validate() const {
  require(omega0 > 0.0, "ReconConfig: omega0 must be positive");
  require(n_basis >= 1, "ReconConfig: need at least one basis function");
  require(svd_cutoff > 0.0 && svd_cutoff < 1.0, "ReconConfig: cutoff in (0,1)");
  require(guard >= 0.0, "ReconConfig: guard must be non-negative");
  require(max_iterations >= 1 && residual_tol > 0.0,
          "ReconConfig: bad iterative settings");
}

DenseMatrix measurement_matrix(std::span<const double> times,
                               const ReconConfig& config) {
  config.validate();
  require(times.size() >= 2, "measurement_matrix: need at least two times");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    require(times[i] < times[i + 1], "measurement_matrix: times must be strictly increasing");

  const std::size_t rows = times.size() - 1;
  const auto cols = static_cast<std::size_t>(config.n_basis);
  const double step = nyquist_period(config.omega0);

  // Si(omega0 (t - tau_k)) per firing time, shared by adjacent rows.
  std::vector<double> si(times.size() * cols);
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      const double tau = config.grid_origin + static_cast<double>(k) * step;
      si[i * cols + k] = sine_integral(config.omega0 * (times[i] - tau));
    }
  }

  DenseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.data.resize(rows * cols);
  for (std::size_t n = 0; n < rows; ++n)
    for (std::size_t k = 0; k < cols; ++k)
      m.data[n * cols + k] =
          (si[(n + 1) * cols + k] - si[n * cols + k]) / config.omega0;
  return m;
}

ReconResult reconstruct(const Measurements& measurements,
                        const ReconConfig& config) {
  config.validate();
  require(!measurements.values.empty(), "reconstruct: no measurements");
  require(measurements.times.size() == measurements.values.size() + 1,
          "reconstruct: times/values size mismatch");

  const DenseMatrix dm = measurement_matrix(measurements.times, config);
  const auto rows = static_cast<Eigen::Index>(dm.rows);
  const auto cols = static_cast<Eigen::Index>(dm.cols);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      a(r, c) = dm.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r)
    y(r) = measurements.values[static_cast<std::size_t>(r)];

  Eigen::VectorXd x;
  ReconResult result{BandlimitedSignal(1.0, 0.0, 0.0, {0.0}), 0.0, 0, 0, ""};

  if (config.solver == ReconConfig::Solver::direct) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    if (!(sigma_max > 0.0))
      throw DegenerateSystemError("reconstruct: all singular values below cutoff");
    const double cut = config.svd_cutoff * sigma_max;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma(i) >= cut) {
        inv(i) = 1.0 / sigma(i);
        ++rank;
      }
    }
    x = svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * y);
    result.rank = rank;
    result.solver = "direct";
  } else {
    // CGLS: conjugate-gradient residual correction on A^T A x = A^T y.
    x = Eigen::VectorXd::Zero(cols);
    Eigen::VectorXd r = y;
    Eigen::VectorXd s = a.transpose() * r;
    if (!(s.norm() > 0.0) && !(y.norm() > 0.0)) {
      // zero measurements: zero solution
    } else if (!(s.norm() > 0.0)) {
      throw DegenerateSystemError("reconstruct: operator annihilates the data");
    }
    Eigen::VectorXd p = s;
    double gamma = s.squaredNorm();
    const double y_norm = std::max(y.norm(), 1e-300);
    int it = 0;
    for (; it < config.max_iterations && gamma > 0.0; ++it) {
      const Eigen::VectorXd q = a * p;
      const double qq = q.squaredNorm();
      if (!(qq > 0.0)) break;
      const double alpha = gamma / qq;
      x += alpha * p;
      r -= alpha * q;
      result.residual_trace.push_back(r.norm() / y_norm);
      if (result.residual_trace.back() < config.residual_tol) {
        ++it;
        break;
      }
      s = a.transpose() * r;
      const double gamma_next = s.squaredNorm();
      p = s + (gamma_next / gamma) * p;
      gamma = gamma_next;
    }
    result.iterations = it;
    result.solver = "iterative";
  }

  result.residual = (a * x - y).norm() / std::max(y.norm(), 1e-300);
  std::vector<double> coeffs(static_cast<std::size_t>(cols));
  double amp = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    coeffs[static_cast<std::size_t>(c)] = x(c);
    amp = std::max(amp, std::fabs(x(c)));
  }
  result.estimate = BandlimitedSignal(config.omega0, amp, config.grid_origin,
                                      std::move(coeffs));
  return result;
}

double nmse_db(const BandlimitedSignal& reference, const BandlimitedSignal& estimate,
               double guard) {
  require(guard >= 0.0, "nmse_db: guard must be non-negative");
  const auto [ref_lo, ref_hi] = reference.nominal_support();
  const auto [est_lo, est_hi] = estimate.nominal_support();
  const double lo = std::max(ref_lo, est_lo) + guard;
  const double hi = std::min(ref_hi, est_hi) - guard;
  require(lo < hi, "nmse_db: empty evaluation window");

  // Panel-wise Gauss-Legendre at 64x Nyquist density.
  const double panel = nyquist_period(reference.omega0()) / 64.0;
  const auto n_panels = static_cast<std::size_t>(std::ceil((hi - lo) / panel));
  double err = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < n_panels; ++i) {
    const double a = lo + static_cast<double>(i) * panel;
    const double b = std::min(a + panel, hi);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int g = 0; g < 5; ++g) {
      const double t = mid + half * kGaussNode[g];
      const double w = half * kGaussWeight[g];
      const double fr = reference.evaluate(t);
      const double fe = estimate.evaluate(t);
      err += w * (fr - fe) * (fr - fe);
      energy += w * fr * fr;
    }
  }
  require(energy > 0.0, "nmse_db: zero-energy reference");
  return std::max(10.0 * std::log10(err / energy), -200.0);
}

}  // namespace temcodec
