#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bitstream.hpp"
#include "signal.hpp"

namespace temcodec {

// Least-squares recovery of sinc-series coefficients from interval integrals.
struct ReconConfig {
  double omega0 = 0.0;
  double grid_origin = 0.0;  // first basis center
  int n_basis = 0;

  enum class Solver { direct, iterative };
  Solver solver = Solver::direct;
  double svd_cutoff = 1e-10;    // relative to the largest singular value
  int max_iterations = 2000;    // iterative mode
  double residual_tol = 1e-12;  // iterative mode, relative residual
  double guard = 0.05;          // seconds trimmed per side when scoring

  // Nyquist-spaced basis centers covering [t_first, t_last] plus
  // BandlimitedSignal::kGuard centers per side.
  static ReconConfig for_times(double omega0, double t_first, double t_last);
  void validate() const;
};

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Entry (n, k) = integral of the k-th basis sinc over [times[n], times[n+1]].
// Times must be strictly increasing.
DenseMatrix measurement_matrix(std::span<const double> times,
                               const ReconConfig& config);

struct ReconResult {
  BandlimitedSignal estimate;
  double residual = 0.0;  // ||A x - y|| / max(||y||, tiny)
  int iterations = 0;     // 0 for the direct solver
  int rank = 0;           // retained singular values (direct solver)
  std::string solver;     // "direct" | "iterative"
  std::vector<double> residual_trace;  // per-iteration, iterative mode only
};

// Direct mode: truncated-SVD least squares (singular values below
// cutoff * sigma_max dropped). Iterative mode: conjugate-gradient residual
// correction on the normal equations from a zero start; its residual norm is
// non-increasing per iteration. Throws DegenerateSystemError when the
// operator has no usable singular values.
ReconResult reconstruct(const Measurements& measurements,
                        const ReconConfig& config);

// 10 log10( int |ref - est|^2 / int |ref|^2 ) over the intersection of the
// nominal supports shrunk by `guard` per side; clamped below at -200 dB.
// Throws on a zero-energy reference.
double nmse_db(const BandlimitedSignal& reference, const BandlimitedSignal& estimate,
               double guard);

}  // namespace temcodec
