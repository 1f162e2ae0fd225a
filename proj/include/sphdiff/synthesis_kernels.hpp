// Grid synthesis kernels. The serial and OpenMP paths run the same per-row
// code; synthesize_direct is the slow complex-sum reference used by tests
// and the benchmark.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sphdiff/field.hpp"

namespace sphdiff {

/// Everything about a grid that does not depend on the coefficients:
/// Legendre recurrence constants, per-row Legendre values when they fit in
/// kPlanCacheBytes, and the phase table cos/sin(2 pi k / n_phi).
class SynthesisPlan {
 public:
  SynthesisPlan(int lmax, std::vector<double> theta, int n_phi);

  int lmax() const { return lmax_; }
  int n_theta() const { return static_cast<int>(theta_.size()); }
  int n_phi() const { return n_phi_; }
  std::span<const double> theta() const { return theta_; }
  bool caches_rows() const { return !rows_.empty(); }

  /// out holds n_theta * n_phi values, row-major. a.lmax() <= lmax().
  void run_serial(const HarmonicCoefficients& a, std::span<double> out) const;
  void run_parallel(const HarmonicCoefficients& a, std::span<double> out) const;

  /// lambda_lm(theta_i) for row i, tri_index order (tri_size(lmax) values).
  void legendre_row(int i, std::span<double> out) const;

 private:
  void row(const HarmonicCoefficients& a, int i, std::span<double> leg,
           std::span<std::complex<double>> b, double* out) const;

  int lmax_;
  int n_phi_;
  std::vector<double> theta_;
  std::vector<double> rec_a_, rec_b_;  // tri_index layout, l >= m + 2
  std::vector<double> diag_step_;      // sqrt((2m+1)/(2m))
  std::vector<double> rows_;           // cached tables, n_theta * tri_size
  std::vector<double> cos_tab_, sin_tab_;
};

inline constexpr std::size_t kPlanCacheBytes = std::size_t{96} << 20;

struct DirectSynthesis {
  std::vector<double> values;  // real parts
  double max_imag;             // largest |imaginary part| over the grid
};

/// Full complex double sum over -l <= m <= l with sph_harm at every node.
DirectSynthesis synthesize_direct(const HarmonicCoefficients& a, std::span<const double> theta,
                                  int n_phi);

}  // namespace sphdiff
