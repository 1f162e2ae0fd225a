#include "sphdiff/synthesis_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sphdiff {

namespace {
constexpr double kPi = std::numbers::pi;
}

SynthesisPlan::SynthesisPlan(int lmax, std::vector<double> theta, int n_phi)
    : lmax_(lmax), n_phi_(n_phi), theta_(std::move(theta)) {
  if (lmax < 0) throw DomainError("synthesis plan: lmax must be >= 0");
  if (theta_.empty() || n_phi < 1) throw DomainError("synthesis plan: empty grid");
  for (double t : theta_) {
    if (!(t >= 0.0 && t <= kPi)) throw DomainError("synthesis plan: theta outside [0, pi]");
  }
  if (theta_.size() * static_cast<std::size_t>(n_phi) > kMaxGridPoints) {
    throw ResourceError("grid of " + std::to_string(theta_.size()) + " x " +
                        std::to_string(n_phi) + " exceeds the size cap");
  }

  const std::size_t tri = tri_size(lmax);
  rec_a_.assign(tri, 0.0);
  rec_b_.assign(tri, 0.0);
  diag_step_.assign(static_cast<std::size_t>(lmax) + 1, 0.0);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) diag_step_[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    if (m < lmax) rec_a_[tri_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0);
    const double m2 = static_cast<double>(m) * m;
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = static_cast<double>(l) * l;
      const double lm1 = l - 1.0;
      rec_a_[tri_index(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      rec_b_[tri_index(l, m)] = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
    }
  }

  cos_tab_.resize(n_phi);
  sin_tab_.resize(n_phi);
  for (int k = 0; k < n_phi; ++k) {
    const double a = 2.0 * kPi * k / n_phi;
    cos_tab_[k] = std::cos(a);
    sin_tab_[k] = std::sin(a);
  }

  if (theta_.size() * tri * sizeof(double) <= kPlanCacheBytes) {
    std::vector<double> rows(theta_.size() * tri);
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      legendre_row(static_cast<int>(i), std::span<double>(rows).subspan(i * tri, tri));
    }
    rows_ = std::move(rows);
  }
}

void SynthesisPlan::legendre_row(int i, std::span<double> out) const {
  const std::size_t tri = tri_size(lmax_);
  if (!rows_.empty()) {
    std::copy_n(rows_.begin() + static_cast<std::ptrdiff_t>(i * tri), tri, out.begin());
    return;
  }
  const double x = std::cos(theta_[i]);
  const double s = std::sin(theta_[i]);
  double diag = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= lmax_; ++m) {
    if (m > 0) diag *= diag_step_[m] * s;
    out[tri_index(m, m)] = diag;
    if (m == lmax_) break;
    double prev2 = diag;
    double prev1 = x * rec_a_[tri_index(m + 1, m)] * diag;
    out[tri_index(m + 1, m)] = prev1;
    for (int l = m + 2; l <= lmax_; ++l) {
      const std::size_t k = tri_index(l, m);
      const double cur = rec_a_[k] * (x * prev1 - rec_b_[k] * prev2);
      out[k] = cur;
      prev2 = prev1;
      prev1 = cur;
    }
  }
}

void SynthesisPlan::row(const HarmonicCoefficients& a, int i, std::span<double> leg,
                        std::span<std::complex<double>> b, double* out) const {
  const int la = a.lmax();
  const double* lam = leg.data();
  if (!rows_.empty()) {
    lam = rows_.data() + static_cast<std::size_t>(i) * tri_size(lmax_);
  } else {
    legendre_row(i, leg);
  }
  std::fill(b.begin(), b.begin() + la + 1, std::complex<double>(0.0));
  const auto coef = a.data();
  for (int l = 0; l <= la; ++l) {
    // coefficient and plan tables share the tri_index layout up to la
    const std::size_t base = tri_index(l, 0);
    for (int m = 0; m <= l; ++m) b[m] += coef[base + m] * lam[base + m];
  }
  const long long n = n_phi_;
  for (int j = 0; j < n_phi_; ++j) {
    const double v = b[0].real();
    double acc = 0.0;
    long long k = 0;
    for (int m = 1; m <= la; ++m) {
      k += j;
      if (k >= n) k -= n;
      acc += b[m].real() * cos_tab_[k] - b[m].imag() * sin_tab_[k];
    }
    out[j] = v + 2.0 * acc;
  }
}

void SynthesisPlan::run_serial(const HarmonicCoefficients& a, std::span<double> out) const {
  if (a.lmax() > lmax_) throw DomainError("coefficients exceed the plan's lmax");
  if (out.size() < theta_.size() * static_cast<std::size_t>(n_phi_)) {
    throw DomainError("synthesis output span too small");
  }
  std::vector<double> leg(rows_.empty() ? tri_size(lmax_) : 0);
  std::vector<std::complex<double>> b(static_cast<std::size_t>(lmax_) + 1);
  for (int i = 0; i < n_theta(); ++i) {
    row(a, i, leg, b, out.data() + static_cast<std::size_t>(i) * n_phi_);
  }
}

void SynthesisPlan::run_parallel(const HarmonicCoefficients& a, std::span<double> out) const {
  if (a.lmax() > lmax_) throw DomainError("coefficients exceed the plan's lmax");
  if (out.size() < theta_.size() * static_cast<std::size_t>(n_phi_)) {
    throw DomainError("synthesis output span too small");
  }
  const int rows = n_theta();
#pragma omp parallel
  {
    std::vector<double> leg(rows_.empty() ? tri_size(lmax_) : 0);
    std::vector<std::complex<double>> b(static_cast<std::size_t>(lmax_) + 1);
#pragma omp for schedule(static)
    for (int i = 0; i < rows; ++i) {
      row(a, i, leg, b, out.data() + static_cast<std::size_t>(i) * n_phi_);
    }
  }
}

DirectSynthesis synthesize_direct(const HarmonicCoefficients& a, std::span<const double> theta,
                                  int n_phi) {
  const int L = a.lmax();
  DirectSynthesis out{std::vector<double>(theta.size() * static_cast<std::size_t>(n_phi)), 0.0};
  std::vector<double> lam(tri_size(L));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    normalized_legendre_table(L, std::cos(theta[i]), std::sin(theta[i]), lam);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * kPi * j / n_phi;
      std::complex<double> sum = 0.0;
      for (int l = 0; l <= L; ++l) {
        for (int m = -l; m <= l; ++m) {
          const int am = std::abs(m);
          std::complex<double> y = lam[tri_index(l, am)] * std::polar(1.0, am * phi);
          if (m < 0) y = ((am % 2) ? -1.0 : 1.0) * std::conj(y);
          sum += a(l, m) * y;
        }
      }
      out.values[i * n_phi + j] = sum.real();
      out.max_imag = std::max(out.max_imag, std::abs(sum.imag()));
    }
  }
  return out;
}

}  // namespace sphdiff
