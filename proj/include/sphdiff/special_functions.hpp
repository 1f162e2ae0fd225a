// Real-order Bessel functions, Legendre functions and complex spherical
// harmonics. Everything here is a pure function of its arguments.

#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphdiff {

class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Bessel order, nu >= -1/2 and finite.
class Order {
 public:
  explicit Order(double nu);
  double value() const { return nu_; }

 private:
  double nu_;
};

struct BesselPair {
  double j;
  double y;
};

/// J_nu(x) for x >= 0.
///
/// Evaluation regions (x_asym = max(30, nu^2)):
///   x < x_series      ascending power series, stopped once a term drops
///                     below 1e-17 of the partial sum (x_series = 2: the
///                     alternating series loses digits to cancellation
///                     beyond that);
///   x < x_asym        Steed's continued fractions (CF1 for J'/J, CF2 for
///                     (J' + iY')/(J + iY)) normalised by the Wronskian;
///   otherwise         Hankel asymptotic expansion, truncated at its
///                     smallest term.
double bessel_j(Order nu, double x);

/// Y_nu(x) for x > 0. Below x_series the reflection formula is used for
/// noninteger orders; within 1e-6 of an integer the order is snapped to
/// that integer and the integer-order series is used instead.
double bessel_y(Order nu, double x);

/// J_nu(x) and Y_nu(x) together (x > 0). Cheaper than two calls when the
/// continued-fraction or asymptotic region is hit.
BesselPair bessel_jy(Order nu, double x);

/// Distance below which an order is treated as an integer by bessel_y.
inline constexpr double kIntegerOrderSnap = 1e-6;

/// P_l(x), |x| <= 1, by the three-term recurrence.
double legendre_p(int l, double x);

/// P_l(x) for l = 0..lmax written into out (size lmax + 1).
void legendre_p_all(int lmax, double x, std::span<double> out);

/// Associated Legendre function with the Condon-Shortley factor included:
/// P_l^m(x) = (-1)^m (1 - x^2)^{m/2} d^m/dx^m P_l(x). Negative m follows
/// P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m.
double assoc_legendre(int l, int m, double x);

/// Complex spherical harmonic Y_lm(theta, phi) = d_lm e^{i m phi}
/// P_l^m(cos theta), d_lm = (-1)^m sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!).
std::complex<double> sph_harm(int l, int m, double theta, double phi);

/// Index of (l, m >= 0) in a triangular array ordered by l then m.
constexpr std::size_t tri_index(int l, int m) {
  return static_cast<std::size_t>(l) * static_cast<std::size_t>(l + 1) / 2 +
         static_cast<std::size_t>(m);
}
constexpr std::size_t tri_size(int lmax) { return tri_index(lmax + 1, 0); }

/// Orthonormalised Legendre values lambda_lm(theta) = Y_lm(theta, 0) for
/// 0 <= m <= l <= lmax, written in tri_index order. Takes cos and sin of
/// theta separately so that sin is not recovered from cos near the poles.
/// out must hold tri_size(lmax) values.
void normalized_legendre_table(int lmax, double cos_theta, double sin_theta,
                               std::span<double> out);

struct GaussLegendreRule {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
GaussLegendreRule gauss_legendre(int n);

}  // namespace sphdiff
