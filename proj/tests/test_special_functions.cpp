#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sphdiff/special_functions.hpp"
#include "support/half_integer_bessel.hpp"

using namespace sphdiff;
using sphdiff::testing::j_half;
using sphdiff::testing::y_half;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

// P_l^m(x) straight from (-1)^m (1-x^2)^{m/2} d^m/dx^m P_l(x), using the
// explicit coefficient form of P_l. Long double throughout.
long double legendre_by_derivative(int l, int m, long double x) {
  auto binom = [](int n, int k) {
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  // P_l(x) = 2^{-l} sum_k (-1)^k C(l,k) C(2l-2k, l) x^{l-2k}
  std::vector<long double> coeff(l + 1, 0.0L);
  for (int k = 0; 2 * k <= l; ++k) {
    coeff[l - 2 * k] = ((k % 2) ? -1.0L : 1.0L) * binom(l, k) * binom(2 * l - 2 * k, l) /
                       std::pow(2.0L, l);
  }
  for (int d = 0; d < m; ++d) {
    for (int p = 0; p < l; ++p) coeff[p] = coeff[p + 1] * (p + 1);
    coeff[l - d] = 0.0L;
  }
  long double poly = 0.0L;
  for (int p = l; p >= 0; --p) poly = poly * x + coeff[p];
  const long double sign = (m % 2) ? -1.0L : 1.0L;
  return sign * std::pow(1.0L - x * x, m / 2.0L) * poly;
}

double angular_distance(double t1, double p1, double t2, double p2) {
  const double c = std::cos(t1) * std::cos(t2) + std::sin(t1) * std::sin(t2) * std::cos(p1 - p2);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TEST_CASE("bessel_j examples") {
  CHECK(bessel_j(Order(0.0), 0.0) == 1.0);
  CHECK(bessel_j(Order(1.5), 0.0) == 0.0);
  CHECK(std::abs(bessel_j(Order(0.5), kPi)) < 1e-15);
  CHECK(rel_err(bessel_j(Order(1.5), 2.0), j_half(3, 2.0)) < 1e-10);
}

TEST_CASE("bessel_y examples") {
  CHECK(std::abs(bessel_y(Order(0.5), kPi / 2)) < 1e-15);
  CHECK(rel_err(bessel_y(Order(1.5), 1.0), y_half(3, 1.0)) < 1e-10);
  const double x = 3.0;
  const double w = bessel_j(Order(2.7), x) * bessel_y(Order(1.7), x) -
                   bessel_j(Order(1.7), x) * bessel_y(Order(2.7), x);
  CHECK(w == doctest::Approx(2.0 / (3.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("bessel domain errors") {
  CHECK_THROWS_AS(bessel_j(Order(1.0), -0.1), DomainError);
  CHECK_THROWS_AS(Order(-0.6), DomainError);
  CHECK_THROWS_AS(Order(NAN), DomainError);
  CHECK_THROWS_AS(bessel_y(Order(1.0), 0.0), DomainError);
  CHECK_THROWS_AS(bessel_y(Order(1.0), -2.0), DomainError);
}

TEST_CASE("half-integer closed forms across all evaluation regions") {
  double worst = 0.0;
  for (int twice_nu : {1, 3, 5}) {
    const double nu = twice_nu / 2.0;
    for (int i = 0; i <= 4000; ++i) {
      const double x = 0.1 * std::pow(1000.0, i / 4000.0);
      worst = std::max(worst, rel_err(bessel_j(Order(nu), x), j_half(twice_nu, x)));
      worst = std::max(worst, rel_err(bessel_y(Order(nu), x), y_half(twice_nu, x)));
      const BesselPair both = bessel_jy(Order(nu), x);
      CHECK(both.j == bessel_j(Order(nu), x));
      CHECK(both.y == bessel_y(Order(nu), x));
    }
  }
  MESSAGE("worst relative error: " << worst);
  CHECK(worst < 1e-10);
}

TEST_CASE("negative order -1/2 and small order") {
  for (double x : {0.3, 5.0, 13.0, 40.0, 250.0}) {
    // J_{-1/2} = -Y_{1/2}, Y_{-1/2} = J_{1/2}
    CHECK(rel_err(bessel_j(Order(-0.5), x), -y_half(1, x)) < 1e-10);
    CHECK(rel_err(bessel_y(Order(-0.5), x), j_half(1, x)) < 1e-10);
  }
}

TEST_CASE("Wronskian over nu in [0.6, 5], x in [0.5, 50]") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unu(0.6, 5.0), ux(0.5, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double nu = unu(gen), x = ux(gen);
    const auto a = bessel_jy(Order(nu), x);
    const auto b = bessel_jy(Order(nu + 1.0), x);
    const double w = b.j * a.y - a.j * b.y;
    const double target = 2.0 / (kPi * x);
    worst = std::max(worst, std::abs(w - target) / (1.0 + target));
  }
  MESSAGE("worst scaled Wronskian defect: " << worst);
  CHECK(worst <= 1e-9);
}

TEST_CASE("integer orders go through the limit route") {
  // Y_n continuity across the snap radius and Wronskian at the integer.
  for (double x : {0.7, 3.0, 9.5, 20.0}) {
    const double at = bessel_y(Order(2.0), x);
    const double below = bessel_y(Order(2.0 - 2e-6), x);
    const double above = bessel_y(Order(2.0 + 2e-6), x);
    CHECK(std::isfinite(at));
    CHECK(std::abs(at - below) < 1e-4 * (1.0 + std::abs(at)));
    CHECK(std::abs(at - above) < 1e-4 * (1.0 + std::abs(at)));
    const double w = bessel_j(Order(3.0), x) * bessel_y(Order(2.0), x) -
                     bessel_j(Order(2.0), x) * bessel_y(Order(3.0), x);
    CHECK(w == doctest::Approx(2.0 / (kPi * x)).epsilon(1e-10));
  }
  // Y_0 reference value.
  CHECK(bessel_y(Order(0.0), 1.0) == doctest::Approx(0.088256964215676957983).epsilon(1e-13));
  CHECK(bessel_y(Order(1.0), 2.0) == doctest::Approx(-0.10703243154093754689).epsilon(1e-13));
}

TEST_CASE("sqrt(x) J_nu(x) stays bounded up to 1e4") {
  for (double nu : {0.5, 1.5, 2.5, 3.7}) {
    double max_all = 0.0, max_far = 0.0;
    for (int i = 1; i <= 20000; ++i) {
      const double x = 1e-3 * std::pow(1e7, i / 20000.0);
      const double v = std::abs(std::sqrt(x) * bessel_j(Order(nu), x));
      max_all = std::max(max_all, v);
      if (x > 1e3) max_far = std::max(max_far, v);
    }
    CHECK(max_all < 1.0);
    CHECK(max_far <= std::sqrt(2.0 / kPi) * 1.001);
  }
}

TEST_CASE("legendre_p") {
  CHECK(legendre_p(0, 0.3) == 1.0);
  CHECK(legendre_p(5, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(legendre_p(2, 0.5) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK_THROWS_AS(legendre_p(3, 1.01), DomainError);
  for (int l = 0; l < 300; l += 7) {
    for (double x = -1.0; x <= 1.0; x += 0.01) CHECK(std::abs(legendre_p(l, x)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("assoc_legendre") {
  CHECK(assoc_legendre(1, 0, 0.7) == doctest::Approx(0.7));
  CHECK(assoc_legendre(1, 1, 0.0) == doctest::Approx(-1.0));
  const long double oracle = legendre_by_derivative(10, 7, 0.4L);
  CHECK(assoc_legendre(10, 7, 0.4) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));
  for (int l = 0; l <= 12; ++l) {
    for (int m = 0; m <= l; ++m) {
      for (double x : {-0.9, -0.2, 0.35, 0.8}) {
        const double want = static_cast<double>(legendre_by_derivative(l, m, x));
        CHECK(assoc_legendre(l, m, x) ==
              doctest::Approx(want).epsilon(1e-11).scale(1.0));
      }
    }
  }
  // negative m identity: P_3^{-2} = (1!/5!) P_3^2
  CHECK(assoc_legendre(3, -2, 0.3) == doctest::Approx(assoc_legendre(3, 2, 0.3) / 120.0));
  CHECK_THROWS_AS(assoc_legendre(2, 3, 0.1), DomainError);
  CHECK_THROWS_AS(assoc_legendre(2, 1, -1.5), DomainError);
}

TEST_CASE("sph_harm examples and conventions") {
  CHECK(sph_harm(0, 0, 1.0, 2.0).real() == doctest::Approx(1.0 / std::sqrt(4 * kPi)));
  CHECK(sph_harm(1, 0, 0.0, 0.0).real() == doctest::Approx(std::sqrt(3.0 / (4 * kPi))));
  CHECK_THROWS_AS(sph_harm(2, 3, 0.1, 0.1), DomainError);
  // Matches the d_lm P_l^m definition directly.
  for (int l = 0; l <= 8; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double th = 0.73, ph = 2.1;
      const double dlm = (m % 2 == 0 ? 1.0 : -1.0) *
                         std::sqrt((2 * l + 1) / (4 * kPi) *
                                   std::exp(std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0)));
      const auto want = dlm * std::polar(1.0, m * ph) * assoc_legendre(l, m, std::cos(th));
      const auto got = sph_harm(l, m, th, ph);
      CHECK(std::abs(got - want) < 1e-12);
    }
  }
}

TEST_CASE("addition formula") {
  auto check_pair = [](int l, double t1, double p1, double t2, double p2) {
    std::complex<double> sum = 0.0;
    for (int m = -l; m <= l; ++m) sum += sph_harm(l, m, t1, p1) * std::conj(sph_harm(l, m, t2, p2));
    const double want = (2 * l + 1) / (4 * kPi) * legendre_p(l, std::cos(angular_distance(t1, p1, t2, p2)));
    return std::abs(sum - want);
  };
  CHECK(check_pair(6, 0.3, 1.1, 1.2, 4.0) < 1e-12);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ut(0.0, kPi), up(0.0, 2 * kPi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t1 = ut(gen), p1 = up(gen), t2 = ut(gen), p2 = up(gen);
    for (int l = 0; l <= 64; ++l) worst = std::max(worst, check_pair(l, t1, p1, t2, p2));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("orthonormality on a Gauss-Legendre x uniform grid") {
  const int lmax = 32;
  const auto rule = gauss_legendre(lmax + 1);
  const int nphi = 2 * lmax + 1;
  const std::size_t npts = rule.nodes.size() * nphi;
  // values[(l, m)] over all grid points, with quadrature weights folded into w.
  std::vector<std::vector<std::complex<double>>> values;
  std::vector<std::pair<int, int>> lm;
  std::vector<double> w(npts);
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      std::vector<std::complex<double>> v(npts);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double th = std::acos(rule.nodes[i]);
        for (int j = 0; j < nphi; ++j) {
          v[i * nphi + j] = sph_harm(l, m, th, 2 * kPi * j / nphi);
          w[i * nphi + j] = rule.weights[i] * 2 * kPi / nphi;
        }
      }
      values.push_back(std::move(v));
      lm.emplace_back(l, m);
    }
  }
  auto inner = [&](std::size_t a, std::size_t b) {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < npts; ++k) s += w[k] * values[a][k] * std::conj(values[b][k]);
    return s;
  };
  double worst = 0.0;
  // Every pair sharing m (orthogonality comes from the theta quadrature).
  for (std::size_t a = 0; a < lm.size(); ++a)
    for (std::size_t b = a; b < lm.size(); ++b)
      if (lm[a].second == lm[b].second)
        worst = std::max(worst, std::abs(inner(a, b) - (a == b ? 1.0 : 0.0)));
  // A random sample of pairs with different m.
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::size_t> pick(0, lm.size() - 1);
  for (int k = 0; k < 3000; ++k) {
    const auto a = pick(gen), b = pick(gen);
    if (lm[a].second == lm[b].second) continue;
    worst = std::max(worst, std::abs(inner(a, b)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("normalized table agrees with sph_harm") {
  const int lmax = 40;
  std::vector<double> table(tri_size(lmax));
  for (double th : {0.01, 0.9, 2.5}) {
    normalized_legendre_table(lmax, std::cos(th), std::sin(th), table);
    for (int l = 0; l <= lmax; ++l)
      for (int m = 0; m <= l; ++m)
        CHECK(table[tri_index(l, m)] == doctest::Approx(sph_harm(l, m, th, 0.0).real()).epsilon(1e-12).scale(1e-300));
  }
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 17, 64}) {
    const auto rule = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
      const double want = (deg % 2) ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(want).epsilon(1e-13).scale(1.0));
    }
  }
}
