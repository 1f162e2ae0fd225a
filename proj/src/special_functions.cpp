#include "sphdiff/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sphdiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;
constexpr double kEulerGamma = 0.57721566490153286060651209;

constexpr double kSeriesLimit = 2.0;
constexpr double kSeriesCutoff = 1e-17;
constexpr int kMaxSeriesTerms = 600;
constexpr int kMaxFractionTerms = 1000000;

double asymptotic_threshold(double nu) { return std::max(30.0, nu * nu); }

// cos(pi a), sin(pi a) with the argument reduced first so that exact
// half-integers give exact zeros.
double cospi(double a) {
  const double r = a - 2.0 * std::floor(a / 2.0);
  if (r == 0.5 || r == 1.5) return 0.0;
  return std::cos(kPi * r);
}
double sinpi(double a) {
  const double r = a - 2.0 * std::floor(a / 2.0);
  if (r == 0.0 || r == 1.0) return 0.0;
  return std::sin(kPi * r);
}

// Ascending series for J_a(x), any real a that is not a negative integer.
double j_series(double a, double x) {
  if (x == 0.0) {
    if (a == 0.0) return 1.0;
    if (a > 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  const double half = 0.5 * x;
  double t;
  if (a >= 0.0) {
    t = std::exp(a * std::log(half) - std::lgamma(a + 1.0));
  } else {
    t = std::pow(half, a) / std::tgamma(a + 1.0);
  }
  const double q = -half * half;
  double sum = t;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    t *= q / (k * (a + k));
    sum += t;
    if (std::abs(t) < kSeriesCutoff * std::abs(sum)) break;
  }
  return sum;
}

// Integer-order Y_n(x), n >= 0, from the limiting form of the reflection
// formula (Neumann series).
double y_integer_series(int n, double x) {
  const double half = 0.5 * x;
  const double q = half * half;

  double head = 0.0;
  if (n > 0) {
    // sum_{k<n} (n-k-1)!/k! q^k
    double term = std::tgamma(static_cast<double>(n));
    head = term;
    for (int k = 1; k < n; ++k) {
      term *= q / (static_cast<double>(k) * static_cast<double>(n - k));
      head += term;
    }
    head *= -std::pow(half, -n) / kPi;
  }

  const double jn = j_series(n, x);
  const double log_part = (2.0 / kPi) * std::log(half) * jn;

  double psi_a = -kEulerGamma;  // psi(k + 1)
  double psi_b = -kEulerGamma;  // psi(n + k + 1)
  for (int j = 1; j <= n; ++j) psi_b += 1.0 / j;
  double t = std::exp(n * std::log(half) - std::lgamma(n + 1.0));
  double tail = t * (psi_a + psi_b);
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    t *= -q / (static_cast<double>(k) * static_cast<double>(n + k));
    psi_a += 1.0 / k;
    psi_b += 1.0 / (n + k);
    const double term = t * (psi_a + psi_b);
    tail += term;
    if (std::abs(term) < kSeriesCutoff * std::abs(tail)) break;
  }
  return head + log_part - tail / kPi;
}

// Steed's method (continued fractions CF1 and CF2), nu >= 0, x >= 2.
BesselPair jy_steed(double nu, double x) {
  const int nl = std::max(0, static_cast<int>(nu - x + 1.5));
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / kPi;

  int isign = 1;
  double h = nu * xi;
  if (h < kFpMin) h = kFpMin;
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int i = 0;
  for (; i < kMaxFractionTerms; ++i) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  if (i == kMaxFractionTerms) throw DomainError("bessel: CF1 did not converge");

  double rjl = isign * kFpMin;
  double rjpl = h * rjl;
  const double rjl1 = rjl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  double a = 0.25 - xmu2;
  double p = -0.5 * xi;
  double q = 1.0;
  const double br = 2.0 * x;
  double bi = 2.0;
  fact = a * xi / (p * p + q * q);
  double cr = br + q * fact;
  double ci = bi + p * fact;
  double den = br * br + bi * bi;
  double dr = br / den;
  double di = -bi / den;
  double dlr = cr * dr - ci * di;
  double dli = cr * di + ci * dr;
  double temp = p * dlr - q * dli;
  q = p * dli + q * dlr;
  p = temp;
  for (i = 1; i < kMaxFractionTerms; ++i) {
    a += 2 * i;
    bi += 2.0;
    dr = a * dr + br;
    di = a * di + bi;
    if (std::abs(dr) + std::abs(di) < kFpMin) dr = kFpMin;
    fact = a / (cr * cr + ci * ci);
    cr = br + cr * fact;
    ci = bi - ci * fact;
    if (std::abs(cr) + std::abs(ci) < kFpMin) cr = kFpMin;
    den = dr * dr + di * di;
    dr /= den;
    di /= -den;
    dlr = cr * dr - ci * di;
    dli = cr * di + ci * dr;
    temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    if (std::abs(dlr - 1.0) + std::abs(dli) <= kEps) break;
  }
  if (i == kMaxFractionTerms) throw DomainError("bessel: CF2 did not converge");

  const double gam = (p - f) / q;
  double rjmu = std::sqrt(w / ((p - f) * gam + q));
  rjmu = std::copysign(rjmu, rjl);
  double rymu = rjmu * gam;
  const double rymup = rymu * (p + q / gam);
  double ry1 = xmu * xi * rymu - rymup;
  const double scale = rjmu / rjl;
  for (int k = 1; k <= nl; ++k) {
    const double rytemp = (xmu + k) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = rytemp;
  }
  return {rjl1 * scale, rymu};
}

// Hankel's expansion for large x.
BesselPair jy_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  const double inv8x = 1.0 / (8.0 * x);
  double p = 1.0;
  double q = 0.0;
  double t = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = t * (mu - odd * odd) * inv8x / k;
    if (std::abs(next) >= last) break;  // smallest term reached
    t = next;
    last = std::abs(t);
    switch (k % 4) {
      case 1: q += t; break;
      case 2: p -= t; break;
      case 3: q -= t; break;
      default: p += t; break;
    }
    if (last < 1e-17 * std::abs(p)) break;
  }
  // cos/sin(x - phase) expanded so x enters the libm call unrounded.
  const double phase = (0.5 * nu + 0.25);
  const double cp = cospi(phase);
  const double sp = sinpi(phase);
  const double cx = std::cos(x);
  const double sx = std::sin(x);
  const double cw = cx * cp + sx * sp;
  const double sw = sx * cp - cx * sp;
  const double amp = std::sqrt(2.0 / (kPi * x));
  return {amp * (p * cw - q * sw), amp * (p * sw + q * cw)};
}

bool near_integer(double nu) {
  return std::abs(nu - std::round(nu)) < kIntegerOrderSnap;
}

// nu >= 0, x >= kSeriesLimit.
BesselPair jy_large(double nu, double x) {
  if (x >= asymptotic_threshold(nu)) return jy_asymptotic(nu, x);
  return jy_steed(nu, x);
}

double y_small(double nu, double x) {
  if (near_integer(nu)) {
    return y_integer_series(static_cast<int>(std::round(nu)), x);
  }
  return (j_series(nu, x) * cospi(nu) - j_series(-nu, x)) / sinpi(nu);
}

BesselPair jy_any(double nu, double x) {
  if (x < kSeriesLimit) return {j_series(nu, x), y_small(nu, x)};
  if (nu >= 0.0) return jy_large(nu, x);
  // J_{-m} = cos(m pi) J_m - sin(m pi) Y_m ; Y_{-m} = sin(m pi) J_m + cos(m pi) Y_m
  const double m = -nu;
  const BesselPair pos = jy_large(m, x);
  const double c = cospi(m);
  const double s = sinpi(m);
  return {c * pos.j - s * pos.y, s * pos.j + c * pos.y};
}

}  // namespace

Order::Order(double nu) : nu_(nu) {
  if (!std::isfinite(nu)) throw DomainError("bessel order must be finite");
  if (nu < -0.5) throw DomainError("bessel order must be >= -1/2");
}

double bessel_j(Order nu, double x) {
  if (!(x >= 0.0)) throw DomainError("bessel_j: x must be >= 0");
  if (x < kSeriesLimit) return j_series(nu.value(), x);
  return jy_any(nu.value(), x).j;
}

double bessel_y(Order nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_y: x must be > 0");
  if (x < kSeriesLimit) return y_small(nu.value(), x);
  return jy_any(nu.value(), x).y;
}

BesselPair bessel_jy(Order nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_jy: x must be > 0");
  return jy_any(nu.value(), x);
}

double legendre_p(int l, double x) {
  if (l < 0) throw DomainError("legendre_p: l must be >= 0");
  if (!(std::abs(x) <= 1.0)) throw DomainError("legendre_p: |x| must be <= 1");
  if (l == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void legendre_p_all(int lmax, double x, std::span<double> out) {
  if (lmax < 0) throw DomainError("legendre_p_all: lmax must be >= 0");
  if (!(std::abs(x) <= 1.0)) throw DomainError("legendre_p_all: |x| must be <= 1");
  if (out.size() < static_cast<std::size_t>(lmax) + 1) {
    throw DomainError("legendre_p_all: output span too small");
  }
  out[0] = 1.0;
  if (lmax >= 1) out[1] = x;
  for (int k = 2; k <= lmax; ++k) {
    out[k] = ((2.0 * k - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
  }
}

double assoc_legendre(int l, int m, double x) {
  if (l < 0 || std::abs(m) > l) {
    throw DomainError("assoc_legendre: need l >= 0 and |m| <= l");
  }
  if (!(std::abs(x) <= 1.0)) throw DomainError("assoc_legendre: |x| must be <= 1");
  if (m < 0) {
    const int am = -m;
    // (l - am)! / (l + am)!
    const double ratio = std::exp(std::lgamma(l - am + 1.0) - std::lgamma(l + am + 1.0));
    const double sign = (am % 2 == 0) ? 1.0 : -1.0;
    return sign * ratio * assoc_legendre(l, am, x);
  }
  // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  for (int k = 1; k <= m; ++k) pmm *= -(2.0 * k - 1.0) * s;
  if (l == m) return pmm;
  double pm1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pm1;
  double pl = 0.0;
  for (int k = m + 2; k <= l; ++k) {
    pl = (x * (2.0 * k - 1.0) * pm1 - (k + m - 1.0) * pmm) / (k - m);
    pmm = pm1;
    pm1 = pl;
  }
  return pl;
}

void normalized_legendre_table(int lmax, double x, double s, std::span<double> out) {
  if (lmax < 0) throw DomainError("normalized_legendre_table: lmax must be >= 0");
  if (out.size() < tri_size(lmax)) {
    throw DomainError("normalized_legendre_table: output span too small");
  }
  // The two (-1)^m factors of d_lm and P_l^m cancel, so every diagonal
  // entry is nonnegative.
  double diag = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) diag *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    out[tri_index(m, m)] = diag;
    if (m == lmax) break;
    double prev2 = diag;
    double prev1 = x * std::sqrt(2.0 * m + 3.0) * diag;
    out[tri_index(m + 1, m)] = prev1;
    const double m2 = static_cast<double>(m) * m;
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = static_cast<double>(l) * l;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double lm1 = l - 1.0;
      const double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
      const double cur = a * (x * prev1 - b * prev2);
      out[tri_index(l, m)] = cur;
      prev2 = prev1;
      prev1 = cur;
    }
  }
}

std::complex<double> sph_harm(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) throw DomainError("sph_harm: need l >= 0 and |m| <= l");
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("sph_harm: theta outside [0, pi]");
  if (!std::isfinite(phi)) throw DomainError("sph_harm: phi must be finite");
  const int am = std::abs(m);
  const double x = std::cos(theta);
  // Column am of the normalised table, l' = am..l.
  const double s = std::sin(theta);
  double diag = 1.0 / std::sqrt(4.0 * kPi);
  for (int k = 1; k <= am; ++k) diag *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  double value = diag;
  if (l > am) {
    double prev2 = diag;
    double prev1 = x * std::sqrt(2.0 * am + 3.0) * diag;
    const double m2 = static_cast<double>(am) * am;
    for (int k = am + 2; k <= l; ++k) {
      const double k2 = static_cast<double>(k) * k;
      const double a = std::sqrt((4.0 * k2 - 1.0) / (k2 - m2));
      const double km1 = k - 1.0;
      const double b = std::sqrt((km1 * km1 - m2) / (4.0 * km1 * km1 - 1.0));
      const double cur = a * (x * prev1 - b * prev2);
      prev2 = prev1;
      prev1 = cur;
    }
    value = prev1;
  }
  const std::complex<double> y = value * std::polar(1.0, am * phi);
  if (m >= 0) return y;
  return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace sphdiff
