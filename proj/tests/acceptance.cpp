// Acceptance run: one PASS/FAIL line per criterion with the measured
// quantity, its tolerance and the wall time. Exit status is the number of
// failed criteria.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sphdiff/excursion.hpp"
#include "sphdiff/special_functions.hpp"
#include "sphdiff/synthesis_kernels.hpp"
#include "support/half_integer_bessel.hpp"
#include "support/sht_oracle.hpp"

using namespace sphdiff;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

TimePoint at(const ModelParams& p, double eta) { return TimePoint::make(p, eta); }

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto p = ModelParams::unit();
  double worst = 0.0;
  int unconverged = 0;
  for (double eta : {0.1, 0.3, 0.5, 0.8}) {
    for (int l = 1; l <= 50; ++l) {
      const auto ode = evolution_factor_ode_converged(p, l, at(p, eta), 1e-3);
      unconverged += !ode.converged;
      const double f = evolution_factor(p, l, at(p, eta));
      worst = std::max(worst, std::abs(f - ode.value) / std::max(1.0, std::abs(ode.value)));
    }
  }
  return {worst <= 1e-6 && unconverged == 0,
          fmt("max |F - F_ode| / max(1,|F_ode|) = %.2e (tol 1e-6), unconverged ODE solves %d",
              worst, unconverged)};
}

Outcome half_integer() {
  using testing::j_half;
  using testing::y_half;
  double worst = 0.0;
  for (int twice_nu : {1, 3, 5}) {
    const Order nu(twice_nu / 2.0);
    for (int i = 0; i <= 4000; ++i) {
      const double x = 0.1 * std::pow(1000.0, i / 4000.0);
      const double j = j_half(twice_nu, x), y = y_half(twice_nu, x);
      worst = std::max(worst, std::abs(bessel_j(nu, x) - j) / std::abs(j));
      worst = std::max(worst, std::abs(bessel_y(nu, x) - y) / std::abs(y));
    }
  }
  std::mt19937_64 gen(20);
  std::uniform_real_distribution<double> unu(0.5, 5.0), ux(0.1, 100.0);
  double wworst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double nu = unu(gen), x = ux(gen);
    const auto a = bessel_jy(Order(nu), x);
    const auto b = bessel_jy(Order(nu + 1.0), x);
    const double target = 2.0 / (kPi * x);
    wworst = std::max(wworst, std::abs(b.j * a.y - a.j * b.y - target) / target);
  }
  return {worst <= 1e-10 && wworst <= 1e-9,
          fmt("closed forms max rel %.2e (tol 1e-10), Wronskian max rel %.2e (tol 1e-9)", worst,
              wworst)};
}

Outcome initial_conditions() {
  const auto p = ModelParams::unit();
  const double h = 1e-4;
  const auto f0 = evolution_factors(p, 512, at(p, 0.0));
  const auto fh = evolution_factors(p, 512, at(p, h));
  const auto f2h = evolution_factors(p, 512, at(p, 2.0 * h));
  double start = 0.0;
  double slope = 0.0;
  for (int l = 0; l <= 512; ++l) {
    start = std::max(start, std::abs(f0[l] - 1.0));
    // one-sided second-order difference; F'(0) = 0 leaves only O(z^4 h^2)
    const double d = (-3.0 * f0[l] + 4.0 * fh[l] - f2h[l]) / (2.0 * h);
    const double z2 = p.z(l) * p.z(l);
    slope = std::max(slope, std::abs(d) / (1.0 + z2 * z2 * h * h));
  }
  return {start <= 1e-8 && slope <= 1.0,
          fmt("max |F(0)-1| = %.2e (tol 1e-8); max |F'(0)_fd| / (1 + z^4 h^2) = %.2e (tol 1)",
              start, slope)};
}

Outcome asymptotic() {
  const auto p = ModelParams::unit();
  const auto t = at(p, 0.2);
  double mid = 0.0, last = 0.0;
  for (int l = 50; l <= 500; ++l) {
    const double r = p.z(l) * std::abs(evolution_factor(p, l, t) - evolution_factor_asymptotic(p, l, t));
    if (l > 250 && l <= 300) mid = std::max(mid, r);
    if (l > 450) last = std::max(last, r);
  }
  return {last <= 1.2 * mid,
          fmt("max z|F - asym| on l 451..500 = %.4f, on l 251..300 = %.4f, ratio %.3f (tol 1.2)",
              last, mid, last / mid)};
}

Outcome spectrum_round_trip() {
  const int lmax = 64, draws = 2000;
  const auto s = reference_spectrum(lmax);
  std::vector<double> sum(lmax + 1, 0.0), sum2(lmax + 1, 0.0);
  for (int k = 0; k < draws; ++k) {
    const auto est = empirical_spectrum(sample_coefficients(s, 1000 + k));
    for (int l = 0; l <= lmax; ++l) {
      sum[l] += est[l];
      sum2[l] += est[l] * est[l];
    }
  }
  int outside = 0;
  double worst_z = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    const double mean = sum[l] / draws;
    const double var = (sum2[l] - draws * mean * mean) / (draws - 1);
    const double se = std::sqrt(std::max(var, 0.0) / draws);
    const double dev = std::abs(mean - s[l]);
    if (se == 0.0) {
      outside += dev != 0.0;
      continue;
    }
    worst_z = std::max(worst_z, dev / se);
    outside += dev > 3.0 * se;
  }

  // Parseval on a Gauss-Legendre grid for a band-limited realization
  std::vector<double> w;
  const auto thetas = testing::gauss_thetas(lmax + 1, &w);
  const auto a = sample_coefficients(s, 77);
  const auto map = synthesize_on(a, thetas, 2 * lmax + 2);
  double integral = 0.0;
  for (int i = 0; i < map.n_theta; ++i) {
    for (int j = 0; j < map.n_phi; ++j) integral += w[i] * map.at(i, j) * map.at(i, j);
  }
  integral *= 2.0 * kPi / map.n_phi;
  double power = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    power += std::norm(a(l, 0));
    for (int m = 1; m <= l; ++m) power += 2.0 * std::norm(a(l, m));
  }
  const double parseval = std::abs(integral - power) / power;
  return {outside == 0 && parseval <= 1e-6,
          fmt("multipoles outside 3 SE: %d of %d (max |dev|/SE %.2f); Parseval rel %.2e (tol 1e-6)",
              outside, lmax + 1, worst_z, parseval)};
}

// Point at angular distance Theta from a random point, both as (theta, phi).
struct PointPair {
  double t1, p1, t2, p2;
};

PointPair random_pair(std::mt19937_64& gen, double Theta) {
  std::normal_distribution<double> n;
  double x[3], v[3];
  for (auto& c : x) c = n(gen);
  for (auto& c : v) c = n(gen);
  const double nx = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  for (auto& c : x) c /= nx;
  const double d = v[0] * x[0] + v[1] * x[1] + v[2] * x[2];
  for (int k = 0; k < 3; ++k) v[k] -= d * x[k];
  const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (auto& c : v) c /= nv;
  double y[3];
  for (int k = 0; k < 3; ++k) y[k] = std::cos(Theta) * x[k] + std::sin(Theta) * v[k];
  auto polar = [](const double* u, double& t, double& p) {
    t = std::acos(std::clamp(u[2], -1.0, 1.0));
    p = std::atan2(u[1], u[0]);
    if (p < 0.0) p += 2.0 * kPi;
    if (p >= 2.0 * kPi) p = 0.0;
  };
  PointPair r{};
  polar(x, r.t1, r.p1);
  polar(y, r.t2, r.p2);
  return r;
}

double angle_between(double t1, double p1, double t2, double p2) {
  const double c = std::cos(t1) * std::cos(t2) + std::sin(t1) * std::sin(t2) * std::cos(p1 - p2);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double min_eigen_ratio(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  return es.eigenvalues().minCoeff() / g.trace();
}

Outcome covariance_consistency() {
  const auto p = ModelParams::unit();
  const int lmax = 64, n_real = 500;
  const auto s = reference_spectrum(lmax);
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> ueta(0.0, 0.8), utheta(0.0, kPi);

  struct Query {
    double eta, Theta;
    PointPair pts;
  };
  std::vector<Query> qs;
  for (int k = 0; k < 10; ++k) {
    const double eta = ueta(gen), Theta = utheta(gen);
    qs.push_back({eta, Theta, random_pair(gen, Theta)});
  }
  std::vector<double> sum(qs.size(), 0.0), sum2(qs.size(), 0.0);
  for (int r = 0; r < n_real; ++r) {
    const auto a = sample_coefficients(s, 5000 + r);
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const auto e = evolve_coefficients(a, p, at(p, qs[k].eta));
      const auto& q = qs[k].pts;
      const double prod = evaluate_point(e, q.t1, q.p1) * evaluate_point(e, q.t2, q.p2);
      sum[k] += prod;
      sum2[k] += prod * prod;
    }
  }
  int outside = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const double mean = sum[k] / n_real;
    const double se = std::sqrt((sum2[k] - n_real * mean * mean) / (n_real - 1) / n_real);
    const double want = covariance(s, p, {at(p, qs[k].eta), at(p, qs[k].eta), qs[k].Theta});
    worst = std::max(worst, std::abs(mean - want) / se);
    outside += std::abs(mean - want) > 3.0 * se;
  }

  // Gram matrices: 20 random points at one time, and 20 random space-time points
  std::vector<PointPair> pts;
  std::vector<double> etas;
  for (int i = 0; i < 20; ++i) {
    pts.push_back(random_pair(gen, 0.0));
    etas.push_back(ueta(gen));
  }
  const auto ref = reference_spectrum(256);
  Eigen::MatrixXd g1(20, 20), g2(20, 20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double Theta = angle_between(pts[i].t1, pts[i].p1, pts[j].t1, pts[j].p1);
      g1(i, j) = covariance(ref, p, {at(p, 0.001), at(p, 0.001), Theta});
      g2(i, j) = covariance(ref, p, {at(p, etas[i]), at(p, etas[j]), Theta});
    }
  }
  const double e1 = min_eigen_ratio(g1), e2 = min_eigen_ratio(g2);
  return {outside == 0 && e1 >= -1e-8 && e2 >= -1e-8,
          fmt("MC vs exact covariance: %d of 10 outside 3 SE (max %.2f SE); Gram min "
              "eigenvalue / trace %.2e, %.2e (tol -1e-8)",
              outside, worst, e1, e2)};
}

Outcome truncation_identity() {
  const auto p = ModelParams::unit();
  const int lmax = 256, L = lmax / 2, n_real = 200;
  const auto s = reference_spectrum(lmax);
  const auto eta = at(p, 0.001);
  const double exact = truncation_error(s, p, eta, L).exact_norm;

  std::vector<double> w;
  const auto thetas = testing::gauss_thetas(lmax + 1, &w);
  const SynthesisPlan plan(lmax, thetas, 2 * lmax + 2);
  std::vector<double> buf(static_cast<std::size_t>(plan.n_theta()) * plan.n_phi());
  double mean_sq = 0.0;
  for (int r = 0; r < n_real; ++r) {
    const auto a = tail_coefficients(evolve_coefficients(sample_coefficients(s, 9000 + r), p, eta), L);
    plan.run_parallel(a, buf);
    double integral = 0.0;
    for (int i = 0; i < plan.n_theta(); ++i) {
      for (int j = 0; j < plan.n_phi(); ++j) {
        const double v = buf[static_cast<std::size_t>(i) * plan.n_phi() + j];
        integral += w[i] * v * v;
      }
    }
    mean_sq += integral * 2.0 * kPi / plan.n_phi();
  }
  const double mc = std::sqrt(mean_sq / n_real);
  const double rel = std::abs(mc - exact) / exact;

  double decomposition = 0.0;
  for (int k : {-1, 0, 1, 64, L, 200, lmax}) {
    for (double e : {0.0, 0.001, 0.5}) {
      const auto t = at(p, e);
      const double total = variance(s, p, t);
      const double parts = tail_variance(s, p, t, k) + (k >= 0 ? variance(s.head(k), p, t) : 0.0);
      decomposition = std::max(decomposition, std::abs(parts - total) / total);
    }
  }
  return {rel <= 0.05 && decomposition <= 1e-12,
          fmt("MC norm %.6g vs exact %.6g, rel %.2e (tol 5e-2); variance decomposition rel "
              "%.2e (tol 1e-12)",
              mc, exact, rel, decomposition)};
}

// The sup sample of criterion 8, reused by criterion 9.
SupSample sup_sample;

Outcome sup_skewness() {
  const auto p = ModelParams::unit();
  McSupOptions opt;
  opt.n_real = 300;
  opt.n_theta = 128;
  opt.n_phi = 256;
  opt.seed = 1;
  sup_sample = mc_sup_distribution(reference_spectrum(256), p, at(p, 0.001), opt);
  const auto sum = summarize(sup_sample.values);
  return {sum.mean >= sum.median,
          fmt("mean %.4f, median %.4f, skewness %.3f (need mean >= median)", sum.mean, sum.median,
              sum.skewness)};
}

Outcome bound_dominance() {
  const auto p = ModelParams::unit();
  const auto s = reference_spectrum(256);
  const auto eta = at(p, 0.001);
  const auto& v = sup_sample.values;
  const double n = static_cast<double>(v.size());
  const double esup = summarize(v).mean;
  const double var = variance(s, p, eta);
  const double sigma = std::sqrt(var);

  // dominance at every x >= E sup: all sample values above it plus a fine grid
  std::vector<double> xs;
  for (double x : v) {
    if (x >= esup) xs.push_back(x);
  }
  for (int k = 0; k <= 400; ++k) xs.push_back(esup + 6.0 * sigma * k / 400.0);
  int violations = 0;
  double worst = INFINITY;
  for (double x : xs) {
    const double emp = exceedance_fraction(v, x);
    const double bound = excursion_bound(s, p, eta, x, esup).bound;
    const double slack = bound - emp + 2.0 * std::sqrt(emp * (1.0 - emp) / n);
    worst = std::min(worst, slack);
    violations += slack < 0.0;
  }

  // conservative near E sup, gap closing as x grows
  auto gap = [&](double x) { return excursion_bound(s, p, eta, x, esup).bound - exceedance_fraction(v, x); };
  const double g0 = gap(esup);
  const double g3 = gap(esup + 3.0 * sigma);
  const double g6 = gap(esup + 6.0 * sigma);
  const bool shape = g0 > 0.25 && g3 < g0 && g6 < 1e-6;
  return {violations == 0 && shape,
          fmt("violations %d of %zu x values (min slack %.3e); bound - empirical at E sup %.3f, "
              "+3 sigma %.3e, +6 sigma %.2e",
              violations, xs.size(), worst, g0, g3, g6)};
}

Outcome wave_structure() {
  const auto p = ModelParams::unit();
  const int lmax = 20000;
  auto changes = [&](double eta) {
    const auto f = evolution_factors(p, lmax, at(p, eta));
    int n = 0;
    for (int l = 1; l <= lmax; ++l) n += (f[l] > 0.0) != (f[l - 1] > 0.0);
    return n;
  };
  const int n1 = changes(0.001), n2 = changes(0.002);
  const double ratio = n1 > 0 ? static_cast<double>(n2) / n1 : 0.0;

  bool decreasing = true;
  std::string amps;
  for (int l : {3, 10}) {
    const int pts = 400;
    double first = 0.0, last = 0.0;
    for (int i = 0; i < pts; ++i) {
      const double eta = 0.99 * i / (pts - 1);
      const double a = std::abs(evolution_factor(p, l, at(p, eta)));
      if (i < pts / 4) first = std::max(first, a);
      if (i >= pts - pts / 4) last = std::max(last, a);
    }
    decreasing = decreasing && last < first;
    amps += fmt(" l=%d %.3f->%.3f", l, first, last);
  }
  return {n1 > 0 && std::abs(ratio - 2.0) <= 0.5 && decreasing,
          fmt("sign changes for l <= %d: %d at eta 0.001, %d at eta 0.002, ratio %.3f (2 +- 0.5); "
              "max|F| first vs last quarter:%s",
              lmax, n1, n2, ratio, amps.c_str())};
}

Outcome entropy_well_posed() {
  const auto p = ModelParams::unit();
  const auto s = reference_spectrum(512);
  const auto eta = at(p, 0.001);
  const auto base = entropy_integral(s, p, eta, 1.0, 400, 2000);
  const auto fine = entropy_integral(s, p, eta, 1.0, 800, 4000);
  const auto doubled = entropy_integral(s.scaled(2.0), p, eta, 1.0, 400, 2000);
  const double refine = std::abs(fine.value - base.value) / fine.value;
  const double scaling = std::abs(doubled.value / base.value - std::sqrt(2.0)) / std::sqrt(2.0);
  const bool finite = std::isfinite(base.value) && base.value > 0.0 && !base.degenerate;
  return {finite && refine <= 0.02 && scaling <= 1e-12,
          fmt("K1 = %.6g (R %.4g, sliver %.1e); refinement rel %.2e (tol 2e-2); sqrt2 scaling "
              "rel %.1e (tol 1e-12)",
              base.value, base.R, base.sliver, refine, scaling)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence", 60, oracle_equivalence},
      {2, "half-integer Bessel validation", 10, half_integer},
      {3, "initial-condition invariants", 30, initial_conditions},
      {4, "large-l asymptotic", 60, asymptotic},
      {5, "spectrum round trip", 120, spectrum_round_trip},
      {6, "covariance consistency", 300, covariance_consistency},
      {7, "truncation identity", 300, truncation_identity},
      {8, "sup-distribution skewness", 600, sup_skewness},
      {9, "bound dominance", 600, bound_dominance},
      {10, "wave structure", 60, wave_structure},
      {11, "entropy integral well-posedness", 120, entropy_well_posed},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.budget_s;
    failed += !pass;
    std::printf("[%s] %2d %s: %s; %.1f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
