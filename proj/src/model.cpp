#include "sphdiff/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sphdiff {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw DomainError(std::string("model parameter ") + name + " must be finite and > 0");
  }
}

void check_below_horizon(const ModelParams& params, double eta) {
  if (eta >= params.eta_max()) {
    throw HorizonError("conformal time " + std::to_string(eta) +
                       " is within the horizon guard of eta_inf = " +
                       std::to_string(params.eta_inf()));
  }
}

}  // namespace

ModelParams::ModelParams(double c, double D, double r, double eta_inf)
    : c_(c), D_(D), r_(r), eta_inf_(eta_inf), nu_(c * c * eta_inf / (2.0 * D) + 1.0) {
  if (!(nu_ > 1.0) || !std::isfinite(nu_)) throw DomainError("derived order nu must exceed 1");
}

ModelParams ModelParams::from_horizon(double c, double D, double r, double eta_inf) {
  require_positive(c, "c");
  require_positive(D, "D");
  require_positive(r, "r");
  require_positive(eta_inf, "eta_inf");
  return ModelParams(c, D, r, eta_inf);
}

ModelParams ModelParams::from_lambda(double c, double D, double r, double lambda) {
  require_positive(c, "c");
  require_positive(lambda, "lambda");
  return from_horizon(c, D, r, std::sqrt(3.0 / lambda) / c);
}

double ModelParams::z(int l) const {
  if (l < 0) throw DomainError("multipole l must be >= 0");
  const double ld = l;
  return c_ * std::sqrt(ld * (ld + 1.0)) / r_;
}

TimePoint TimePoint::make(const ModelParams& params, double eta) {
  if (!std::isfinite(eta) || eta < 0.0) throw DomainError("conformal time must be finite and >= 0");
  check_below_horizon(params, eta);
  return TimePoint(eta);
}

TimePoint conformal_time(const ModelParams& params, double t) {
  if (!std::isfinite(t) || t < 0.0) throw DomainError("physical time must be finite and >= 0");
  const double eta = -params.eta_inf() * std::expm1(-t / params.eta_inf());
  return TimePoint::make(params, eta);
}

double expansion_factor(const ModelParams& params, TimePoint eta) {
  check_below_horizon(params, eta.eta());
  return params.eta_inf() / (params.eta_inf() - eta.eta());
}

double evolution_factor(const ModelParams& params, int l, TimePoint eta) {
  if (l < 0) throw DomainError("multipole l must be >= 0");
  check_below_horizon(params, eta.eta());
  if (l == 0) return 1.0;
  const double nu = params.nu();
  const double einf = params.eta_inf();
  const double z = params.z(l);
  const double rho = (einf - eta.eta()) / einf;
  const BesselPair start = bessel_jy(Order(nu - 1.0), z * einf);
  const BesselPair now = bessel_jy(Order(nu), z * (einf - eta.eta()));
  // (eta_inf - eta)^nu / eta_inf^{nu-1} = eta_inf rho^nu
  const double bracket = start.y * now.j - start.j * now.y;
  return 0.5 * kPi * z * einf * std::pow(rho, nu) * bracket;
}

std::vector<double> evolution_factors(const ModelParams& params, int lmax, TimePoint eta) {
  if (lmax < 0) throw DomainError("lmax must be >= 0");
  check_below_horizon(params, eta.eta());
  std::vector<double> f(static_cast<std::size_t>(lmax) + 1);
#pragma omp parallel for schedule(dynamic, 16)
  for (int l = 0; l <= lmax; ++l) f[l] = evolution_factor(params, l, eta);
  return f;
}

double evolution_factor_ode(const ModelParams& params, int l, TimePoint eta, double step) {
  if (l < 0) throw DomainError("multipole l must be >= 0");
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("ODE step must be > 0");
  check_below_horizon(params, eta.eta());
  const double target = eta.eta();
  if (target == 0.0) return 1.0;

  const double einf = params.eta_inf();
  const double damp = (einf * params.c() * params.c() + params.D()) / params.D();
  const double zl = params.z(l);
  const double z2 = zl * zl;
  auto accel = [&](double s, double f, double g) { return -damp / (einf - s) * g - z2 * f; };

  const double n_min = 1000.0;
  const auto n = static_cast<long>(std::max(n_min, std::ceil(target / step)));
  const double h = target / static_cast<double>(n);
  double f = 1.0;
  double g = 0.0;
  for (long i = 0; i < n; ++i) {
    const double s = h * static_cast<double>(i);
    const double k1f = g;
    const double k1g = accel(s, f, g);
    const double k2f = g + 0.5 * h * k1g;
    const double k2g = accel(s + 0.5 * h, f + 0.5 * h * k1f, k2f);
    const double k3f = g + 0.5 * h * k2g;
    const double k3g = accel(s + 0.5 * h, f + 0.5 * h * k2f, k3f);
    const double k4f = g + h * k3g;
    const double k4g = accel(s + h, f + h * k3f, k4f);
    f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
  }
  return f;
}

OdeConvergence evolution_factor_ode_converged(const ModelParams& params, int l, TimePoint eta,
                                              double initial_step, double tolerance,
                                              int max_halvings) {
  double step = initial_step;
  double prev = evolution_factor_ode(params, l, eta, step);
  OdeConvergence out{prev, step, INFINITY, false};
  for (int k = 0; k < max_halvings; ++k) {
    step *= 0.5;
    const double cur = evolution_factor_ode(params, l, eta, step);
    const double change = std::abs(cur - prev);
    out = {cur, step, change, change <= tolerance * std::max(1.0, std::abs(cur))};
    if (out.converged) break;
    prev = cur;
  }
  return out;
}

double evolution_factor_asymptotic(const ModelParams& params, int l, TimePoint eta) {
  const double e = expansion_factor(params, eta);
  return std::cos(params.z(l) * eta.eta()) / std::pow(e, params.nu() - 0.5);
}

double fundamental_solution(const ModelParams& params, TimePoint eta, double Theta, int L) {
  if (L < 0) throw DomainError("truncation degree L must be >= 0");
  if (!(Theta >= 0.0 && Theta <= kPi)) throw DomainError("Theta must lie in [0, pi]");
  const auto f = evolution_factors(params, L, eta);
  std::vector<double> p(static_cast<std::size_t>(L) + 1);
  legendre_p_all(L, std::cos(Theta), p);
  double sum = 0.0;
  for (int l = 0; l <= L; ++l) sum += f[l] * (2.0 * l + 1.0) * p[l];
  return sum / (4.0 * kPi);
}

}  // namespace sphdiff
