// Model constants, the conformal-time map and the temporal evolution
// factors F_l(eta) of the diffusion on the expanding sphere.

#pragma once

#include <vector>

#include "sphdiff/special_functions.hpp"

namespace sphdiff {

class HorizonError : public DomainError {
 public:
  explicit HorizonError(const std::string& what) : DomainError(what) {}
};

/// Conformal times closer than kHorizonGuard * eta_inf to the horizon are
/// rejected.
inline constexpr double kHorizonGuard = 1e-6;

/// Signal speed c, diffusivity D, sphere radius r and conformal horizon
/// eta_inf, plus the derived Bessel order nu = c^2 eta_inf / (2D) + 1.
class ModelParams {
 public:
  /// Throws DomainError unless all four constants are finite and positive.
  static ModelParams from_horizon(double c, double D, double r, double eta_inf);
  /// eta_inf = sqrt(3 / lambda) / c for a cosmological constant lambda > 0.
  static ModelParams from_lambda(double c, double D, double r, double lambda);
  /// c = D = r = eta_inf = 1, so nu = 3/2.
  static ModelParams unit() { return from_horizon(1.0, 1.0, 1.0, 1.0); }

  double c() const { return c_; }
  double D() const { return D_; }
  double r() const { return r_; }
  double eta_inf() const { return eta_inf_; }
  double nu() const { return nu_; }
  /// z_l = c sqrt(l(l+1)) / r.
  double z(int l) const;
  /// Largest admissible conformal time, eta_inf (1 - kHorizonGuard).
  double eta_max() const { return eta_inf_ * (1.0 - kHorizonGuard); }

 private:
  ModelParams(double c, double D, double r, double eta_inf);
  double c_, D_, r_, eta_inf_, nu_;
};

/// A conformal time strictly below the horizon of the params it was made for.
class TimePoint {
 public:
  /// Throws DomainError for eta < 0 or non-finite, HorizonError when
  /// eta >= params.eta_max().
  static TimePoint make(const ModelParams& params, double eta);
  double eta() const { return eta_; }

 private:
  explicit TimePoint(double eta) : eta_(eta) {}
  double eta_;
};

/// eta = eta_inf (1 - exp(-t / eta_inf)). Physical times that map inside
/// the horizon guard raise HorizonError.
TimePoint conformal_time(const ModelParams& params, double t);

/// e(eta) = eta_inf / (eta_inf - eta), equal to the scale factor a(t).
double expansion_factor(const ModelParams& params, TimePoint eta);

/// F_l(eta): 1 for l = 0, otherwise
///   (eta_inf - eta)^nu [K1 J_nu(z_l (eta_inf - eta)) + K2 Y_nu(z_l (eta_inf - eta))]
/// with K1 = pi z_l Y_{nu-1}(z_l eta_inf) / (2 eta_inf^{nu-1}) and
///      K2 = -pi z_l J_{nu-1}(z_l eta_inf) / (2 eta_inf^{nu-1}),
/// normalised so that F_l(0) = 1 and F_l'(0) = 0.
double evolution_factor(const ModelParams& params, int l, TimePoint eta);

/// F_0 .. F_lmax at one time. Parallel over l.
std::vector<double> evolution_factors(const ModelParams& params, int lmax, TimePoint eta);

/// Fixed-step classical RK4 integration of
///   F'' + (eta_inf c^2 + D) / (D (eta_inf - eta)) F' + z_l^2 F = 0,
/// F(0) = 1, F'(0) = 0. Uses at least 1000 steps on [0, eta]; `step` is an
/// upper bound on the step length. Independent of the Bessel kernel.
double evolution_factor_ode(const ModelParams& params, int l, TimePoint eta, double step);

struct OdeConvergence {
  double value;
  double step;        // step of the accepted solve
  double change;      // |value - value at twice the step|
  bool converged;
};

/// Halves the step starting from `initial_step` until successive solves
/// agree to `tolerance` (absolute, scaled by max(1, |F|)) or `max_halvings`
/// is reached.
OdeConvergence evolution_factor_ode_converged(const ModelParams& params, int l, TimePoint eta,
                                              double initial_step, double tolerance = 1e-8,
                                              int max_halvings = 12);

/// Leading large-l behaviour cos(z_l eta) / e(eta)^{nu - 1/2}.
double evolution_factor_asymptotic(const ModelParams& params, int l, TimePoint eta);

/// L-truncated fundamental solution as a function of angular distance from
/// the pole: sum_{l <= L} F_l(eta) (2l+1)/(4 pi) P_l(cos Theta).
double fundamental_solution(const ModelParams& params, TimePoint eta, double Theta, int L);

}  // namespace sphdiff
