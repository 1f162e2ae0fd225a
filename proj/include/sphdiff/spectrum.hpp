// Angular power spectra and the second-order structure of the solution
// field: evolved spectra, covariance, pseudometric, truncation norms.
//
// All sums over l stop at the spectrum's lmax; a spectrum is treated as
// exactly band-limited and its tail beyond lmax is zero.

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "sphdiff/model.hpp"

namespace sphdiff {

/// C_0 .. C_lmax, all finite and >= 0.
class AngularSpectrum {
 public:
  /// Throws ValidationError for an empty input or a negative or non-finite
  /// entry (the message names the offending l).
  explicit AngularSpectrum(std::vector<double> cl);

  int lmax() const { return static_cast<int>(cl_.size()) - 1; }
  double operator[](int l) const { return cl_[static_cast<std::size_t>(l)]; }
  std::span<const double> values() const { return cl_; }
  /// sum_l C_l (2l+1).
  double weighted_sum() const;
  /// New spectrum with every C_l multiplied by s >= 0.
  AngularSpectrum scaled(double s) const;
  /// C_l for l > L kept, the rest zeroed. L = -1 keeps everything.
  AngularSpectrum tail(int L) const;
  /// C_l for l <= L kept, the rest zeroed (same lmax).
  AngularSpectrum head(int L) const;

 private:
  std::vector<double> cl_;
};

/// Spectrum file: header `l,Cl`, one row per multipole, l contiguous from 0.
AngularSpectrum load_spectrum(const std::filesystem::path& path);
AngularSpectrum parse_spectrum(std::string_view text, const std::string& source);
void save_spectrum(const std::filesystem::path& path, const AngularSpectrum& spec);

/// Smooth stand-in for a CMB temperature spectrum, in the units of the
/// usual muK^2 plots: C_0 = C_1 = 0 and, for l >= 2,
///   C_l = 2 pi D_l / (l (l+1)),
///   D_l = (1000 + 4500 g(l; 220, 80) + 2000 g(l; 540, 90) + 2200 g(l; 810, 100))
///         exp(-(l / 1500)^2),   g(l; c, w) = exp(-((l - c) / w)^2).
AngularSpectrum reference_spectrum(int lmax);

/// {C_l F_l(eta)^2}.
AngularSpectrum evolved_spectrum(const AngularSpectrum& spec, const ModelParams& params,
                                 TimePoint eta);

struct CovarianceQuery {
  TimePoint eta;
  TimePoint eta_prime;
  double Theta;  // radians in [0, pi]
};

/// (4 pi)^{-1} sum_l C_l (2l+1) F_l(eta) F_l(eta') P_l(cos Theta).
double covariance(const AngularSpectrum& spec, const ModelParams& params,
                  const CovarianceQuery& q);

/// covariance() for a list of angles at one pair of times. Parallel over Theta.
std::vector<double> covariance_curve(const AngularSpectrum& spec, const ModelParams& params,
                                     TimePoint eta, TimePoint eta_prime,
                                     std::span<const double> thetas);

/// (4 pi)^{-1} sum_l C_l (2l+1) F_l(eta)^2.
double variance(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta);

/// Radicands below this (after summation) are an internal inconsistency;
/// between it and 0 they are clamped.
inline constexpr double kRadicandClamp = -1e-12;

/// d_eta(Theta) = (2 pi)^{-1/2} [sum_l C_l (2l+1) F_l^2 (1 - P_l(cos Theta))]^{1/2}.
double pseudometric(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta,
                    double Theta);

/// d_eta on the uniform grid Theta_i = i pi / (resolution - 1).
struct MetricGrid {
  std::vector<double> theta;
  std::vector<double> d;
  double max_d() const;
};
MetricGrid pseudometric_grid(const AngularSpectrum& spec, const ModelParams& params,
                             TimePoint eta, int resolution);

struct GEps {
  double theta;  // pi with empty = true when no grid point reaches eps
  bool empty;
};
/// First grid angle with d >= eps.
GEps g_eps(const MetricGrid& grid, double eps);
/// Throws DomainError when resolution < 100.
GEps g_eps(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta, double eps,
           int resolution);

struct TruncationError {
  double exact_norm;   // [sum_{l>L} C_l (2l+1) F_l^2]^{1/2}
  double paper_bound;  // B [sum_{l>L} C_l (2l+1)]^{1/2}
  double envelope;     // B = max_{l>L} sup over the eta grid of |F_l|
};

/// sup over the 200-point grid eta_i = 0.99 eta_inf i / 200 (and the query
/// time, if given) of |F_l|, for l = 0..lmax.
std::vector<double> evolution_envelope(const ModelParams& params, int lmax,
                                       const TimePoint* also = nullptr);

/// Throws DomainError unless -1 <= L <= lmax.
TruncationError truncation_error(const AngularSpectrum& spec, const ModelParams& params,
                                 TimePoint eta, int L);

/// truncation_error for every L = 0..lmax, sharing one envelope.
std::vector<TruncationError> truncation_curve(const AngularSpectrum& spec,
                                              const ModelParams& params, TimePoint eta);

/// (4 pi)^{-1} sum_{l>L} C_l (2l+1) F_l^2, L >= -1.
double tail_variance(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta,
                     int L);

/// [sum_l C_l (2l+1) (F_l(eta+h) - F_l(eta))^2]^{1/2}.
double time_increment_norm(const AngularSpectrum& spec, const ModelParams& params,
                           TimePoint eta, double h);

enum class ConditionKind { L2Convergence, C2Smooth, BetaSmooth };

struct ConditionReport {
  ConditionKind kind;
  double beta;         // only for BetaSmooth
  double partial_sum;  // sum of the summands up to lmax
  double slope;        // least-squares log-log slope of the summand on [lmax/2, lmax]
  int fit_points;      // positive summands used in the fit
  bool slow;           // slope > -1, or too few points to fit
};

/// Summands: L2 C_l (2l+1); C2 C_l l^10 (2l+1); beta C_l l^{1+beta}.
/// Throws DomainError for beta outside (0, 2] with BetaSmooth.
ConditionReport check_condition(const AngularSpectrum& spec, ConditionKind kind,
                                double beta = 0.0);

}  // namespace sphdiff
