// Gaussian random fields on the sphere through their harmonic coefficients:
// sampling, evolution in time, synthesis on grids and spectrum estimation.

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sphdiff/spectrum.hpp"

namespace sphdiff {

class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// a_lm of a real field. Only m >= 0 is stored (tri_index order); negative
/// orders follow from a_{l,-m} = (-1)^m conj(a_lm). a_l0 is real.
class HarmonicCoefficients {
 public:
  /// All zero.
  explicit HarmonicCoefficients(int lmax);
  /// Throws ValidationError on a size mismatch, a non-finite entry or a
  /// nonzero imaginary part at m = 0.
  HarmonicCoefficients(int lmax, std::vector<std::complex<double>> a);

  int lmax() const { return lmax_; }
  /// Any -l <= m <= l.
  std::complex<double> operator()(int l, int m) const;
  /// m >= 0; at m = 0 the imaginary part must be 0.
  void set(int l, int m, std::complex<double> v);
  std::span<const std::complex<double>> data() const { return a_; }

 private:
  int lmax_;
  std::vector<std::complex<double>> a_;
};

/// Maps larger than this many points are refused with ResourceError.
inline constexpr std::size_t kMaxGridPoints = std::size_t{1} << 26;

/// Values on theta_i x phi_j, row-major over theta. The default grid is
/// theta_i = (i + 1/2) pi / n_theta, phi_j = 2 pi j / n_phi.
struct FieldMap {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta;
  std::vector<double> values;
  std::optional<double> eta;

  double phi(int j) const;
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n_phi + j]; }
};

std::vector<double> midpoint_thetas(int n_theta);

/// True when n_theta < lmax + 1 or n_phi < 2 lmax + 1.
bool grid_undersampled(int lmax, int n_theta, int n_phi);

/// Draws in order of increasing l, then m = 0..l: a_l0 = sqrt(C_l) g and,
/// for m > 0, a_lm = sqrt(C_l / 2) (g1 + i g2), all g from one
/// GaussianStream(seed). Draws are consumed even where C_l = 0, so the
/// coefficients at a given (l, m) do not depend on the other C_l.
HarmonicCoefficients sample_coefficients(const AngularSpectrum& spec, std::uint64_t seed);

/// a_lm -> F_l(eta) a_lm.
HarmonicCoefficients evolve_coefficients(const HarmonicCoefficients& a, const ModelParams& params,
                                         TimePoint eta);

/// a_lm for l > L (the rest zeroed). L = -1 keeps everything.
HarmonicCoefficients tail_coefficients(const HarmonicCoefficients& a, int L);

/// Synthesis on the default midpoint grid. Parallel over rows.
FieldMap synthesize(const HarmonicCoefficients& a, int n_theta, int n_phi);
/// Synthesis on arbitrary colatitudes (e.g. Gauss-Legendre nodes).
FieldMap synthesize_on(const HarmonicCoefficients& a, std::span<const double> theta, int n_phi);

/// sum_{l,m} a_lm Y_lm(theta, phi). Throws DomainError outside
/// theta in [0, pi], phi in [0, 2 pi).
double evaluate_point(const HarmonicCoefficients& a, double theta, double phi);

/// C^_l = (2l+1)^{-1} sum_{m=-l..l} |a_lm|^2.
AngularSpectrum empirical_spectrum(const HarmonicCoefficients& a);

/// Coefficient file: header `l,m,re,im`, rows for m >= 0, l then m ascending.
HarmonicCoefficients load_coefficients(const std::filesystem::path& path);
void save_coefficients(const std::filesystem::path& path, const HarmonicCoefficients& a);

/// Map file: header `theta,phi,value`, row-major.
void save_map(const std::filesystem::path& path, const FieldMap& map);
FieldMap load_map(const std::filesystem::path& path);

}  // namespace sphdiff
