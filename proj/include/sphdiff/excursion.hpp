// Suprema of the solution field: Monte Carlo sup samples, the Fernique
// entropy integral and Borell-TIS type excursion bounds.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sphdiff/field.hpp"

namespace sphdiff {

struct McSupOptions {
  int n_real = 300;
  int n_theta = 128;
  int n_phi = 256;
  std::uint64_t seed = 1;
  bool absolute = false;  // sup |u| instead of sup u
  int tail_above = -1;    // keep only l > tail_above (-1: the whole field)
  int refine_count = 0;   // realizations re-run on the doubled grid
};

/// Effect of doubling both grid dimensions on the first refine_count
/// realizations.
struct GridRefinement {
  int realizations = 0;
  int n_theta = 0;
  int n_phi = 0;
  double mean_coarse = 0.0;
  double mean_fine = 0.0;
  double max_relative_increase = 0.0;  // over realizations, (fine - coarse) / |coarse|
};

struct SupSample {
  std::vector<double> values;  // values[i] from seed + i
  int n_theta = 0;
  int n_phi = 0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  bool absolute = false;
  int tail_above = -1;
  std::optional<GridRefinement> refinement;
};

/// For each i < n_real: sample with seed + i, keep l > tail_above, evolve
/// to eta, synthesize on the midpoint grid and take the grid maximum.
/// Realizations run in parallel; the result does not depend on the thread
/// count.
SupSample mc_sup_distribution(const AngularSpectrum& spec, const ModelParams& params,
                              TimePoint eta, const McSupOptions& opt);
/// Same computation on one thread, kept as the reference for tests and the
/// benchmark.
SupSample mc_sup_distribution_serial(const AngularSpectrum& spec, const ModelParams& params,
                                     TimePoint eta, const McSupOptions& opt);

struct SupSummary {
  int n;
  double mean;
  double median;
  double sd;
  double skewness;
  double min;
  double max;
};
SupSummary summarize(const std::vector<double>& values);

/// Fraction of values strictly above x.
double exceedance_fraction(const std::vector<double>& values, double x);

/// Sup-sample file: `# key=value` header comments recording seed, grid and
/// eta, a `sup` column header, then one supremum per line.
void save_sup_sample(const std::filesystem::path& path, const SupSample& s);
SupSample load_sup_sample(const std::filesystem::path& path);

struct EntropyIntegral {
  double value;  // K times the integral, sliver included
  double R;      // max over the Theta grid of d_eta
  double sliver; // K eps_min f_max, the bound used for the omitted [0, eps_min]
  bool degenerate;  // R = 0 (constant field); value is 0
};

/// K int_0^R sqrt(log(2 / (1 - cos g_eta(eps)))) d eps. Midpoint rule on
/// n_eps geometric cells from eps_min = 1e-6 R to R. On (0, eps_min] the
/// grid g_eta is at least the first nonzero grid angle, which bounds the
/// integrand; that bound times eps_min is added and reported as `sliver`.
EntropyIntegral entropy_integral(const AngularSpectrum& spec, const ModelParams& params,
                                 TimePoint eta, double K, int n_eps, int theta_resolution);

enum class BoundMethod { BorellMcEsup, BorellEntropy, TruncationCorollary };
std::string to_string(BoundMethod m);

struct BoundReport {
  double x;
  double bound;     // in [0, 1]
  double sigma_sq;
  double esup;
  BoundMethod method;
  bool valid;       // threshold on the admissible side of esup
  bool degenerate;  // sigma_sq = 0
};

/// min(1, exp(-(x - esup)^2 / (2 sigma_sq))), flagged invalid when x < esup.
BoundReport borell_bound(double x, double esup, double sigma_sq, BoundMethod method);

/// Borell-TIS bound with a caller-supplied E sup (typically a MC mean).
BoundReport excursion_bound(const AngularSpectrum& spec, const ModelParams& params,
                            TimePoint eta, double x, double esup);

/// Borell-TIS bound with E sup replaced by the entropy value K_1; invalid
/// unless x > K_1.
BoundReport excursion_bound_entropy(const AngularSpectrum& spec, const ModelParams& params,
                                    TimePoint eta, double x, double K, int n_eps = 400,
                                    int theta_resolution = 2000);

/// min(1, 2 exp(-(x - esup)^2 / (2 sigma_{eta,L}^2))) for the tail field
/// l > L (L = -1: the whole field). Without esup the entropy value of the
/// tail field with constant K is used. A zero tail variance gives bound 0
/// for x > esup, flagged degenerate.
BoundReport truncation_excursion_bound(const AngularSpectrum& spec, const ModelParams& params,
                                       TimePoint eta, int L, double x,
                                       std::optional<double> esup, double K = 1.0);

}  // namespace sphdiff
