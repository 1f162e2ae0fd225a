// Command drivers of sphdiff_cli. Each returns the process exit status and
// writes its files plus manifest_<command>.json into the output directory.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphdiff/model.hpp"
#include "sphdiff/spectrum.hpp"

namespace sphdiff::cli {

enum ExitCode { kOk = 0, kRuntimeFailure = 1, kConfigError = 2, kCheckFailed = 3 };

struct RunConfig {
  double c = 1.0;
  double D = 1.0;
  double r = 1.0;
  std::optional<double> eta_inf;
  std::optional<double> lambda;
  std::vector<double> eta;
  std::vector<double> t;
  std::optional<int> lmax;
  std::uint64_t seed = 1;
  std::string grid = "128x256";
  std::string out = "sphdiff_out";
  std::string spectrum;  // empty: built-in reference spectrum
};

struct FactorsOptions {
  std::vector<int> ells{0, 3, 10};
  int eta_points = 400;
  double eta_reach = 0.99;  // fraction of eta_inf swept by the F-vs-eta curves
};

struct CovarianceOptions {
  int theta_points = 361;
  std::optional<double> eta_prime;
  double surface_eta_max = 0.01;
  int surface_eta_points = 21;
  int surface_theta_points = 181;
};

struct SynthesizeOptions {
  std::string coefficients;  // ingest instead of sampling
};

struct MetricOptions {
  int theta_resolution = 2000;
  int eps_points = 200;
};

struct McSupCliOptions {
  int n_real = 300;
  bool absolute = false;
  int tail_above = -1;
  int refine = 10;
};

struct BoundsOptions {
  std::string route = "both";  // mc | entropy | both
  std::string sup_sample;      // reuse a saved sample instead of sampling
  double K = 1.0;
  int x_points = 60;
  int n_real = 300;
  int n_eps = 400;
  int theta_resolution = 2000;
};

struct OracleOptions {
  int l_min = 1;
  int l_max = 50;
  std::vector<double> eta_fractions{0.1, 0.3, 0.5, 0.8};
  double tolerance = 1e-6;
  double initial_step = 1e-3;
};

/// Everything validated and derived from RunConfig.
struct Context {
  RunConfig config;
  ModelParams params;
  std::vector<TimePoint> times;  // empty when no --eta/--t given
  AngularSpectrum spectrum;
  std::string spectrum_source;
  int n_theta;
  int n_phi;
  std::filesystem::path out;
  nlohmann::json manifest;
  std::vector<std::string> warnings;

  void record_output(const std::filesystem::path& p);
  TimePoint first_time() const;
};

/// Throws ValidationError / DomainError with a readable message.
Context make_context(const RunConfig& cfg, const std::string& command,
                     std::optional<int> default_lmax = std::nullopt);
void write_manifest(Context& ctx);

int cmd_factors(Context& ctx, const FactorsOptions& o);
int cmd_evolve_spectrum(Context& ctx);
int cmd_covariance(Context& ctx, const CovarianceOptions& o);
int cmd_synthesize(Context& ctx, const SynthesizeOptions& o);
int cmd_truncation(Context& ctx);
int cmd_metric(Context& ctx, const MetricOptions& o);
int cmd_mc_sup(Context& ctx, const McSupCliOptions& o);
int cmd_bounds(Context& ctx, const BoundsOptions& o);
int cmd_oracle_check(Context& ctx, const OracleOptions& o);

/// Number of strict sign changes along a sequence (zeros skipped).
int sign_changes(const std::vector<double>& v);

}  // namespace sphdiff::cli
