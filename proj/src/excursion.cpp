#include "sphdiff/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sphdiff/synthesis_kernels.hpp"
#include "sphdiff/text_io.hpp"

namespace sphdiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEpsFloor = 1e-6;

void check_options(const AngularSpectrum& spec, const McSupOptions& opt) {
  if (opt.n_real < 1) throw DomainError("need at least one realization");
  if (opt.n_theta < 1 || opt.n_phi < 1) throw DomainError("grid dimensions must be >= 1");
  if (opt.tail_above < -1 || opt.tail_above > spec.lmax()) {
    throw DomainError("tail degree must satisfy -1 <= L <= lmax");
  }
  if (opt.refine_count < 0 || opt.refine_count > opt.n_real) {
    throw DomainError("refine_count must lie in [0, n_real]");
  }
}

// Coefficients of realization `seed`, tail-cut and evolved with factors f.
HarmonicCoefficients realization(const AngularSpectrum& spec, const std::vector<double>& f,
                                 int tail_above, std::uint64_t seed) {
  const auto a = sample_coefficients(spec, seed);
  std::vector<std::complex<double>> out(a.data().begin(), a.data().end());
  for (int l = 0; l <= a.lmax(); ++l) {
    const double scale = l > tail_above ? f[l] : 0.0;
    for (int m = 0; m <= l; ++m) out[tri_index(l, m)] *= scale;
  }
  return HarmonicCoefficients(a.lmax(), std::move(out));
}

double grid_max(const std::vector<double>& v, bool absolute) {
  double best = -INFINITY;
  for (double x : v) best = std::max(best, absolute ? std::abs(x) : x);
  return best;
}

SupSample run_mc(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta,
                 const McSupOptions& opt, bool parallel) {
  check_options(spec, opt);
  const auto f = evolution_factors(params, spec.lmax(), eta);
  const SynthesisPlan plan(spec.lmax(), midpoint_thetas(opt.n_theta), opt.n_phi);

  SupSample s;
  s.values.assign(opt.n_real, 0.0);
  s.n_theta = opt.n_theta;
  s.n_phi = opt.n_phi;
  s.eta = eta.eta();
  s.seed = opt.seed;
  s.absolute = opt.absolute;
  s.tail_above = opt.tail_above;

  const std::size_t cells = static_cast<std::size_t>(opt.n_theta) * opt.n_phi;
  auto one = [&](int i, std::vector<double>& buf) {
    const auto a = realization(spec, f, opt.tail_above, opt.seed + static_cast<std::uint64_t>(i));
    plan.run_serial(a, buf);
    s.values[i] = grid_max(buf, opt.absolute);
  };
  if (parallel) {
#pragma omp parallel
    {
      std::vector<double> buf(cells);
#pragma omp for schedule(dynamic)
      for (int i = 0; i < opt.n_real; ++i) one(i, buf);
    }
  } else {
    std::vector<double> buf(cells);
    for (int i = 0; i < opt.n_real; ++i) one(i, buf);
  }

  if (opt.refine_count > 0) {
    GridRefinement r;
    r.realizations = opt.refine_count;
    r.n_theta = 2 * opt.n_theta;
    r.n_phi = 2 * opt.n_phi;
    const SynthesisPlan fine(spec.lmax(), midpoint_thetas(r.n_theta), r.n_phi);
    std::vector<double> buf(static_cast<std::size_t>(r.n_theta) * r.n_phi);
    double inc = -INFINITY;
    for (int i = 0; i < opt.refine_count; ++i) {
      const auto a = realization(spec, f, opt.tail_above, opt.seed + static_cast<std::uint64_t>(i));
      if (parallel) {
        fine.run_parallel(a, buf);
      } else {
        fine.run_serial(a, buf);
      }
      const double v = grid_max(buf, opt.absolute);
      r.mean_coarse += s.values[i];
      r.mean_fine += v;
      const double denom = std::abs(s.values[i]);
      if (denom > 0.0) inc = std::max(inc, (v - s.values[i]) / denom);
    }
    r.mean_coarse /= opt.refine_count;
    r.mean_fine /= opt.refine_count;
    r.max_relative_increase = std::isfinite(inc) ? inc : 0.0;
    s.refinement = r;
  }
  return s;
}

}  // namespace

SupSample mc_sup_distribution(const AngularSpectrum& spec, const ModelParams& params,
                              TimePoint eta, const McSupOptions& opt) {
  return run_mc(spec, params, eta, opt, true);
}

SupSample mc_sup_distribution_serial(const AngularSpectrum& spec, const ModelParams& params,
                                     TimePoint eta, const McSupOptions& opt) {
  return run_mc(spec, params, eta, opt, false);
}

SupSummary summarize(const std::vector<double>& values) {
  if (values.empty()) throw DomainError("cannot summarize an empty sample");
  SupSummary s{};
  s.n = static_cast<int>(values.size());
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t n = sorted.size();
  s.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  s.sd = n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0;
  m2 /= n;
  m3 /= n;
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return s;
}

double exceedance_fraction(const std::vector<double>& values, double x) {
  if (values.empty()) return 0.0;
  const auto above = std::count_if(values.begin(), values.end(), [x](double v) { return v > x; });
  return static_cast<double>(above) / values.size();
}

void save_sup_sample(const std::filesystem::path& path, const SupSample& s) {
  NumericTable t;
  t.comments = {{"seed", std::to_string(s.seed)},
                {"n_theta", std::to_string(s.n_theta)},
                {"n_phi", std::to_string(s.n_phi)},
                {"eta", format_real(s.eta)},
                {"absolute", s.absolute ? "1" : "0"},
                {"tail_above", std::to_string(s.tail_above)}};
  t.columns = {"sup"};
  for (double v : s.values) t.rows.push_back({v});
  write_table(path, t);
}

SupSample load_sup_sample(const std::filesystem::path& path) {
  const auto t = read_table(path, {"sup"});
  SupSample s;
  for (const auto& [k, v] : t.comments) {
    if (k == "seed") {
      s.seed = std::stoull(v);
      continue;
    }
    double x = 0.0;
    if (!parse_real(v, x)) continue;
    if (k == "n_theta") s.n_theta = static_cast<int>(x);
    if (k == "n_phi") s.n_phi = static_cast<int>(x);
    if (k == "eta") s.eta = x;
    if (k == "absolute") s.absolute = x != 0.0;
    if (k == "tail_above") s.tail_above = static_cast<int>(x);
  }
  for (const auto& r : t.rows) s.values.push_back(r[0]);
  return s;
}

EntropyIntegral entropy_integral(const AngularSpectrum& spec, const ModelParams& params,
                                 TimePoint eta, double K, int n_eps, int theta_resolution) {
  if (!(K > 0.0)) throw DomainError("K must be > 0");
  if (n_eps < 1) throw DomainError("n_eps must be >= 1");
  if (theta_resolution < 100) throw DomainError("theta resolution must be >= 100");
  const auto grid = pseudometric_grid(spec, params, eta, theta_resolution);
  const double R = grid.max_d();
  if (!(R > 0.0)) return {0.0, 0.0, 0.0, true};

  auto integrand = [](double theta) {
    const double q = 1.0 - std::cos(theta);
    return q > 0.0 ? std::sqrt(std::max(0.0, std::log(2.0 / q))) : INFINITY;
  };
  const double eps_min = kEpsFloor * R;
  const double ratio = std::log(R / eps_min);
  double sum = 0.0;
  double lo = eps_min;
  for (int k = 1; k <= n_eps; ++k) {
    const double hi = k == n_eps ? R : eps_min * std::exp(ratio * k / n_eps);
    sum += integrand(g_eps(grid, 0.5 * (lo + hi)).theta) * (hi - lo);
    lo = hi;
  }
  const double sliver = eps_min * integrand(grid.theta[1]);
  return {K * (sum + sliver), R, K * sliver, false};
}

std::string to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::BorellMcEsup: return "borell-with-mc-esup";
    case BoundMethod::BorellEntropy: return "borell-with-entropy-K1";
    case BoundMethod::TruncationCorollary: return "truncation-corollary";
  }
  return "unknown";
}

BoundReport borell_bound(double x, double esup, double sigma_sq, BoundMethod method) {
  BoundReport r{x, 1.0, sigma_sq, esup, method, x >= esup, !(sigma_sq > 0.0)};
  const double factor = method == BoundMethod::TruncationCorollary ? 2.0 : 1.0;
  if (r.degenerate) {
    r.bound = x > esup ? 0.0 : 1.0;
    return r;
  }
  const double d = x - esup;
  r.bound = std::min(1.0, factor * std::exp(-d * d / (2.0 * sigma_sq)));
  if (!r.valid) r.bound = 1.0;
  return r;
}

BoundReport excursion_bound(const AngularSpectrum& spec, const ModelParams& params,
                            TimePoint eta, double x, double esup) {
  return borell_bound(x, esup, variance(spec, params, eta), BoundMethod::BorellMcEsup);
}

BoundReport excursion_bound_entropy(const AngularSpectrum& spec, const ModelParams& params,
                                    TimePoint eta, double x, double K, int n_eps,
                                    int theta_resolution) {
  const auto k1 = entropy_integral(spec, params, eta, K, n_eps, theta_resolution);
  auto r = borell_bound(x, k1.value, variance(spec, params, eta), BoundMethod::BorellEntropy);
  r.valid = x > k1.value;
  if (!r.valid) r.bound = 1.0;
  return r;
}

BoundReport truncation_excursion_bound(const AngularSpectrum& spec, const ModelParams& params,
                                       TimePoint eta, int L, double x,
                                       std::optional<double> esup, double K) {
  const double tail_var = tail_variance(spec, params, eta, L);
  double e = 0.0;
  if (esup) {
    e = *esup;
  } else if (tail_var > 0.0) {
    e = entropy_integral(spec.tail(L), params, eta, K, 400, 2000).value;
  }
  return borell_bound(x, e, tail_var, BoundMethod::TruncationCorollary);
}

}  // namespace sphdiff
