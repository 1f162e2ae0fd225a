#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "sphdiff/excursion.hpp"
#include "sphdiff/field.hpp"
#include "sphdiff/text_io.hpp"

namespace sphdiff::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kDefaultLmax = 256;

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find_first_of("xX");
  double a = 0.0, b = 0.0;
  if (x == std::string::npos || !parse_real(std::string_view(s).substr(0, x), a) ||
      !parse_real(std::string_view(s).substr(x + 1), b)) {
    throw ValidationError("--grid expects NTHETAxNPHI, got '" + s + "'");
  }
  if (a != std::floor(a) || b != std::floor(b) || a < 1 || b < 1) {
    throw ValidationError("--grid dimensions must be positive integers, got '" + s + "'");
  }
  if (a * b > static_cast<double>(kMaxGridPoints)) {
    throw ValidationError("--grid " + s + " exceeds the grid point cap");
  }
  return {static_cast<int>(a), static_cast<int>(b)};
}

// Physical time of a conformal time, the inverse of conformal_time.
double physical_time(const ModelParams& p, double eta) {
  return -p.eta_inf() * std::log1p(-eta / p.eta_inf());
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> theta_grid(int n) { return linspace(0.0, kPi, n); }

// Requested times, or `defaults` (conformal) when none were given.
std::vector<TimePoint> times_or(const Context& ctx, std::initializer_list<double> defaults) {
  if (!ctx.times.empty()) return ctx.times;
  std::vector<TimePoint> out;
  for (double e : defaults) out.push_back(TimePoint::make(ctx.params, e));
  return out;
}

json time_json(const ModelParams& p, const std::vector<TimePoint>& ts) {
  json a = json::array();
  for (const auto& t : ts) a.push_back({{"eta", t.eta()}, {"t", physical_time(p, t.eta())}});
  return a;
}

NumericTable with_comments(NumericTable t, std::vector<std::pair<std::string, std::string>> c) {
  t.comments.insert(t.comments.begin(), c.begin(), c.end());
  return t;
}

void emit_table(Context& ctx, const std::string& name, const NumericTable& t) {
  const auto path = ctx.out / name;
  write_table(path, t);
  ctx.record_output(path);
}

std::string indexed(const std::string& stem, std::size_t i) {
  return stem + "_" + std::to_string(i) + ".csv";
}

double max_abs(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  double m = 0.0;
  for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

}  // namespace

void Context::record_output(const fs::path& p) {
  manifest["outputs"].push_back(p.filename().string());
}

TimePoint Context::first_time() const {
  return times.empty() ? TimePoint::make(params, 0.001) : times.front();
}

Context make_context(const RunConfig& cfg, const std::string& command,
                     std::optional<int> default_lmax) {
  if (cfg.eta_inf && cfg.lambda) throw ValidationError("give --eta-inf or --lambda, not both");
  if (!cfg.eta.empty() && !cfg.t.empty()) throw ValidationError("give --eta or --t, not both");
  if (cfg.lmax && *cfg.lmax < 0) throw ValidationError("--lmax must be >= 0");

  const auto params = cfg.lambda ? ModelParams::from_lambda(cfg.c, cfg.D, cfg.r, *cfg.lambda)
                                 : ModelParams::from_horizon(cfg.c, cfg.D, cfg.r,
                                                             cfg.eta_inf.value_or(1.0));
  std::vector<TimePoint> times;
  for (double e : cfg.eta) times.push_back(TimePoint::make(params, e));
  for (double t : cfg.t) times.push_back(conformal_time(params, t));

  const auto [n_theta, n_phi] = parse_grid(cfg.grid);

  std::vector<std::string> warnings;
  std::string source = "reference";
  const int want = cfg.lmax.value_or(default_lmax.value_or(kDefaultLmax));
  std::vector<double> cl;
  if (cfg.spectrum.empty()) {
    const auto ref = reference_spectrum(want);
    cl.assign(ref.values().begin(), ref.values().end());
  } else {
    const auto loaded = load_spectrum(cfg.spectrum);
    source = cfg.spectrum;
    const auto v = loaded.values();
    const int keep = cfg.lmax ? std::min(*cfg.lmax, loaded.lmax()) : loaded.lmax();
    if (cfg.lmax && *cfg.lmax > loaded.lmax()) {
      warnings.push_back("--lmax " + std::to_string(*cfg.lmax) + " exceeds the spectrum file's lmax " +
                         std::to_string(loaded.lmax()) + "; using " +
                         std::to_string(loaded.lmax()));
    }
    cl.assign(v.begin(), v.begin() + keep + 1);
  }
  AngularSpectrum spectrum(std::move(cl));

  fs::path out(cfg.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  }

  json m;
  m["command"] = command;
  m["params"] = {{"c", params.c()},         {"D", params.D()},
                 {"r", params.r()},         {"eta_inf", params.eta_inf()},
                 {"nu", params.nu()},       {"lambda", cfg.lambda ? json(*cfg.lambda) : json()}};
  m["time_input"] = cfg.t.empty() ? "eta" : "t";
  m["eta_given"] = cfg.eta;
  m["t_given"] = cfg.t;
  m["times"] = time_json(params, times);
  m["spectrum"] = {{"source", source}, {"lmax", spectrum.lmax()}};
  m["seed"] = cfg.seed;
  m["grid"] = {{"n_theta", n_theta}, {"n_phi", n_phi}};
  m["out"] = out.string();
  m["outputs"] = json::array();

  return Context{cfg, params, std::move(times), std::move(spectrum), source, n_theta, n_phi,
                 out, std::move(m), std::move(warnings)};
}

void write_manifest(Context& ctx) {
  ctx.manifest["warnings"] = ctx.warnings;
  const auto path = ctx.out / ("manifest_" + ctx.manifest["command"].get<std::string>() + ".json");
  write_file_atomic(path, ctx.manifest.dump(2) + "\n");
}

int sign_changes(const std::vector<double>& v) {
  int n = 0;
  double last = 0.0;
  for (double x : v) {
    if (x == 0.0) continue;
    if (last != 0.0 && (x > 0.0) != (last > 0.0)) ++n;
    last = x;
  }
  return n;
}

int cmd_factors(Context& ctx, const FactorsOptions& o) {
  if (o.eta_points < 8) throw ValidationError("--eta-points must be >= 8");
  if (!(o.eta_reach > 0.0 && o.eta_reach < 1.0)) {
    throw ValidationError("--eta-reach must lie in (0, 1)");
  }
  const int lmax = ctx.spectrum.lmax();
  const auto times = times_or(ctx, {0.001, 0.002});
  ctx.manifest["times"] = time_json(ctx.params, times);
  ctx.manifest["options"] = {{"ells", o.ells}, {"eta_points", o.eta_points},
                             {"eta_reach", o.eta_reach}};

  std::vector<double> ls(lmax + 1);
  for (int l = 0; l <= lmax; ++l) ls[l] = l;
  json by_eta = json::array();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto f = evolution_factors(ctx.params, lmax, times[i]);
    emit_table(ctx, indexed("factors_vs_l", i),
               with_comments(make_curve("l", "F", ls, f), {{"eta", format_real(times[i].eta())}}));
    const int n = sign_changes(f);
    if (n == 0) {
      ctx.warnings.push_back("F_l has no sign change for l <= " + std::to_string(lmax) +
                             " at eta=" + format_real(times[i].eta()) +
                             "; raise --lmax to resolve the waves");
    }
    by_eta.push_back({{"eta", times[i].eta()}, {"sign_changes", n}});
  }
  json summary;
  summary["vs_l"] = by_eta;
  if (times.size() >= 2 && by_eta[0]["sign_changes"].get<int>() > 0) {
    summary["sign_change_ratio"] =
        by_eta[1]["sign_changes"].get<double>() / by_eta[0]["sign_changes"].get<double>();
  }

  const auto etas = linspace(0.0, o.eta_reach * ctx.params.eta_inf(), o.eta_points);
  json by_l = json::array();
  for (int l : o.ells) {
    if (l < 0) throw ValidationError("--ells entries must be >= 0");
    std::vector<double> f(etas.size());
    for (std::size_t k = 0; k < etas.size(); ++k) {
      f[k] = evolution_factor(ctx.params, l, TimePoint::make(ctx.params, etas[k]));
    }
    emit_table(ctx, "factors_vs_eta_l" + std::to_string(l) + ".csv",
               with_comments(make_curve("eta", "F", etas, f), {{"l", std::to_string(l)}}));
    const std::size_t q = etas.size() / 4;
    const double first = max_abs(f, 0, q);
    const double last = max_abs(f, etas.size() - q, etas.size());
    by_l.push_back({{"l", l},
                    {"max_abs_first_quarter", first},
                    {"max_abs_last_quarter", last},
                    {"amplitude_decreasing", last < first}});
  }
  summary["vs_eta"] = by_l;
  ctx.manifest["summary"] = summary;
  return kOk;
}

int cmd_evolve_spectrum(Context& ctx) {
  const auto times = times_or(ctx, {0.001});
  ctx.manifest["times"] = time_json(ctx.params, times);
  const auto p0 = ctx.out / "spectrum_eta0.csv";
  save_spectrum(p0, ctx.spectrum);
  ctx.record_output(p0);
  json summary = json::array();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto evolved = evolved_spectrum(ctx.spectrum, ctx.params, times[i]);
    const auto path = ctx.out / indexed("spectrum_evolved", i);
    save_spectrum(path, evolved);
    ctx.record_output(path);
    summary.push_back({{"eta", times[i].eta()},
                       {"file", path.filename().string()},
                       {"variance", variance(ctx.spectrum, ctx.params, times[i])}});
  }
  ctx.manifest["summary"] = {{"variance_eta0",
                              variance(ctx.spectrum, ctx.params, TimePoint::make(ctx.params, 0.0))},
                             {"evolved", summary}};
  return kOk;
}

int cmd_covariance(Context& ctx, const CovarianceOptions& o) {
  if (o.theta_points < 2 || o.surface_theta_points < 2 || o.surface_eta_points < 2) {
    throw ValidationError("covariance grids need at least 2 points");
  }
  const auto times = times_or(ctx, {0.0, 0.001});
  ctx.manifest["times"] = time_json(ctx.params, times);
  ctx.manifest["options"] = {{"theta_points", o.theta_points},
                             {"eta_prime", o.eta_prime ? json(*o.eta_prime) : json()},
                             {"surface_eta_max", o.surface_eta_max},
                             {"surface_eta_points", o.surface_eta_points},
                             {"surface_theta_points", o.surface_theta_points}};
  const auto thetas = theta_grid(o.theta_points);
  std::vector<std::vector<double>> curves;
  for (std::size_t i = 0; i < times.size(); ++i) {
    curves.push_back(covariance_curve(ctx.spectrum, ctx.params, times[i], times[i], thetas));
    emit_table(ctx, indexed("covariance", i),
               with_comments(make_curve("Theta", "covariance", thetas, curves.back()),
                             {{"eta", format_real(times[i].eta())},
                              {"eta_prime", format_real(times[i].eta())}}));
  }
  if (curves.size() >= 2) {
    std::vector<double> diff(thetas.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = curves[1][k] - curves[0][k];
    emit_table(ctx, "covariance_difference.csv",
               with_comments(make_curve("Theta", "difference", thetas, diff),
                             {{"minuend_eta", format_real(times[1].eta())},
                              {"subtrahend_eta", format_real(times[0].eta())}}));
  }
  if (o.eta_prime) {
    const auto ep = TimePoint::make(ctx.params, *o.eta_prime);
    const auto cross = covariance_curve(ctx.spectrum, ctx.params, times[0], ep, thetas);
    emit_table(ctx, "covariance_cross.csv",
               with_comments(make_curve("Theta", "covariance", thetas, cross),
                             {{"eta", format_real(times[0].eta())},
                              {"eta_prime", format_real(ep.eta())}}));
  }

  const double var0 = variance(ctx.spectrum, ctx.params, TimePoint::make(ctx.params, 0.0));
  if (!(var0 > 0.0)) throw ValidationError("spectrum has zero variance; cannot normalise surface");
  TimePoint::make(ctx.params, o.surface_eta_max);  // validates against the horizon
  NumericTable surface;
  surface.comments = {{"normalisation", format_real(var0)}};
  surface.columns = {"Theta", "eta", "normalized"};
  const auto st = theta_grid(o.surface_theta_points);
  for (double e : linspace(0.0, o.surface_eta_max, o.surface_eta_points)) {
    const auto tp = TimePoint::make(ctx.params, e);
    const auto c = covariance_curve(ctx.spectrum, ctx.params, tp, tp, st);
    for (std::size_t k = 0; k < st.size(); ++k) surface.rows.push_back({st[k], e, c[k] / var0});
  }
  emit_table(ctx, "covariance_surface.csv", surface);
  ctx.manifest["summary"] = {{"variance_eta0", var0}};
  return kOk;
}

int cmd_synthesize(Context& ctx, const SynthesizeOptions& o) {
  const auto times = times_or(ctx, {0.001});
  ctx.manifest["times"] = time_json(ctx.params, times);
  HarmonicCoefficients a = o.coefficients.empty() ? sample_coefficients(ctx.spectrum, ctx.config.seed)
                                                  : load_coefficients(o.coefficients);
  ctx.manifest["options"] = {
      {"coefficients", o.coefficients.empty() ? json() : json(o.coefficients)}};
  ctx.manifest["summary"]["coefficient_lmax"] = a.lmax();
  if (grid_undersampled(a.lmax(), ctx.n_theta, ctx.n_phi)) {
    ctx.warnings.push_back("grid " + ctx.config.grid + " undersamples lmax " +
                           std::to_string(a.lmax()) + " (need n_theta > lmax, n_phi > 2 lmax)");
  }
  const auto coef_path = ctx.out / "coefficients.csv";
  save_coefficients(coef_path, a);
  ctx.record_output(coef_path);

  auto emit_map = [&](const std::string& name, const HarmonicCoefficients& c, double eta) {
    auto map = synthesize(c, ctx.n_theta, ctx.n_phi);
    map.eta = eta;
    const auto path = ctx.out / name;
    save_map(path, map);
    ctx.record_output(path);
    const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
    return json{{"eta", eta}, {"file", name}, {"min", *lo}, {"max", *hi}};
  };
  json maps = json::array();
  maps.push_back(emit_map("map_eta0.csv", a, 0.0));
  for (std::size_t i = 0; i < times.size(); ++i) {
    maps.push_back(emit_map(indexed("map", i), evolve_coefficients(a, ctx.params, times[i]),
                            times[i].eta()));
  }
  ctx.manifest["summary"]["maps"] = maps;
  return kOk;
}

int cmd_truncation(Context& ctx) {
  const auto eta = ctx.first_time();
  ctx.manifest["times"] = time_json(ctx.params, {eta});
  const auto curve = truncation_curve(ctx.spectrum, ctx.params, eta);
  NumericTable t;
  t.comments = {{"eta", format_real(eta.eta())}};
  t.columns = {"L", "exact_norm", "paper_bound", "envelope"};
  bool dominated = true;
  for (std::size_t L = 0; L < curve.size(); ++L) {
    const auto& e = curve[L];
    t.rows.push_back({static_cast<double>(L), e.exact_norm, e.paper_bound, e.envelope});
    dominated = dominated && e.exact_norm <= e.paper_bound * (1.0 + 1e-12);
  }
  emit_table(ctx, "truncation.csv", t);
  ctx.manifest["summary"] = {{"bound_dominates_exact", dominated},
                             {"exact_norm_L0", curve.front().exact_norm}};
  return kOk;
}

int cmd_metric(Context& ctx, const MetricOptions& o) {
  if (o.theta_resolution < 100) throw ValidationError("--theta-resolution must be >= 100");
  if (o.eps_points < 1) throw ValidationError("--eps-points must be >= 1");
  const auto eta = ctx.first_time();
  ctx.manifest["times"] = time_json(ctx.params, {eta});
  ctx.manifest["options"] = {{"theta_resolution", o.theta_resolution},
                             {"eps_points", o.eps_points}};
  const auto grid = pseudometric_grid(ctx.spectrum, ctx.params, eta, o.theta_resolution);
  emit_table(ctx, "metric_d.csv",
             with_comments(make_curve("Theta", "d", grid.theta, grid.d),
                           {{"eta", format_real(eta.eta())}}));
  const double R = grid.max_d();
  NumericTable g;
  g.comments = {{"eta", format_real(eta.eta())}, {"R", format_real(R)}};
  g.columns = {"eps", "g", "empty"};
  for (int k = 1; k <= o.eps_points; ++k) {
    const double eps = R * k / o.eps_points;
    const auto r = g_eps(grid, eps);
    g.rows.push_back({eps, r.theta, r.empty ? 1.0 : 0.0});
  }
  emit_table(ctx, "metric_g.csv", g);
  ctx.manifest["summary"] = {{"R", R}};
  return kOk;
}

namespace {

SupSample run_sup(Context& ctx, int n_real, bool absolute, int tail_above, int refine) {
  McSupOptions opt;
  opt.n_real = n_real;
  opt.n_theta = ctx.n_theta;
  opt.n_phi = ctx.n_phi;
  opt.seed = ctx.config.seed;
  opt.absolute = absolute;
  opt.tail_above = tail_above;
  opt.refine_count = std::min(refine, n_real);
  if (opt.n_real < 1) throw ValidationError("--n-real must be >= 1");
  if (opt.refine_count < 0) throw ValidationError("--refine must be >= 0");
  if (tail_above < -1 || tail_above > ctx.spectrum.lmax()) {
    throw ValidationError("--tail-above must satisfy -1 <= L <= lmax");
  }
  if (grid_undersampled(ctx.spectrum.lmax(), ctx.n_theta, ctx.n_phi)) {
    ctx.warnings.push_back("grid " + ctx.config.grid + " undersamples lmax " +
                           std::to_string(ctx.spectrum.lmax()));
  }
  return mc_sup_distribution(ctx.spectrum, ctx.params, ctx.first_time(), opt);
}

json summary_json(const SupSample& s) {
  const auto m = summarize(s.values);
  json j = {{"n", m.n},       {"mean", m.mean}, {"median", m.median},
            {"sd", m.sd},     {"skewness", m.skewness},
            {"min", m.min},   {"max", m.max},   {"mean_ge_median", m.mean >= m.median}};
  if (s.refinement) {
    const auto& r = *s.refinement;
    j["refinement"] = {{"realizations", r.realizations},
                       {"n_theta", r.n_theta},
                       {"n_phi", r.n_phi},
                       {"mean_coarse", r.mean_coarse},
                       {"mean_fine", r.mean_fine},
                       {"max_relative_increase", r.max_relative_increase}};
  }
  return j;
}

}  // namespace

int cmd_mc_sup(Context& ctx, const McSupCliOptions& o) {
  const auto eta = ctx.first_time();
  ctx.manifest["times"] = time_json(ctx.params, {eta});
  ctx.manifest["options"] = {{"n_real", o.n_real},
                             {"absolute", o.absolute},
                             {"tail_above", o.tail_above},
                             {"refine", o.refine}};
  const auto sample = run_sup(ctx, o.n_real, o.absolute, o.tail_above, o.refine);
  const auto path = ctx.out / "sup_sample.csv";
  save_sup_sample(path, sample);
  ctx.record_output(path);
  ctx.manifest["summary"] = summary_json(sample);
  return kOk;
}

int cmd_bounds(Context& ctx, const BoundsOptions& o) {
  if (o.route != "mc" && o.route != "entropy" && o.route != "both") {
    throw ValidationError("--route must be mc, entropy or both");
  }
  if (o.x_points < 2) throw ValidationError("--x-points must be >= 2");
  if (!(o.K > 0.0)) throw ValidationError("--K must be > 0");
  const auto eta = ctx.first_time();
  ctx.manifest["times"] = time_json(ctx.params, {eta});
  ctx.manifest["options"] = {{"route", o.route},        {"K", o.K},
                             {"x_points", o.x_points},  {"n_real", o.n_real},
                             {"n_eps", o.n_eps},        {"theta_resolution", o.theta_resolution},
                             {"sup_sample", o.sup_sample.empty() ? json() : json(o.sup_sample)}};

  SupSample sample;
  if (o.sup_sample.empty()) {
    sample = run_sup(ctx, o.n_real, false, -1, 0);
    const auto path = ctx.out / "sup_sample.csv";
    save_sup_sample(path, sample);
    ctx.record_output(path);
  } else {
    sample = load_sup_sample(o.sup_sample);
    if (sample.values.empty()) throw ValidationError("sup sample " + o.sup_sample + " is empty");
    if (sample.eta != eta.eta()) {
      ctx.warnings.push_back("sup sample eta " + format_real(sample.eta) +
                             " differs from the requested eta " + format_real(eta.eta()));
    }
    if (sample.absolute || sample.tail_above != -1) {
      ctx.warnings.push_back("sup sample is not of the signed whole field");
    }
  }
  const auto stats = summarize(sample.values);
  const double sigma_sq = variance(ctx.spectrum, ctx.params, eta);
  const bool use_mc = o.route != "entropy";
  const bool use_entropy = o.route != "mc";
  std::optional<EntropyIntegral> k1;
  if (use_entropy) k1 = entropy_integral(ctx.spectrum, ctx.params, eta, o.K, o.n_eps,
                                         o.theta_resolution);

  double x_hi = std::max(stats.max, stats.mean + 4.0 * std::sqrt(sigma_sq));
  if (k1) x_hi = std::max(x_hi, k1->value + 4.0 * std::sqrt(sigma_sq));
  const auto xs = linspace(std::min(stats.min, stats.mean), x_hi, o.x_points);

  std::ostringstream rows;
  rows << "# eta=" << format_real(eta.eta()) << "\n# sigma_sq=" << format_real(sigma_sq)
       << "\n# esup_mc=" << format_real(stats.mean) << "\n";
  if (k1) rows << "# esup_entropy=" << format_real(k1->value) << "\n";
  rows << "x,bound,method\n";
  int violations = 0;
  for (double x : xs) {
    if (use_mc) {
      const auto b = borell_bound(x, stats.mean, sigma_sq, BoundMethod::BorellMcEsup);
      rows << format_real(x) << "," << format_real(b.bound) << "," << to_string(b.method) << "\n";
      if (x >= stats.mean && b.bound < exceedance_fraction(sample.values, x)) ++violations;
    }
    if (k1) {
      auto b = borell_bound(x, k1->value, sigma_sq, BoundMethod::BorellEntropy);
      if (!(x > k1->value)) b.bound = 1.0;
      rows << format_real(x) << "," << format_real(b.bound) << "," << to_string(b.method) << "\n";
    }
  }
  const auto bound_path = ctx.out / "bounds.csv";
  write_file_atomic(bound_path, rows.str());
  ctx.record_output(bound_path);

  std::vector<double> emp(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) emp[i] = exceedance_fraction(sample.values, xs[i]);
  emit_table(ctx, "exceedance.csv",
             with_comments(make_curve("x", "exceedance", xs, emp),
                           {{"eta", format_real(eta.eta())},
                            {"n", std::to_string(sample.values.size())}}));

  json summary = {{"sigma_sq", sigma_sq}, {"sup", summary_json(sample)}};
  if (use_mc) summary["mc_bound_below_empirical_points"] = violations;
  if (k1) {
    summary["entropy"] = {{"value", k1->value}, {"R", k1->R}, {"sliver", k1->sliver},
                          {"degenerate", k1->degenerate}};
  }
  ctx.manifest["summary"] = summary;
  return kOk;
}

int cmd_oracle_check(Context& ctx, const OracleOptions& o) {
  if (o.l_min < 0 || o.l_max < o.l_min) throw ValidationError("need 0 <= --l-min <= --l-max");
  if (!(o.tolerance > 0.0)) throw ValidationError("--tolerance must be > 0");
  if (!(o.initial_step > 0.0)) throw ValidationError("--initial-step must be > 0");
  std::vector<TimePoint> times;
  for (double f : o.eta_fractions) times.push_back(TimePoint::make(ctx.params, f * ctx.params.eta_inf()));
  ctx.manifest["times"] = time_json(ctx.params, times);
  ctx.manifest["options"] = {{"l_min", o.l_min},
                             {"l_max", o.l_max},
                             {"eta_fractions", o.eta_fractions},
                             {"tolerance", o.tolerance},
                             {"initial_step", o.initial_step}};

  NumericTable t;
  t.comments = {{"tolerance", format_real(o.tolerance)},
                {"error", "|closed - ode| / max(1, |ode|)"}};
  t.columns = {"l", "eta", "closed_form", "ode", "error", "ode_step", "pass"};
  int failures = 0;
  double worst = 0.0;
  for (const auto& tp : times) {
    for (int l = o.l_min; l <= o.l_max; ++l) {
      const double f = evolution_factor(ctx.params, l, tp);
      const auto ode = evolution_factor_ode_converged(ctx.params, l, tp, o.initial_step);
      const double err = std::abs(f - ode.value) / std::max(1.0, std::abs(ode.value));
      const bool pass = ode.converged && err <= o.tolerance;
      failures += !pass;
      worst = std::max(worst, err);
      t.rows.push_back({static_cast<double>(l), tp.eta(), f, ode.value, err, ode.step,
                        pass ? 1.0 : 0.0});
    }
  }
  emit_table(ctx, "oracle_check.csv", t);
  ctx.manifest["summary"] = {{"cases", t.rows.size()}, {"failures", failures},
                             {"worst_error", worst}};
  std::cout << "oracle-check: " << t.rows.size() - failures << "/" << t.rows.size()
            << " pass, worst error " << worst << "\n";
  return failures == 0 ? kOk : kCheckFailed;
}

}  // namespace sphdiff::cli
