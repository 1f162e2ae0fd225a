#include "sphdiff/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sphdiff/text_io.hpp"

namespace sphdiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kEnvelopeGrid = 200;
constexpr double kEnvelopeReach = 0.99;

void check_theta(double Theta) {
  if (!(Theta >= 0.0 && Theta <= kPi)) throw DomainError("Theta must lie in [0, pi]");
}

// w_l = C_l (2l+1) F_l(eta) F_l(eta')
std::vector<double> weights(const AngularSpectrum& spec, const ModelParams& params,
                            TimePoint eta, TimePoint eta_prime) {
  const auto f = evolution_factors(params, spec.lmax(), eta);
  const auto g = eta.eta() == eta_prime.eta() ? f : evolution_factors(params, spec.lmax(), eta_prime);
  std::vector<double> w(f.size());
  for (int l = 0; l <= spec.lmax(); ++l) w[l] = spec[l] * (2.0 * l + 1.0) * f[l] * g[l];
  return w;
}

double legendre_sum(std::span<const double> w, double Theta, std::vector<double>& p) {
  const int lmax = static_cast<int>(w.size()) - 1;
  p.resize(w.size());
  legendre_p_all(lmax, std::cos(Theta), p);
  double s = 0.0;
  for (int l = 0; l <= lmax; ++l) s += w[l] * p[l];
  return s;
}

// sum_l w_l (1 - P_l(cos Theta)) / (2 pi), clamped, square-rooted.
double metric_from_weights(std::span<const double> w, double Theta, std::vector<double>& p) {
  const int lmax = static_cast<int>(w.size()) - 1;
  p.resize(w.size());
  legendre_p_all(lmax, std::cos(Theta), p);
  double s = 0.0;
  double scale = 0.0;
  for (int l = 1; l <= lmax; ++l) {
    s += w[l] * (1.0 - p[l]);
    scale += w[l];
  }
  // the clamp threshold is relative to the size of the terms being summed
  if (s < 0.0) {
    if (s < kRadicandClamp * std::max(1.0, scale)) {
      throw DomainError("pseudometric radicand " + std::to_string(s) + " is negative");
    }
    s = 0.0;
  }
  return std::sqrt(s / (2.0 * kPi));
}

std::vector<double> evolved_weights(const AngularSpectrum& spec, const ModelParams& params,
                                    TimePoint eta) {
  return weights(spec, params, eta, eta);
}

}  // namespace

AngularSpectrum::AngularSpectrum(std::vector<double> cl) : cl_(std::move(cl)) {
  if (cl_.empty()) throw ValidationError("spectrum needs at least C_0");
  for (std::size_t l = 0; l < cl_.size(); ++l) {
    if (!std::isfinite(cl_[l]) || cl_[l] < 0.0) {
      throw ValidationError("C_l must be finite and >= 0 (l=" + std::to_string(l) +
                            ", value " + format_real(cl_[l]) + ")");
    }
  }
}

double AngularSpectrum::weighted_sum() const {
  double s = 0.0;
  for (int l = 0; l <= lmax(); ++l) s += cl_[l] * (2.0 * l + 1.0);
  return s;
}

AngularSpectrum AngularSpectrum::scaled(double s) const {
  auto c = cl_;
  for (auto& v : c) v *= s;
  return AngularSpectrum(std::move(c));
}

AngularSpectrum AngularSpectrum::tail(int L) const {
  auto c = cl_;
  for (int l = 0; l <= std::min(L, lmax()); ++l) c[l] = 0.0;
  return AngularSpectrum(std::move(c));
}

AngularSpectrum AngularSpectrum::head(int L) const {
  auto c = cl_;
  for (int l = std::max(L + 1, 0); l <= lmax(); ++l) c[l] = 0.0;
  return AngularSpectrum(std::move(c));
}

AngularSpectrum parse_spectrum(std::string_view text, const std::string& source) {
  const auto table = parse_table(text, {"l", "Cl"}, source);
  if (table.rows.empty()) throw ValidationError(source + ": spectrum has no rows");
  std::vector<double> cl;
  cl.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const double l = table.rows[i][0];
    const double c = table.rows[i][1];
    if (l != static_cast<double>(i)) {
      throw ValidationError(source + ":" + std::to_string(table.line_numbers[i]) +
                            ": non-contiguous multipole (expected l=" + std::to_string(i) +
                            ", found " + format_real(l) + ")");
    }
    if (!std::isfinite(c) || c < 0.0) {
      throw ValidationError(source + ":" + std::to_string(table.line_numbers[i]) +
                            ": C_l must be finite and >= 0 (l=" + std::to_string(i) + ")");
    }
    cl.push_back(c);
  }
  return AngularSpectrum(std::move(cl));
}

AngularSpectrum load_spectrum(const std::filesystem::path& path) {
  return parse_spectrum(read_text_file(path), path.string());
}

void save_spectrum(const std::filesystem::path& path, const AngularSpectrum& spec) {
  std::vector<double> l(spec.values().size());
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = static_cast<double>(i);
  write_table(path, make_curve("l", "Cl", l, {spec.values().begin(), spec.values().end()}));
}

AngularSpectrum reference_spectrum(int lmax) {
  if (lmax < 0) throw DomainError("lmax must be >= 0");
  auto bump = [](double l, double centre, double width) {
    const double u = (l - centre) / width;
    return std::exp(-u * u);
  };
  std::vector<double> cl(static_cast<std::size_t>(lmax) + 1, 0.0);
  for (int l = 2; l <= lmax; ++l) {
    const double x = l;
    const double dl = (1000.0 + 4500.0 * bump(x, 220.0, 80.0) + 2000.0 * bump(x, 540.0, 90.0) +
                       2200.0 * bump(x, 810.0, 100.0)) *
                      std::exp(-(x / 1500.0) * (x / 1500.0));
    cl[l] = 2.0 * kPi * dl / (x * (x + 1.0));
  }
  return AngularSpectrum(std::move(cl));
}

AngularSpectrum evolved_spectrum(const AngularSpectrum& spec, const ModelParams& params,
                                 TimePoint eta) {
  const auto f = evolution_factors(params, spec.lmax(), eta);
  std::vector<double> out(f.size());
  for (int l = 0; l <= spec.lmax(); ++l) out[l] = spec[l] * f[l] * f[l];
  return AngularSpectrum(std::move(out));
}

double covariance(const AngularSpectrum& spec, const ModelParams& params,
                  const CovarianceQuery& q) {
  check_theta(q.Theta);
  const auto w = weights(spec, params, q.eta, q.eta_prime);
  std::vector<double> p;
  return legendre_sum(w, q.Theta, p) / (4.0 * kPi);
}

std::vector<double> covariance_curve(const AngularSpectrum& spec, const ModelParams& params,
                                     TimePoint eta, TimePoint eta_prime,
                                     std::span<const double> thetas) {
  for (double t : thetas) check_theta(t);
  const auto w = weights(spec, params, eta, eta_prime);
  std::vector<double> out(thetas.size());
  const auto n = static_cast<long>(thetas.size());
#pragma omp parallel
  {
    std::vector<double> p;
#pragma omp for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = legendre_sum(w, thetas[i], p) / (4.0 * kPi);
  }
  return out;
}

double variance(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta) {
  const auto w = evolved_weights(spec, params, eta);
  double s = 0.0;
  for (double v : w) s += v;
  return s / (4.0 * kPi);
}

double pseudometric(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta,
                    double Theta) {
  check_theta(Theta);
  const auto w = evolved_weights(spec, params, eta);
  std::vector<double> p;
  return metric_from_weights(w, Theta, p);
}

double MetricGrid::max_d() const {
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

MetricGrid pseudometric_grid(const AngularSpectrum& spec, const ModelParams& params,
                             TimePoint eta, int resolution) {
  if (resolution < 2) throw DomainError("metric grid needs at least 2 points");
  const auto w = evolved_weights(spec, params, eta);
  MetricGrid grid;
  grid.theta.resize(resolution);
  grid.d.resize(resolution);
  for (int i = 0; i < resolution; ++i) grid.theta[i] = kPi * i / (resolution - 1);
  grid.theta.back() = kPi;
#pragma omp parallel
  {
    std::vector<double> p;
#pragma omp for schedule(static)
    for (int i = 0; i < resolution; ++i) grid.d[i] = metric_from_weights(w, grid.theta[i], p);
  }
  return grid;
}

GEps g_eps(const MetricGrid& grid, double eps) {
  for (std::size_t i = 0; i < grid.d.size(); ++i) {
    if (grid.d[i] >= eps) return {grid.theta[i], false};
  }
  return {kPi, true};
}

GEps g_eps(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta, double eps,
           int resolution) {
  if (resolution < 100) throw DomainError("g_eps needs a resolution of at least 100");
  if (!(eps >= 0.0)) throw DomainError("eps must be >= 0");
  return g_eps(pseudometric_grid(spec, params, eta, resolution), eps);
}

std::vector<double> evolution_envelope(const ModelParams& params, int lmax,
                                       const TimePoint* also) {
  std::vector<double> env(static_cast<std::size_t>(lmax) + 1, 0.0);
  auto absorb = [&](TimePoint t) {
    const auto f = evolution_factors(params, lmax, t);
    for (int l = 0; l <= lmax; ++l) env[l] = std::max(env[l], std::abs(f[l]));
  };
  for (int i = 0; i < kEnvelopeGrid; ++i) {
    absorb(TimePoint::make(params, kEnvelopeReach * params.eta_inf() * i / kEnvelopeGrid));
  }
  if (also) absorb(*also);
  return env;
}

namespace {

// Builds every L from the top down so each tail sum is accumulated once.
std::vector<TruncationError> truncation_all(const AngularSpectrum& spec,
                                            const ModelParams& params, TimePoint eta) {
  const int lmax = spec.lmax();
  const auto f = evolution_factors(params, lmax, eta);
  const auto env = evolution_envelope(params, lmax, &eta);
  // index L + 1, so entry 0 is L = -1
  std::vector<TruncationError> out(static_cast<std::size_t>(lmax) + 2);
  double exact = 0.0;
  double raw = 0.0;
  double b = 0.0;
  out[lmax + 1] = {0.0, 0.0, 0.0};
  for (int L = lmax - 1; L >= -1; --L) {
    const int l = L + 1;
    const double e = spec[l] * (2.0 * l + 1.0);
    exact += e * f[l] * f[l];
    raw += e;
    b = std::max(b, env[l]);
    out[L + 1] = {std::sqrt(exact), b * std::sqrt(raw), b};
  }
  return out;
}

}  // namespace

TruncationError truncation_error(const AngularSpectrum& spec, const ModelParams& params,
                                 TimePoint eta, int L) {
  if (L < -1 || L > spec.lmax()) throw DomainError("truncation degree must satisfy -1 <= L <= lmax");
  return truncation_all(spec, params, eta)[static_cast<std::size_t>(L + 1)];
}

std::vector<TruncationError> truncation_curve(const AngularSpectrum& spec,
                                              const ModelParams& params, TimePoint eta) {
  auto all = truncation_all(spec, params, eta);
  all.erase(all.begin());
  return all;
}

double tail_variance(const AngularSpectrum& spec, const ModelParams& params, TimePoint eta,
                     int L) {
  if (L < -1 || L > spec.lmax()) throw DomainError("truncation degree must satisfy -1 <= L <= lmax");
  const auto f = evolution_factors(params, spec.lmax(), eta);
  double s = 0.0;
  for (int l = L + 1; l <= spec.lmax(); ++l) s += spec[l] * (2.0 * l + 1.0) * f[l] * f[l];
  return s / (4.0 * kPi);
}

double time_increment_norm(const AngularSpectrum& spec, const ModelParams& params,
                           TimePoint eta, double h) {
  if (!(h > 0.0)) throw DomainError("time increment h must be > 0");
  const auto later = TimePoint::make(params, eta.eta() + h);
  const auto f0 = evolution_factors(params, spec.lmax(), eta);
  const auto f1 = evolution_factors(params, spec.lmax(), later);
  double s = 0.0;
  for (int l = 0; l <= spec.lmax(); ++l) {
    const double d = f1[l] - f0[l];
    s += spec[l] * (2.0 * l + 1.0) * d * d;
  }
  return std::sqrt(s);
}

ConditionReport check_condition(const AngularSpectrum& spec, ConditionKind kind, double beta) {
  if (kind == ConditionKind::BetaSmooth && !(beta > 0.0 && beta <= 2.0)) {
    throw DomainError("beta must lie in (0, 2]");
  }
  auto summand = [&](int l) {
    const double x = l;
    switch (kind) {
      case ConditionKind::L2Convergence: return spec[l] * (2.0 * x + 1.0);
      case ConditionKind::C2Smooth: return spec[l] * std::pow(x, 10.0) * (2.0 * x + 1.0);
      case ConditionKind::BetaSmooth: return spec[l] * std::pow(x, 1.0 + beta);
    }
    return 0.0;
  };
  ConditionReport r{kind, kind == ConditionKind::BetaSmooth ? beta : 0.0, 0.0, 0.0, 0, true};
  for (int l = 0; l <= spec.lmax(); ++l) r.partial_sum += summand(l);

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int l = std::max(1, spec.lmax() / 2); l <= spec.lmax(); ++l) {
    const double s = summand(l);
    if (!(s > 0.0)) continue;
    const double x = std::log(static_cast<double>(l));
    const double y = std::log(s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++r.fit_points;
  }
  if (r.fit_points >= 2) {
    const double n = r.fit_points;
    const double den = n * sxx - sx * sx;
    if (den > 0.0) {
      r.slope = (n * sxy - sx * sy) / den;
      r.slow = r.slope > -1.0;
    }
  }
  if (r.fit_points < 2) r.slope = NAN;
  return r;
}

}  // namespace sphdiff
