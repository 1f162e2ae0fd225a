#include "sphdiff/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sphdiff/rng.hpp"
#include "sphdiff/synthesis_kernels.hpp"
#include "sphdiff/text_io.hpp"

namespace sphdiff {

namespace {

constexpr double kPi = std::numbers::pi;

void check_lm(int lmax, int l, int m) {
  if (l < 0 || l > lmax || std::abs(m) > l) {
    throw DomainError("coefficient index (" + std::to_string(l) + ", " + std::to_string(m) +
                      ") outside lmax " + std::to_string(lmax));
  }
}

}  // namespace

HarmonicCoefficients::HarmonicCoefficients(int lmax) : lmax_(lmax) {
  if (lmax < 0) throw DomainError("lmax must be >= 0");
  a_.assign(tri_size(lmax), 0.0);
}

HarmonicCoefficients::HarmonicCoefficients(int lmax, std::vector<std::complex<double>> a)
    : lmax_(lmax), a_(std::move(a)) {
  if (lmax < 0) throw DomainError("lmax must be >= 0");
  if (a_.size() != tri_size(lmax)) throw ValidationError("coefficient array has the wrong size");
  for (int l = 0; l <= lmax; ++l) {
    for (int m = 0; m <= l; ++m) {
      const auto v = a_[tri_index(l, m)];
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw ValidationError("non-finite coefficient at l=" + std::to_string(l) +
                              ", m=" + std::to_string(m));
      }
    }
    if (a_[tri_index(l, 0)].imag() != 0.0) {
      throw ValidationError("a_l0 must be real (l=" + std::to_string(l) + ")");
    }
  }
}

std::complex<double> HarmonicCoefficients::operator()(int l, int m) const {
  check_lm(lmax_, l, m);
  const auto v = a_[tri_index(l, std::abs(m))];
  if (m >= 0) return v;
  return ((m % 2) ? -1.0 : 1.0) * std::conj(v);
}

void HarmonicCoefficients::set(int l, int m, std::complex<double> v) {
  check_lm(lmax_, l, m);
  if (m < 0) throw DomainError("set() takes m >= 0; negative orders follow by symmetry");
  if (m == 0 && v.imag() != 0.0) throw DomainError("a_l0 must be real");
  a_[tri_index(l, m)] = v;
}

double FieldMap::phi(int j) const { return 2.0 * kPi * j / n_phi; }

std::vector<double> midpoint_thetas(int n_theta) {
  if (n_theta < 1) throw DomainError("n_theta must be >= 1");
  std::vector<double> t(n_theta);
  for (int i = 0; i < n_theta; ++i) t[i] = (i + 0.5) * kPi / n_theta;
  return t;
}

bool grid_undersampled(int lmax, int n_theta, int n_phi) {
  return n_theta < lmax + 1 || n_phi < 2 * lmax + 1;
}

HarmonicCoefficients sample_coefficients(const AngularSpectrum& spec, std::uint64_t seed) {
  GaussianStream g(seed);
  HarmonicCoefficients a(spec.lmax());
  for (int l = 0; l <= spec.lmax(); ++l) {
    const double sd0 = std::sqrt(spec[l]);
    const double sd = std::sqrt(0.5 * spec[l]);
    a.set(l, 0, sd0 * g.next());
    for (int m = 1; m <= l; ++m) {
      const double x = g.next();
      const double y = g.next();
      a.set(l, m, {sd * x, sd * y});
    }
  }
  return a;
}

HarmonicCoefficients evolve_coefficients(const HarmonicCoefficients& a, const ModelParams& params,
                                         TimePoint eta) {
  const auto f = evolution_factors(params, a.lmax(), eta);
  std::vector<std::complex<double>> out(a.data().begin(), a.data().end());
  for (int l = 0; l <= a.lmax(); ++l) {
    for (int m = 0; m <= l; ++m) out[tri_index(l, m)] *= f[l];
  }
  return HarmonicCoefficients(a.lmax(), std::move(out));
}

HarmonicCoefficients tail_coefficients(const HarmonicCoefficients& a, int L) {
  if (L < -1 || L > a.lmax()) throw DomainError("truncation degree must satisfy -1 <= L <= lmax");
  std::vector<std::complex<double>> out(a.data().begin(), a.data().end());
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(tri_size(L)), 0.0);
  return HarmonicCoefficients(a.lmax(), std::move(out));
}

FieldMap synthesize_on(const HarmonicCoefficients& a, std::span<const double> theta, int n_phi) {
  const SynthesisPlan plan(a.lmax(), {theta.begin(), theta.end()}, n_phi);
  FieldMap map;
  map.n_theta = plan.n_theta();
  map.n_phi = n_phi;
  map.theta.assign(theta.begin(), theta.end());
  map.values.resize(static_cast<std::size_t>(map.n_theta) * n_phi);
  plan.run_parallel(a, map.values);
  return map;
}

FieldMap synthesize(const HarmonicCoefficients& a, int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw DomainError("grid dimensions must be >= 1");
  const auto theta = midpoint_thetas(n_theta);
  return synthesize_on(a, theta, n_phi);
}

double evaluate_point(const HarmonicCoefficients& a, double theta, double phi) {
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("theta must lie in [0, pi]");
  if (!(phi >= 0.0 && phi < 2.0 * kPi)) throw DomainError("phi must lie in [0, 2 pi)");
  std::vector<double> lam(tri_size(a.lmax()));
  normalized_legendre_table(a.lmax(), std::cos(theta), std::sin(theta), lam);
  const auto c = a.data();
  double v = 0.0;
  for (int l = 0; l <= a.lmax(); ++l) v += c[tri_index(l, 0)].real() * lam[tri_index(l, 0)];
  double acc = 0.0;
  for (int m = 1; m <= a.lmax(); ++m) {
    const double cm = std::cos(m * phi);
    const double sm = std::sin(m * phi);
    for (int l = m; l <= a.lmax(); ++l) {
      const auto k = tri_index(l, m);
      acc += lam[k] * (c[k].real() * cm - c[k].imag() * sm);
    }
  }
  return v + 2.0 * acc;
}

AngularSpectrum empirical_spectrum(const HarmonicCoefficients& a) {
  std::vector<double> c(static_cast<std::size_t>(a.lmax()) + 1);
  const auto d = a.data();
  for (int l = 0; l <= a.lmax(); ++l) {
    double s = std::norm(d[tri_index(l, 0)]);
    for (int m = 1; m <= l; ++m) s += 2.0 * std::norm(d[tri_index(l, m)]);
    c[l] = s / (2.0 * l + 1.0);
  }
  return AngularSpectrum(std::move(c));
}

HarmonicCoefficients load_coefficients(const std::filesystem::path& path) {
  const auto table = read_table(path, {"l", "m", "re", "im"});
  const std::string src = path.string();
  int lmax = -1;
  while (tri_size(lmax + 1) <= table.rows.size()) ++lmax;
  if (lmax < 0 || tri_size(lmax) != table.rows.size()) {
    throw ValidationError(src + ": row count " + std::to_string(table.rows.size()) +
                          " is not a complete triangle of (l, m >= 0)");
  }
  std::vector<std::complex<double>> a(table.rows.size());
  std::size_t i = 0;
  for (int l = 0; l <= lmax; ++l) {
    for (int m = 0; m <= l; ++m, ++i) {
      const auto& r = table.rows[i];
      if (r[0] != l || r[1] != m) {
        throw ValidationError(src + ":" + std::to_string(table.line_numbers[i]) +
                              ": expected (l, m) = (" + std::to_string(l) + ", " +
                              std::to_string(m) + ")");
      }
      if (m == 0 && r[3] != 0.0) {
        throw ValidationError(src + ":" + std::to_string(table.line_numbers[i]) +
                              ": a_l0 must be real");
      }
      a[i] = {r[2], r[3]};
    }
  }
  return HarmonicCoefficients(lmax, std::move(a));
}

void save_coefficients(const std::filesystem::path& path, const HarmonicCoefficients& a) {
  NumericTable t;
  t.columns = {"l", "m", "re", "im"};
  t.rows.reserve(a.data().size());
  for (int l = 0; l <= a.lmax(); ++l) {
    for (int m = 0; m <= l; ++m) {
      const auto v = a.data()[tri_index(l, m)];
      t.rows.push_back({static_cast<double>(l), static_cast<double>(m), v.real(), v.imag()});
    }
  }
  write_table(path, t);
}

void save_map(const std::filesystem::path& path, const FieldMap& map) {
  NumericTable t;
  t.comments = {{"n_theta", std::to_string(map.n_theta)}, {"n_phi", std::to_string(map.n_phi)}};
  if (map.eta) t.comments.emplace_back("eta", format_real(*map.eta));
  t.columns = {"theta", "phi", "value"};
  t.rows.reserve(map.values.size());
  for (int i = 0; i < map.n_theta; ++i) {
    for (int j = 0; j < map.n_phi; ++j) t.rows.push_back({map.theta[i], map.phi(j), map.at(i, j)});
  }
  write_table(path, t);
}

FieldMap load_map(const std::filesystem::path& path) {
  const auto t = read_table(path, {"theta", "phi", "value"});
  FieldMap map;
  for (const auto& [k, v] : t.comments) {
    double x = 0.0;
    if (!parse_real(v, x)) continue;
    if (k == "n_theta") map.n_theta = static_cast<int>(x);
    if (k == "n_phi") map.n_phi = static_cast<int>(x);
    if (k == "eta") map.eta = x;
  }
  if (map.n_theta < 1 || map.n_phi < 1 ||
      t.rows.size() != static_cast<std::size_t>(map.n_theta) * map.n_phi) {
    throw ValidationError(path.string() + ": map dimensions missing or inconsistent");
  }
  for (int i = 0; i < map.n_theta; ++i) map.theta.push_back(t.rows[static_cast<std::size_t>(i) * map.n_phi][0]);
  map.values.reserve(t.rows.size());
  for (const auto& r : t.rows) map.values.push_back(r[2]);
  return map;
}

}  // namespace sphdiff
