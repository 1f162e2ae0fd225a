// sphdiff_cli: drivers for the spherical diffusion experiments. Every command
// writes plot-ready delimited text plus manifest_<command>.json into --out.

#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"
#include "sphdiff/field.hpp"
#include "sphdiff/special_functions.hpp"
#include "sphdiff/text_io.hpp"

using namespace sphdiff;
using namespace sphdiff::cli;

int main(int argc, char** argv) {
  CLI::App app{"Isotropic random fields under diffusion on an expanding sphere"};
  app.set_config("--config", "", "TOML or INI file with option values; flags override it");
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--c", cfg.c, "diffusion speed constant c")->capture_default_str();
  app.add_option("--D", cfg.D, "diffusion coefficient D")->capture_default_str();
  app.add_option("--r", cfg.r, "sphere radius r")->capture_default_str();
  auto* eta_inf = app.add_option("--eta-inf", cfg.eta_inf, "conformal horizon (default 1)");
  auto* lambda = app.add_option("--lambda", cfg.lambda, "cosmological constant, sets eta_inf");
  eta_inf->excludes(lambda);
  auto* eta = app.add_option("--eta", cfg.eta, "conformal times")->delimiter(',');
  auto* t = app.add_option("--t", cfg.t, "physical times, converted to conformal")->delimiter(',');
  eta->excludes(t);
  app.add_option("--lmax", cfg.lmax, "degree cap");
  app.add_option("--seed", cfg.seed, "base seed")->capture_default_str();
  app.add_option("--grid", cfg.grid, "map grid NTHETAxNPHI")->capture_default_str();
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--spectrum", cfg.spectrum, "spectrum file (l,Cl); default reference spectrum")
      ->check(CLI::ExistingFile);

  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  FactorsOptions factors;
  auto* c_factors = sub("factors", "evolution factors F_l against l and against eta");
  c_factors->add_option("--ells", factors.ells, "degrees for the F-vs-eta curves")
      ->delimiter(',');
  c_factors->add_option("--eta-points", factors.eta_points)->capture_default_str();
  c_factors->add_option("--eta-reach", factors.eta_reach, "fraction of eta_inf swept")
      ->capture_default_str();

  auto* c_evolve = sub("evolve-spectrum", "angular spectrum C_l F_l^2 at each eta");

  CovarianceOptions cov;
  auto* c_cov = sub("covariance", "covariance curves and the normalised (Theta, eta) surface");
  c_cov->add_option("--theta-points", cov.theta_points)->capture_default_str();
  c_cov->add_option("--eta-prime", cov.eta_prime, "second time for a cross-covariance curve");
  c_cov->add_option("--surface-eta-max", cov.surface_eta_max)->capture_default_str();
  c_cov->add_option("--surface-eta-points", cov.surface_eta_points)->capture_default_str();
  c_cov->add_option("--surface-theta-points", cov.surface_theta_points)->capture_default_str();

  SynthesizeOptions synth;
  auto* c_synth = sub("synthesize", "sample or load coefficients, evolve and synthesize maps");
  c_synth->add_option("--coefficients", synth.coefficients, "coefficient file (l,m,re,im)")
      ->check(CLI::ExistingFile);

  auto* c_trunc = sub("truncation", "exact truncation error, its bound and envelope against L");

  MetricOptions metric;
  auto* c_metric = sub("metric", "canonical pseudometric d(Theta) and g(eps)");
  c_metric->add_option("--theta-resolution", metric.theta_resolution)->capture_default_str();
  c_metric->add_option("--eps-points", metric.eps_points)->capture_default_str();

  McSupCliOptions mc;
  auto* c_mc = sub("mc-sup", "Monte Carlo sample of the grid supremum");
  c_mc->add_option("--n-real", mc.n_real)->capture_default_str();
  c_mc->add_flag("--abs", mc.absolute, "supremum of |u|");
  c_mc->add_option("--tail-above", mc.tail_above, "keep only l > L")->capture_default_str();
  c_mc->add_option("--refine", mc.refine, "realizations re-run on the doubled grid")
      ->capture_default_str();

  BoundsOptions bounds;
  auto* c_bounds = sub("bounds", "excursion probability bounds against the empirical curve");
  c_bounds->add_option("--route", bounds.route, "E sup estimate: mc, entropy or both")
      ->check(CLI::IsMember({"mc", "entropy", "both"}))
      ->capture_default_str();
  c_bounds->add_option("--K", bounds.K, "entropy integral constant")->capture_default_str();
  c_bounds->add_option("--sup-sample", bounds.sup_sample, "reuse a sup-sample file")
      ->check(CLI::ExistingFile);
  c_bounds->add_option("--x-points", bounds.x_points)->capture_default_str();
  c_bounds->add_option("--n-real", bounds.n_real)->capture_default_str();
  c_bounds->add_option("--n-eps", bounds.n_eps)->capture_default_str();
  c_bounds->add_option("--theta-resolution", bounds.theta_resolution)->capture_default_str();

  OracleOptions oracle;
  auto* c_oracle = sub("oracle-check", "closed-form F_l against the ODE integration");
  c_oracle->add_option("--l-min", oracle.l_min)->capture_default_str();
  c_oracle->add_option("--l-max", oracle.l_max)->capture_default_str();
  c_oracle->add_option("--eta-fractions", oracle.eta_fractions, "eta / eta_inf values")
      ->delimiter(',');
  c_oracle->add_option("--tolerance", oracle.tolerance)->capture_default_str();
  c_oracle->add_option("--initial-step", oracle.initial_step)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    auto run = [&](const std::string& name, std::optional<int> lmax, auto&& body) {
      auto ctx = make_context(cfg, name, lmax);
      const int code = body(ctx);
      write_manifest(ctx);
      for (const auto& w : ctx.warnings) std::cerr << "warning: " << w << "\n";
      return code;
    };
    if (*c_factors) return run("factors", 500, [&](Context& c) { return cmd_factors(c, factors); });
    if (*c_evolve) return run("evolve-spectrum", {}, [](Context& c) { return cmd_evolve_spectrum(c); });
    if (*c_cov) return run("covariance", {}, [&](Context& c) { return cmd_covariance(c, cov); });
    if (*c_synth) return run("synthesize", {}, [&](Context& c) { return cmd_synthesize(c, synth); });
    if (*c_trunc) return run("truncation", {}, [](Context& c) { return cmd_truncation(c); });
    if (*c_metric) return run("metric", {}, [&](Context& c) { return cmd_metric(c, metric); });
    if (*c_mc) return run("mc-sup", {}, [&](Context& c) { return cmd_mc_sup(c, mc); });
    if (*c_bounds) return run("bounds", {}, [&](Context& c) { return cmd_bounds(c, bounds); });
    if (*c_oracle) return run("oracle-check", {}, [&](Context& c) { return cmd_oracle_check(c, oracle); });
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kConfigError;
}
