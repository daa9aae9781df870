#include <cmath>
#include <stdexcept>
#include <vector>

#include "georoute/experiments.hpp"

namespace georoute {

MomentOracle scheme_moment_oracle(const SchemeSpec& scheme, double mean_count, std::size_t n_samples,
                                  std::uint64_t seed, double dest_distance) {
  if (!(mean_count > 0.0)) throw std::invalid_argument("mean_count: must be positive");
  if (n_samples < 2) throw std::invalid_argument("n_samples: must be >= 2");
  const SchemeSpec rule = scheme.normalized();
  const double half = rule.eta * kPi;
  Rng rng = Rng::stream(seed, {2, static_cast<std::uint64_t>(rule.kind)});
  std::vector<LocalProgress> cands;
  std::vector<double> xs(n_samples), gs(n_samples);
  CompensatedSum y2;
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::uint64_t k = 0;
    while (k == 0) k = rng.poisson(mean_count);
    cands.resize(k);
    for (auto& c : cands) {
      const double rho = std::sqrt(rng.uniform());
      const double theta = (2.0 * rng.uniform() - 1.0) * half;
      c = {rho * std::cos(theta), rho * std::sin(theta)};
    }
    const LocalProgress& pick = cands[select_relay(rule, cands, dest_distance, rng)];
    xs[s] = pick.x_prime;
    gs[s] = g(1.0, pick.x_prime, pick.y_prime);
    y2.add(pick.y_prime * pick.y_prime);
  }
  const EstimatorResult ex = summarize(xs);
  const EstimatorResult eg = summarize(gs);
  MomentOracle m;
  m.mean_x = ex.mean;
  m.var_x = ex.variance;
  m.se_x = ex.std_error();
  m.mean_g = eg.mean;
  m.se_g = eg.std_error();
  m.mean_y2 = y2.value() / static_cast<double>(n_samples);
  m.n_samples = n_samples;
  return m;
}

SchemeCheck scheme_prediction_check(const ExperimentConfig& cfg, std::size_t oracle_samples, double rel_se,
                                    std::size_t max_samples) {
  cfg.validate();
  if (!cfg.h) throw std::invalid_argument("h: scheme check needs a fixed h");
  const double radius = cfg.base.radius;
  const double h = *cfg.h;
  if (h < 2.0 * radius) throw std::invalid_argument("h: scheme check needs h >= 2R");
  const SchemeSpec rule = cfg.scheme.normalized();
  const double mean_count = cfg.base.lambda * rule.eta * kPi * radius * radius;

  SchemeCheck out;
  std::size_t n = oracle_samples;
  for (;;) {
    out.oracle = scheme_moment_oracle(rule, mean_count, n, cfg.base.seed, h / (2.0 * radius));
    if (out.oracle.se_x <= rel_se * std::abs(out.oracle.mean_x)) break;
    if (n >= max_samples) throw std::runtime_error("scheme oracle standard error stays above threshold at the sample cap");
    n = std::min(max_samples, 2 * n);
  }
  out.simulated = run_hopcount_experiment(cfg);
  const MomentOracle& o = out.oracle;
  out.predicted_mean_nu = h / (radius * o.mean_x);
  out.mean_deviation = (out.simulated.nu.mean - out.predicted_mean_nu) / out.predicted_mean_nu;
  out.predicted_vmr = o.var_x / (o.mean_x * o.mean_x);
  out.simulated_vmr = out.simulated.nu.variance / out.simulated.nu.mean;
  out.vmr_deviation = (out.simulated_vmr - out.predicted_vmr) / out.predicted_vmr;
  out.side_condition = o.mean_y2 <= o.mean_x;
  return out;
}

}  // namespace georoute
