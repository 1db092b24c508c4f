#include "pmf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pmf/rho.hpp"

namespace pmf {

OutcomeDistribution Transcript::empirical_outcomes() const {
  if (horizon == 0) throw Error("empty transcript");
  std::vector<double> q(outcome_counts.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] = static_cast<double>(outcome_counts[j]) / static_cast<double>(horizon);
  }
  return OutcomeDistribution(std::move(q));
}

Transcript run_episode(const GameSpec& game, Forecaster& forecaster, Environment& env,
                       std::size_t n, EpisodeStreams& streams, const EpisodeOptions& options) {
  Transcript tr;
  tr.game = game.name();
  tr.forecaster = forecaster.label();
  tr.environment = env.describe();
  tr.horizon = n;
  tr.outcome_counts.assign(game.n_outcomes(), 0);
  if (options.record_rounds) {
    tr.actions.reserve(n);
    tr.outcomes.reserve(n);
    tr.signals.reserve(n);
    tr.rewards.reserve(n);
  }
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t j = env.next_outcome(streams.environment);
    if (j >= game.n_outcomes()) throw Error("environment produced an invalid outcome");
    const MixedAction p = forecaster.next_distribution();
    const std::size_t i = forecaster.draw_action(p, streams.forecaster);
    const double r = game.reward(i, j);
    tr.total_reward += r;
    tr.total_expected_reward += game.reward(p.probs(), j);
    ++tr.outcome_counts[j];
    const std::size_t s = draw_signal(game, i, j, streams.signal);
    if (options.record_rounds) {
      tr.actions.push_back(static_cast<std::uint32_t>(i));
      tr.outcomes.push_back(static_cast<std::uint32_t>(j));
      tr.signals.push_back(static_cast<std::uint32_t>(s));
      tr.rewards.push_back(r);
      if (options.record_distributions) tr.distributions.push_back(p.vector());
    }
    forecaster.observe(i, s);
    env.observe_action(i);
  }
  tr.updates = forecaster.updates();
  tr.max_subgradient_norm = forecaster.max_subgradient_norm();
  tr.blocks = forecaster.block_estimates();
  return tr;
}

Transcript run_episode(const GameSpec& game, const GameConstants& constants,
                       const ForecasterParams& params, const EnvironmentSpec& env,
                       std::uint64_t seed, const EpisodeOptions& options) {
  auto forecaster = make_forecaster(game, constants, params);
  auto environment = env.instantiate(game, params.horizon);
  EpisodeStreams streams = EpisodeStreams::split(seed);
  Transcript tr = run_episode(game, *forecaster, *environment, params.horizon, streams, options);
  tr.seed = seed;
  tr.params = params;
  tr.environment = env.to_string();
  return tr;
}

RegretReport regret(const GameSpec& game, const Transcript& transcript,
                    const GameConstants* constants, double delta) {
  const OutcomeDistribution q = transcript.empirical_outcomes();
  const MaxRho best = max_rho(game, signal_dist(game, q));
  RegretReport rep;
  const double n = static_cast<double>(transcript.horizon);
  rep.benchmark = best.value;
  rep.benchmark_argmax = best.argmax.vector();
  rep.average_reward = transcript.total_reward / n;
  rep.average_expected_reward = transcript.total_expected_reward / n;
  rep.regret = rep.benchmark - rep.average_reward;
  rep.delta = delta;
  if (constants && transcript.params) {
    rep.bound = theoretical_bound(*transcript.params, game, *constants, delta);
  }
  return rep;
}

EstimatorDiagnostics estimator_diagnostics(const GameSpec& game, const Transcript& transcript,
                                           double delta) {
  if (!transcript.params || !is_blocked(transcript.params->variant)) {
    throw ConfigError("estimator diagnostics require a blocked-variant transcript");
  }
  if (!transcript.has_rounds()) {
    throw ConfigError("estimator diagnostics require recorded rounds");
  }
  const ForecasterParams& params = *transcript.params;
  const bool single = params.variant == Variant::kRandOutcome;
  const std::size_t m = params.block;
  const std::size_t dim = single ? game.n_signals() : game.n_actions() * game.n_signals();

  EstimatorDiagnostics out;
  out.bound = block_error_bound(params, game, delta);
  for (const BlockEstimate& est : transcript.blocks) {
    std::vector<double> truth(dim, 0.0);
    for (std::size_t t = est.block * m; t < (est.block + 1) * m; ++t) {
      const std::size_t j = transcript.outcomes[t];
      if (single) {
        const auto cell = game.feedback().cell(0, j);
        for (std::size_t s = 0; s < dim; ++s) truth[s] += cell[s];
      } else {
        const std::vector<double> col = game.feedback_column(j);
        for (std::size_t k = 0; k < dim; ++k) truth[k] += col[k];
      }
    }
    double raw = 0.0, proj = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      truth[k] /= static_cast<double>(m);
      raw += (truth[k] - est.raw_mean[k]) * (truth[k] - est.raw_mean[k]);
      proj += (truth[k] - est.projected[k]) * (truth[k] - est.projected[k]);
    }
    BlockDiagnostic d{est.block, std::sqrt(raw), std::sqrt(proj)};
    if (d.projected_error > out.bound) ++out.violations;
    out.blocks.push_back(d);
  }
  if (!out.blocks.empty()) {
    out.violation_fraction = static_cast<double>(out.violations) / static_cast<double>(out.blocks.size());
  }
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

void check_rate_options(const RateOptions& options) {
  if (options.horizons.size() < 4) throw ConfigError("at least 4 horizons required");
  const auto [lo, hi] = std::minmax_element(options.horizons.begin(), options.horizons.end());
  if (*lo == 0 || static_cast<double>(*hi) < 100.0 * static_cast<double>(*lo)) {
    throw ConfigError("horizons must span at least 2 decades");
  }
  if (options.seeds < 20) throw ConfigError("at least 20 seeds per horizon required");
}

void fit(RateReport& report, const RateOptions& options) {
  std::vector<double> x, y;
  for (const RatePoint& pt : report.points) {
    if (!(pt.median_regret > 0.0)) {
      throw Error("median regret is not positive at n = " + std::to_string(pt.horizon) +
                  "; log-log slope undefined");
    }
    x.push_back(std::log(static_cast<double>(pt.horizon)));
    y.push_back(std::log(pt.median_regret));
  }
  report.slope = least_squares_slope(x, y);

  Rng rng(options.bootstrap_seed);
  std::vector<double> slopes;
  for (std::size_t b = 0; b < options.bootstrap; ++b) {
    std::vector<double> yb;
    bool ok = true;
    for (const RatePoint& pt : report.points) {
      std::vector<double> sample(pt.regrets.size());
      for (double& v : sample) {
        v = pt.regrets[static_cast<std::size_t>(rng.uniform() * static_cast<double>(pt.regrets.size()))];
      }
      const double med = median(std::move(sample));
      if (!(med > 0.0)) {
        ok = false;
        break;
      }
      yb.push_back(std::log(med));
    }
    if (ok) slopes.push_back(least_squares_slope(x, yb));
  }
  if (slopes.empty()) {
    report.ci_low = report.ci_high = report.slope;
    return;
  }
  std::sort(slopes.begin(), slopes.end());
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double f = pos - static_cast<double>(k);
    return k + 1 < slopes.size() ? slopes[k] * (1.0 - f) + slopes[k + 1] * f : slopes[k];
  };
  report.ci_low = at(0.025);
  report.ci_high = at(0.975);
}

}  // namespace

RateReport rate_experiment(const GameSpec& game, const ForecasterFactory& factory,
                           std::string label, double target, const EnvironmentSpec& env,
                           const RateOptions& options) {
  check_rate_options(options);
  RateReport report;
  report.forecaster = std::move(label);
  report.environment = env.to_string();
  report.target = target;
  for (std::size_t n : options.horizons) {
    RatePoint pt;
    pt.horizon = n;
    pt.regrets.assign(options.seeds, 0.0);
    parallel_for(options.seeds, options.threads, [&](std::size_t k) {
      auto forecaster = factory(n);
      auto environment = env.instantiate(game, n);
      EpisodeStreams streams = EpisodeStreams::split(options.base_seed + k);
      EpisodeOptions eo;
      eo.record_rounds = false;
      const Transcript tr = run_episode(game, *forecaster, *environment, n, streams, eo);
      pt.regrets[k] = regret(game, tr).regret;
    });
    pt.median_regret = median(pt.regrets);
    report.points.push_back(std::move(pt));
  }
  fit(report, options);
  return report;
}

RateReport rate_experiment(const GameSpec& game, const GameConstants& constants, Variant variant,
                           const EnvironmentSpec& env, const RateOptions& options) {
  check_compatible(variant, game);
  const auto factory = [&](std::size_t n) {
    return make_forecaster(game, constants,
                           ForecasterParams::defaults(variant, n, game, constants, options.overrides));
  };
  RateReport report = rate_experiment(game, factory, to_string(variant), target_exponent(variant),
                                      env, options);
  for (RatePoint& pt : report.points) {
    const ForecasterParams p = ForecasterParams::defaults(variant, pt.horizon, game, constants,
                                                          options.overrides);
    pt.bound = theoretical_bound(p, game, constants, options.delta).total;
  }
  return report;
}

}  // namespace pmf
