#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pmf/bounds.hpp"
#include "pmf/constants.hpp"
#include "pmf/environment.hpp"
#include "pmf/forecaster.hpp"
#include "pmf/game.hpp"
#include "pmf/harness.hpp"
#include "pmf/io.hpp"
#include "pmf/rho.hpp"

namespace pmf::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t default_seed() {
  const char* v = std::getenv("PM_SEED");
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (*end != '\0' || v[0] == '-') throw ConfigError("PM_SEED must be a non-negative integer");
  return s;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') {
      throw ConfigError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  const double f = pos - static_cast<double>(k);
  return k + 1 < v.size() ? v[k] * (1.0 - f) + v[k + 1] * f : v[k];
}

json quantiles(const std::vector<double>& v) {
  json j = json::object();
  const std::pair<const char*, double> qs[] = {{"min", 0.0},  {"q05", 0.05}, {"q25", 0.25},
                                               {"median", 0.5}, {"q75", 0.75}, {"q95", 0.95},
                                               {"max", 1.0}};
  for (const auto& [name, q] : qs) j[name] = round12(quantile(v, q));
  return j;
}

// Everything simulate and rates accept, from a JSON config and/or flags.
struct RunConfig {
  std::string game_path;
  std::string variant;
  std::vector<std::size_t> horizons;
  std::size_t seeds = 1;
  std::uint64_t seed = 1;
  double delta = 0.05;
  ForecasterOverrides overrides;
  std::string environment;
  std::string output_dir;
  std::string format = "csv";
  std::string oracle = "auto";
  std::size_t threads = 1;
  std::size_t bootstrap = 200;
  std::optional<std::vector<double>> control;
};

template <typename T>
T config_get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path + ": expected a JSON object");
  static const char* const known[] = {"game",   "variant",    "horizon",     "horizons", "seeds",
                                      "seed",   "delta",      "eta",         "block",    "gamma",
                                      "environment", "output_dir", "format", "oracle",  "threads",
                                      "bootstrap", "control"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError("config " + path + ": unknown field '" + key + "'");
    }
  }
  if (j.contains("game")) {
    fs::path g = config_get<std::string>(j, "game");
    if (g.is_relative()) g = fs::path(path).parent_path() / g;
    cfg.game_path = g.lexically_normal().string();
  }
  if (j.contains("variant")) cfg.variant = config_get<std::string>(j, "variant");
  if (j.contains("horizon")) cfg.horizons = {config_get<std::size_t>(j, "horizon")};
  if (j.contains("horizons")) cfg.horizons = config_get<std::vector<std::size_t>>(j, "horizons");
  if (j.contains("seeds")) cfg.seeds = config_get<std::size_t>(j, "seeds");
  if (j.contains("seed")) cfg.seed = config_get<std::uint64_t>(j, "seed");
  if (j.contains("delta")) cfg.delta = config_get<double>(j, "delta");
  if (j.contains("eta")) cfg.overrides.eta = config_get<double>(j, "eta");
  if (j.contains("block")) cfg.overrides.block = config_get<std::size_t>(j, "block");
  if (j.contains("gamma")) cfg.overrides.gamma = config_get<double>(j, "gamma");
  if (j.contains("environment")) cfg.environment = config_get<std::string>(j, "environment");
  if (j.contains("output_dir")) cfg.output_dir = config_get<std::string>(j, "output_dir");
  if (j.contains("format")) cfg.format = config_get<std::string>(j, "format");
  if (j.contains("oracle")) cfg.oracle = config_get<std::string>(j, "oracle");
  if (j.contains("threads")) cfg.threads = config_get<std::size_t>(j, "threads");
  if (j.contains("bootstrap")) cfg.bootstrap = config_get<std::size_t>(j, "bootstrap");
  if (j.contains("control")) cfg.control = config_get<std::vector<double>>(j, "control");
}

json config_json(const RunConfig& cfg) {
  json j{{"game", cfg.game_path},
         {"horizons", cfg.horizons},
         {"seeds", cfg.seeds},
         {"seed", cfg.seed},
         {"delta", round12(cfg.delta)},
         {"environment", cfg.environment},
         {"oracle", cfg.oracle}};
  j["variant"] = cfg.variant.empty() ? json(nullptr) : json(cfg.variant);
  j["eta"] = cfg.overrides.eta ? json(round12(*cfg.overrides.eta)) : json(nullptr);
  j["block"] = cfg.overrides.block ? json(*cfg.overrides.block) : json(nullptr);
  j["gamma"] = cfg.overrides.gamma ? json(round12(*cfg.overrides.gamma)) : json(nullptr);
  if (cfg.control) {
    json c = json::array();
    for (double v : *cfg.control) c.push_back(round12(v));
    j["control"] = c;
  }
  return j;
}

// Flags shared by simulate and rates; values land in `cfg` only when given.
struct RunFlags {
  std::string config;
  std::string game, variant, env, out, format, oracle, control;
  std::size_t n = 0, seeds = 0, threads = 0, bootstrap = 0, block = 0;
  std::vector<std::size_t> horizons;
  std::uint64_t seed = 0;
  double delta = 0.0, eta = 0.0, gamma = 0.0;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool rates) {
    app->add_option("config", config, "JSON config file (flags override its fields)");
    opts["game"] = app->add_option("--game", game, "Game JSON file");
    opts["variant"] = app->add_option("--variant", variant,
                                      "det-outcome | rand-outcome | rand-action-outcome | det-action-outcome");
    if (rates) {
      opts["horizons"] = app->add_option("--horizons", horizons, "Horizon list")->delimiter(',');
      opts["bootstrap"] = app->add_option("--bootstrap", bootstrap, "Bootstrap resamples (default 200)");
      opts["control"] = app->add_option("--control", control,
                                        "Fixed mixed action p1,...,pN played by a non-learning control");
    } else {
      opts["n"] = app->add_option("--n", n, "Horizon");
      opts["out"] = app->add_option("--out", out, "Output directory for transcripts and report.json");
      opts["format"] = app->add_option("--format", format, "Transcript format: csv (default) or json");
    }
    opts["seeds"] = app->add_option("--seeds", seeds, "Number of seeds");
    opts["seed"] = app->add_option("--seed", seed, "Base seed; seed k uses base + k (default $PM_SEED or 1)");
    opts["delta"] = app->add_option("--delta", delta, "Confidence level delta (default 0.05)");
    opts["eta"] = app->add_option("--eta", eta, "Learning-rate override");
    opts["block"] = app->add_option("--m", block, "Block-length override");
    opts["gamma"] = app->add_option("--gamma", gamma, "Exploration-rate override");
    opts["env"] = app->add_option("--env", env,
                                  "iid:q1,...,qM | cyclic:j1,... | best-response | switching[:period] "
                                  "(default iid uniform)");
    opts["oracle"] = app->add_option("--oracle", oracle, "Sub-gradient oracle: auto (default) or lp");
    opts["threads"] = app->add_option("--threads", threads, "Worker threads for the seed loop");
  }

  bool given(const char* name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  RunConfig resolve() const {
    RunConfig cfg;
    cfg.seed = default_seed();
    if (!config.empty()) load_config(config, cfg);
    if (given("game")) cfg.game_path = game;
    if (given("variant")) cfg.variant = variant;
    if (given("n")) cfg.horizons = {n};
    if (given("horizons")) cfg.horizons = horizons;
    if (given("seeds")) cfg.seeds = seeds;
    if (given("seed")) cfg.seed = seed;
    if (given("delta")) cfg.delta = delta;
    if (given("eta")) cfg.overrides.eta = eta;
    if (given("block")) cfg.overrides.block = block;
    if (given("gamma")) cfg.overrides.gamma = gamma;
    if (given("env")) cfg.environment = env;
    if (given("out")) cfg.output_dir = out;
    if (given("format")) cfg.format = format;
    if (given("oracle")) cfg.oracle = oracle;
    if (given("threads")) cfg.threads = threads;
    if (given("bootstrap")) cfg.bootstrap = bootstrap;
    if (given("control")) cfg.control = parse_doubles(control, "control");
    if (cfg.game_path.empty()) throw ConfigError("no game given (--game or config field 'game')");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (cfg.seeds == 0) throw ConfigError("seeds must be positive");
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
    if (cfg.oracle != "auto" && cfg.oracle != "lp") throw ConfigError("oracle must be auto or lp");
    return cfg;
  }
};

EnvironmentSpec environment_for(const RunConfig& cfg, const GameSpec& game) {
  if (cfg.environment.empty()) {
    return EnvironmentSpec::iid(std::vector<double>(game.n_outcomes(), 1.0 / static_cast<double>(game.n_outcomes())));
  }
  return EnvironmentSpec::parse(cfg.environment);
}

std::vector<std::size_t> curve_horizons(std::size_t n) {
  std::vector<std::size_t> h;
  for (std::size_t p = 10; p < n; p *= 10) h.push_back(p);
  h.push_back(n);
  return h;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << content;
}

int cmd_validate(const std::string& path, bool as_json, std::ostream& out) {
  const GameSpec game = load_game(path);
  const GameConstants c = compute_constants(game);
  const auto& k = game.feedback();
  const bool distinct = has_distinct_columns(game);
  const bool identified = signals_identify_classes(game);
  if (as_json) {
    out << dump({{"game", game.name()},
                 {"actions", game.n_actions()},
                 {"outcomes", game.n_outcomes()},
                 {"signals", game.n_signals()},
                 {"deterministic", k.is_deterministic()},
                 {"outcome_only", k.is_outcome_only()},
                 {"distinct_columns", distinct},
                 {"signals_identify_classes", identified},
                 {"constants", to_json(c)}});
    return kExitOk;
  }
  out << "game: " << game.name() << '\n'
      << "actions: " << game.n_actions() << '\n'
      << "outcomes: " << game.n_outcomes() << '\n'
      << "signals: " << game.n_signals() << '\n'
      << "feedback: " << (k.is_deterministic() ? "deterministic" : "stochastic") << ", "
      << (k.is_outcome_only() ? "outcome-only" : "action-dependent") << '\n';
  if (k.is_deterministic()) {
    out << "distinct columns: " << (distinct ? "yes" : "no (outcomes are grouped)") << '\n'
        << "signals identify outcome classes: " << (identified ? "yes" : "no") << '\n';
    if (distinct && identified) {
      out << "distinct, affinely independent columns => Hannan condition holds\n";
    } else if (!identified) {
      out << "rho(p, .) need not be linear on the feasible set; C is "
          << (c.C_bound ? "defined" : "undefined") << '\n';
    }
  }
  out << "K_bound: " << format_double(c.K_bound) << " (sampled " << format_double(c.K_sampled)
      << ", K_bound <= 1)\n"
      << "L_bound: " << format_double(c.L_bound) << '\n';
  if (c.L_component) out << "L_component: " << format_double(*c.L_component) << '\n';
  out << "lipschitz_lp_value: " << format_double(c.L_lp_value) << '\n';
  if (c.C_bound) {
    out << "C_bound: " << format_double(*c.C_bound) << '\n'
        << "C_magnitude: " << format_double(*c.C_magnitude) << '\n'
        << "C_l1: " << format_double(*c.C_l1) << '\n';
  }
  return kExitOk;
}

int cmd_constants(const std::string& path, std::ostream& out) {
  const GameSpec game = load_game(path);
  json j = to_json(compute_constants(game));
  j["game"] = game.name();
  out << dump(j);
  return kExitOk;
}

// All points of the (d-1)-simplex with coordinates k / (res - 1).
void simplex_grid(std::size_t d, std::size_t res, std::vector<std::vector<double>>& pts) {
  const std::size_t total = res - 1;
  std::vector<std::size_t> c(d, 0);
  const std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
    if (pos + 1 == d) {
      c[pos] = left;
      std::vector<double> p(d);
      for (std::size_t k = 0; k < d; ++k) p[k] = static_cast<double>(c[k]) / static_cast<double>(total);
      pts.push_back(std::move(p));
      return;
    }
    for (std::size_t v = left + 1; v-- > 0;) {
      c[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, total);
}

int cmd_rho_sweep(const std::string& path, const std::string& p_text, std::size_t grid,
                  std::ostream& out, std::ostream& err) {
  if (grid < 2) throw ConfigError("grid must be at least 2");
  const GameSpec game = load_game(path);
  std::optional<MixedAction> p;
  if (!p_text.empty()) {
    std::vector<double> v = parse_doubles(p_text, "p");
    if (v.size() != game.n_actions()) throw ConfigError("--p must have N entries");
    try {
      p.emplace(std::move(v));
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("--p: ") + e.what());
    }
  }
  const auto eval = [&](const SignalDistVector& d) {
    return p ? rho(game, *p, d) : max_rho(game, d).value;
  };
  const char* value_col = p ? "rho" : "max_rho";
  std::size_t skipped = 0;
  if (game.feedback().is_outcome_only()) {
    const std::size_t ns = game.n_signals();
    const bool one_d = ns == 2;
    if (one_d) {
      out << "delta_" << game.signals()[0];
    } else {
      for (std::size_t s = 0; s < ns; ++s) out << (s ? "," : "") << "delta_" << game.signals()[s];
    }
    out << ',' << value_col << '\n';
    std::vector<std::vector<double>> pts;
    if (one_d) {
      for (std::size_t k = grid; k-- > 0;) {
        const double a = static_cast<double>(grid - 1 - k) / static_cast<double>(grid - 1);
        pts.push_back({a, 1.0 - a});
      }
    } else {
      simplex_grid(ns, grid, pts);
    }
    for (const auto& comp : pts) {
      const SignalDistVector d = SignalDistVector::replicated(game.n_actions(), comp);
      if (!is_feasible(game, d)) {
        ++skipped;
        continue;
      }
      if (one_d) {
        out << format_double(comp[0]);
      } else {
        for (std::size_t s = 0; s < ns; ++s) out << (s ? "," : "") << format_double(comp[s]);
      }
      out << ',' << format_double(eval(d)) << '\n';
    }
  } else {
    const std::size_t m = game.n_outcomes();
    for (std::size_t j = 0; j < m; ++j) out << (j ? "," : "") << "q_" << j;
    out << ',' << value_col << '\n';
    std::vector<std::vector<double>> pts;
    simplex_grid(m, grid, pts);
    for (const auto& q : pts) {
      const SignalDistVector d = signal_dist(game, OutcomeDistribution(q));
      for (std::size_t j = 0; j < m; ++j) out << (j ? "," : "") << format_double(q[j]);
      out << ',' << format_double(eval(d)) << '\n';
    }
  }
  err << "skipped " << skipped << " grid points outside the feasible set\n";
  return kExitOk;
}

ForecasterParams params_for(const RunConfig& cfg, const GameSpec& game, const GameConstants& c,
                            std::size_t n) {
  ForecasterParams p = ForecasterParams::defaults(parse_variant(cfg.variant), n, game, c, cfg.overrides);
  p.oracle = cfg.oracle == "lp" ? SubgradientOracle::kLp : SubgradientOracle::kAuto;
  return p;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.variant.empty()) throw ConfigError("no variant given (--variant or config field 'variant')");
  if (cfg.horizons.size() != 1 || cfg.horizons[0] == 0) {
    throw ConfigError("simulate needs one positive horizon (--n or config field 'horizon')");
  }
  const GameSpec game = load_game(cfg.game_path);
  const Variant variant = parse_variant(cfg.variant);
  check_compatible(variant, game);
  const GameConstants constants = compute_constants(game);
  const std::size_t n = cfg.horizons[0];
  const ForecasterParams params = params_for(cfg, game, constants, n);
  const EnvironmentSpec env = environment_for(cfg, game);
  env.instantiate(game, n);

  const bool write = !cfg.output_dir.empty();
  if (write) fs::create_directories(cfg.output_dir);
  EpisodeOptions eo;
  eo.record_rounds = write || is_blocked(variant);

  std::vector<json> runs(cfg.seeds);
  std::vector<double> regrets(cfg.seeds);
  parallel_for(cfg.seeds, cfg.threads, [&](std::size_t k) {
    const std::uint64_t seed = cfg.seed + k;
    try {
      const Transcript tr = run_episode(game, constants, params, env, seed, eo);
      const RegretReport rep = regret(game, tr, &constants, cfg.delta);
      json run{{"seed", seed},
               {"regret", round12(rep.regret)},
               {"benchmark", round12(rep.benchmark)},
               {"average_reward", round12(rep.average_reward)},
               {"average_expected_reward", round12(rep.average_expected_reward)},
               {"updates", tr.updates},
               {"within_bound", rep.regret <= rep.bound->total}};
      if (is_blocked(variant)) {
        const EstimatorDiagnostics d = estimator_diagnostics(game, tr, cfg.delta);
        run["block_violation_fraction"] = round12(d.violation_fraction);
      }
      if (write) {
        const fs::path base = fs::path(cfg.output_dir) / ("transcript_seed" + std::to_string(seed));
        json meta = transcript_metadata(tr);
        meta["regret"] = to_json(rep);
        if (cfg.format == "csv") {
          std::ostringstream csv;
          write_transcript_csv(tr, csv);
          write_file(base.string() + ".csv", csv.str());
        } else {
          json rounds = json::array();
          for (std::size_t t = 0; t < tr.actions.size(); ++t) {
            rounds.push_back({t + 1, tr.actions[t], tr.outcomes[t], tr.signals[t], round12(tr.rewards[t])});
          }
          meta["columns"] = json::array({"t", "I", "J", "s", "reward"});
          meta["rounds"] = rounds;
        }
        write_file(base.string() + ".json", dump(meta));
      }
      runs[k] = std::move(run);
      regrets[k] = rep.regret;
    } catch (const std::exception& e) {
      throw Error("seed " + std::to_string(seed) + ": " + e.what());
    }
  });

  json curve = json::array();
  for (std::size_t h : curve_horizons(n)) {
    const ForecasterParams ph = params_for(cfg, game, constants, h);
    curve.push_back({{"horizon", h}, {"bound", round12(theoretical_bound(ph, game, constants, cfg.delta).total)}});
  }
  std::size_t within = 0;
  for (const auto& r : runs) within += r["within_bound"].get<bool>() ? 1 : 0;
  json report{{"command", "simulate"},
              {"inputs", config_json(cfg)},
              {"game", game.name()},
              {"environment", env.to_string()},
              {"constants", to_json(constants)},
              {"params", to_json(params)},
              {"bound", to_json(theoretical_bound(params, game, constants, cfg.delta))},
              {"bound_curve", curve},
              {"regret_quantiles", quantiles(regrets)},
              {"median_regret", round12(quantile(regrets, 0.5))},
              {"fraction_within_bound", round12(static_cast<double>(within) / static_cast<double>(runs.size()))},
              {"runs", runs}};
  const std::string text = dump(report);
  if (write) write_file(fs::path(cfg.output_dir) / "report.json", text);
  out << text;
  return kExitOk;
}

int cmd_rates(const RunConfig& cfg, std::ostream& out) {
  const GameSpec game = load_game(cfg.game_path);
  const EnvironmentSpec env = environment_for(cfg, game);
  RateOptions opt;
  opt.horizons = cfg.horizons;
  opt.seeds = cfg.seeds;
  opt.delta = cfg.delta;
  opt.base_seed = cfg.seed;
  opt.bootstrap = cfg.bootstrap;
  opt.overrides = cfg.overrides;
  opt.threads = cfg.threads;
  RateReport report;
  if (cfg.control) {
    MixedAction p = [&] {
      try {
        return MixedAction(*cfg.control);
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("control: ") + e.what());
      }
    }();
    if (p.size() != game.n_actions()) throw ConfigError("control must have N entries");
    const ForecasterFactory factory = [&](std::size_t) { return std::make_unique<FixedForecaster>(p); };
    report = rate_experiment(game, factory, "fixed", 0.0, env, opt);
  } else {
    if (cfg.variant.empty()) throw ConfigError("no variant given (--variant or config field 'variant')");
    if (cfg.oracle == "lp") {
      const Variant v = parse_variant(cfg.variant);
      check_compatible(v, game);
      const GameConstants c = compute_constants(game);
      const ForecasterFactory factory = [&](std::size_t n) {
        return make_forecaster(game, c, params_for(cfg, game, c, n));
      };
      report = rate_experiment(game, factory, to_string(v), target_exponent(v), env, opt);
    } else {
      report = rate_experiment(game, compute_constants(game), parse_variant(cfg.variant), env, opt);
    }
  }
  json j{{"command", "rates"}, {"inputs", config_json(cfg)}, {"report", to_json(report)}};
  j["inputs"]["bootstrap"] = cfg.bootstrap;
  out << dump(j);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Forecasting under partial monitoring: rho oracle, forecasters and regret experiments"};
  app.name("pmforecast");
  app.require_subcommand(1);
  app.set_version_flag("--version", "pmforecast 0.1.0");
  app.footer(
      "Exit codes: 0 success, 1 usage/validation/config error, 2 runtime error.\n"
      "PM_SEED sets the default base seed.");

  std::string game_path;
  bool validate_json = false;
  auto* validate = app.add_subcommand("validate", "Parse a game and print its classification and constants");
  validate->add_option("game", game_path, "Game JSON file")->required();
  validate->add_flag("--json", validate_json, "Print the report as JSON");

  auto* constants = app.add_subcommand("constants", "Print the game constants K, L and C as JSON");
  constants->add_option("game", game_path, "Game JSON file")->required();

  std::string sweep_p;
  std::size_t sweep_grid = 101;
  auto* sweep = app.add_subcommand("rho-sweep", "Tabulate max_p rho (or rho at a fixed p) over signal space");
  sweep->add_option("game", game_path, "Game JSON file")->required();
  sweep->add_option("--p", sweep_p, "Fixed mixed action p1,...,pN (default: maximise over p)");
  sweep->add_option("--grid", sweep_grid, "Grid points per axis (default 101)");
  sweep->footer(
      "CSV columns: outcome-only games with two signals: delta_<first signal>, value; other "
      "outcome-only games: delta_<s> for every signal, value; action-dependent games: q_0..q_{M-1}, "
      "value (the sweep runs over H(., q)). value is max_rho, or rho with --p.");

  RunFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Run episodes and report the regret against its bound");
  sim_flags.add(simulate, false);
  simulate->footer(
      "Transcript CSV columns: t (1-based round), I (action), J (outcome), s (signal), reward; "
      "indices are 0-based. Each transcript has a JSON sidecar with metadata.");

  RunFlags rate_flags;
  auto* rates = app.add_subcommand("rates", "Fit the log-log slope of median regret against the horizon");
  rate_flags.add(rates, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(game_path, validate_json, out);
    if (constants->parsed()) return cmd_constants(game_path, out);
    if (sweep->parsed()) return cmd_rho_sweep(game_path, sweep_p, sweep_grid, out, err);
    if (simulate->parsed()) return cmd_simulate(sim_flags.resolve(), out);
    if (rates->parsed()) return cmd_rates(rate_flags.resolve(), out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace pmf::cli
