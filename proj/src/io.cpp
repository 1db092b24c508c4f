#include "pmf/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace pmf {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_double(v).c_str(), nullptr);
}

namespace {

json number(double v) {
  if (!std::isfinite(v)) return v > 0 ? json("inf") : (v < 0 ? json("-inf") : json("nan"));
  return round12(v);
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

template <typename T>
json optional_number(const std::optional<T>& v) {
  return v ? number(*v) : json(nullptr);
}

}  // namespace

void write_transcript_csv(const Transcript& t, std::ostream& out) {
  out << kTranscriptCsvHeader << '\n';
  for (std::size_t k = 0; k < t.actions.size(); ++k) {
    out << (k + 1) << ',' << t.actions[k] << ',' << t.outcomes[k] << ',' << t.signals[k] << ','
        << format_double(t.rewards[k]) << '\n';
  }
}

json to_json(const GameConstants& c) {
  return json{{"K_bound", number(c.K_bound)},
              {"K_sampled", number(c.K_sampled)},
              {"L_bound", number(c.L_bound)},
              {"L_component", optional_number(c.L_component)},
              {"lipschitz_lp_value", number(c.L_lp_value)},
              {"C_bound", optional_number(c.C_bound)},
              {"C_magnitude", optional_number(c.C_magnitude)},
              {"C_l1", optional_number(c.C_l1)}};
}

json to_json(const ForecasterParams& p) {
  json j{{"variant", to_string(p.variant)},
         {"horizon", p.horizon},
         {"eta", number(p.eta)},
         {"k_scale", number(p.k_scale)},
         {"oracle", p.oracle == SubgradientOracle::kLp ? "lp" : "auto"}};
  j["block"] = is_blocked(p.variant) ? json(p.block) : json(nullptr);
  j["gamma"] = is_mixed(p.variant) ? number(p.gamma) : json(nullptr);
  return j;
}

json to_json(const BoundReport& b) {
  json terms = json::object();
  for (const auto& t : b.terms) terms[t.name] = number(t.value);
  return json{{"total", number(b.total)}, {"terms", terms}};
}

json to_json(const RegretReport& r) {
  json j{{"benchmark", number(r.benchmark)},
         {"benchmark_argmax", numbers(r.benchmark_argmax)},
         {"average_reward", number(r.average_reward)},
         {"average_expected_reward", number(r.average_expected_reward)},
         {"regret", number(r.regret)},
         {"delta", number(r.delta)}};
  j["bound"] = r.bound ? to_json(*r.bound) : json(nullptr);
  return j;
}

json to_json(const EstimatorDiagnostics& d) {
  json blocks = json::array();
  for (const auto& b : d.blocks) {
    blocks.push_back({{"block", b.block},
                      {"raw_error", number(b.raw_error)},
                      {"projected_error", number(b.projected_error)}});
  }
  return json{{"bound", number(d.bound)},
              {"violations", d.violations},
              {"violation_fraction", number(d.violation_fraction)},
              {"blocks", blocks}};
}

json to_json(const RateReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"horizon", p.horizon},
                      {"median_regret", number(p.median_regret)},
                      {"bound", number(p.bound)},
                      {"regrets", numbers(p.regrets)}});
  }
  return json{{"forecaster", r.forecaster},
              {"environment", r.environment},
              {"slope", number(r.slope)},
              {"ci_low", number(r.ci_low)},
              {"ci_high", number(r.ci_high)},
              {"target", number(r.target)},
              {"points", points}};
}

json transcript_metadata(const Transcript& t) {
  json counts = json::array();
  for (std::size_t c : t.outcome_counts) counts.push_back(c);
  json blocks = json::array();
  for (const auto& b : t.blocks) {
    blocks.push_back({{"block", b.block},
                      {"raw_mean", numbers(b.raw_mean)},
                      {"projected", numbers(b.projected)},
                      {"distance", number(b.distance)}});
  }
  json j{{"game", t.game},
         {"forecaster", t.forecaster},
         {"environment", t.environment},
         {"seed", t.seed},
         {"horizon", t.horizon},
         {"outcome_counts", counts},
         {"total_reward", number(t.total_reward)},
         {"total_expected_reward", number(t.total_expected_reward)},
         {"updates", t.updates},
         {"max_subgradient_norm", number(t.max_subgradient_norm)},
         {"blocks", blocks}};
  j["params"] = t.params ? to_json(*t.params) : json(nullptr);
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace pmf
