#include "pmf/game.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pmf {

namespace detail {

std::vector<double> validate_simplex(std::vector<double> probs,
                                     std::string_view what) {
  if (probs.empty()) {
    throw ValidationError(std::string(what) + ": empty probability vector");
  }
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < -kSimplexTolerance) {
      throw ValidationError(std::string(what) + ": negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << what << ": entries sum to " << sum << ", not 1";
    throw ValidationError(msg.str());
  }
  for (double& v : probs) v = v < 0.0 ? 0.0 : v / sum;
  return probs;
}

}  // namespace detail

FeedbackKernel::FeedbackKernel(std::size_t n_actions, std::size_t n_outcomes,
                               std::size_t n_signals, std::vector<double> table)
    : n_actions_(n_actions),
      n_outcomes_(n_outcomes),
      n_signals_(n_signals),
      table_(std::move(table)) {
  if (n_actions_ == 0 || n_outcomes_ == 0 || n_signals_ == 0) {
    throw ValidationError("feedback kernel: empty dimension");
  }
  if (table_.size() != n_actions_ * n_outcomes_ * n_signals_) {
    throw ValidationError("feedback kernel: table size does not match N x M x S");
  }
  deterministic_ = true;
  point_signal_.assign(n_actions_ * n_outcomes_, 0);
  for (std::size_t i = 0; i < n_actions_; ++i) {
    for (std::size_t j = 0; j < n_outcomes_; ++j) {
      double* cell = table_.data() + (i * n_outcomes_ + j) * n_signals_;
      std::vector<double> probs(cell, cell + n_signals_);
      try {
        probs = detail::validate_simplex(std::move(probs), "feedback cell");
      } catch (const ValidationError&) {
        std::ostringstream msg;
        msg << "feedback.table cell (action " << i << ", outcome " << j
            << "): row not summing to 1";
        throw ValidationError(msg.str());
      }
      bool point = false;
      for (std::size_t s = 0; s < n_signals_; ++s) {
        if (probs[s] >= 1.0 - kSimplexTolerance) {
          point = true;
          point_signal_[i * n_outcomes_ + j] = static_cast<std::uint32_t>(s);
        }
      }
      if (point) {
        std::fill(probs.begin(), probs.end(), 0.0);
        probs[point_signal_[i * n_outcomes_ + j]] = 1.0;
      } else {
        deterministic_ = false;
      }
      std::copy(probs.begin(), probs.end(), cell);
    }
  }
  outcome_only_ = true;
  const std::size_t row = n_outcomes_ * n_signals_;
  for (std::size_t i = 1; i < n_actions_ && outcome_only_; ++i) {
    outcome_only_ = std::equal(table_.begin(), table_.begin() + row,
                               table_.begin() + i * row);
  }
}

SignalDistVector::SignalDistVector(std::size_t n_components,
                                   std::size_t n_signals,
                                   std::vector<double> flat)
    : n_components_(n_components), n_signals_(n_signals), flat_(std::move(flat)) {
  if (flat_.size() != n_components_ * n_signals_) {
    throw ValidationError("signal distribution vector: dimension mismatch");
  }
  for (std::size_t i = 0; i < n_components_; ++i) {
    double sum = 0.0;
    for (std::size_t s = 0; s < n_signals_; ++s) {
      const double v = flat_[i * n_signals_ + s];
      if (!std::isfinite(v) || v < -kSimplexTolerance) {
        throw ValidationError("signal distribution vector: negative entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
      throw ValidationError(
          "signal distribution vector: component not summing to 1");
    }
  }
}

SignalDistVector SignalDistVector::replicated(std::size_t n_components,
                                              std::span<const double> component) {
  std::vector<double> flat;
  flat.reserve(n_components * component.size());
  for (std::size_t i = 0; i < n_components; ++i) {
    flat.insert(flat.end(), component.begin(), component.end());
  }
  return SignalDistVector(n_components, component.size(), std::move(flat));
}

GameSpec::GameSpec(std::string name, std::vector<std::string> signals,
                   std::size_t n_actions, std::size_t n_outcomes,
                   std::vector<double> rewards, FeedbackKernel feedback)
    : name_(std::move(name)),
      signals_(std::move(signals)),
      n_actions_(n_actions),
      n_outcomes_(n_outcomes),
      rewards_(std::move(rewards)),
      feedback_(std::move(feedback)) {
  if (n_actions_ == 0 || n_outcomes_ == 0) {
    throw ValidationError("game: N and M must be positive");
  }
  if (signals_.empty()) throw ValidationError("game: empty signal list");
  std::set<std::string> seen;
  for (const auto& s : signals_) {
    if (!seen.insert(s).second) {
      throw ValidationError("game: duplicate signal name '" + s + "'");
    }
  }
  if (rewards_.size() != n_actions_ * n_outcomes_) {
    throw ValidationError("game: rewards matrix is not N x M");
  }
  for (std::size_t k = 0; k < rewards_.size(); ++k) {
    const double r = rewards_[k];
    if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
      std::ostringstream msg;
      msg << "rewards[" << k / n_outcomes_ << "][" << k % n_outcomes_
          << "]: reward out of [0,1]";
      throw ValidationError(msg.str());
    }
  }
  if (feedback_.n_actions() != n_actions_ || feedback_.n_outcomes() != n_outcomes_ ||
      feedback_.n_signals() != signals_.size()) {
    throw ValidationError("game: feedback table dimension mismatch");
  }
}

double GameSpec::reward(std::span<const double> p, std::size_t j) const {
  double v = 0.0;
  for (std::size_t i = 0; i < n_actions_; ++i) v += p[i] * reward(i, j);
  return v;
}

std::vector<double> GameSpec::reward_column(std::size_t j) const {
  std::vector<double> col(n_actions_);
  for (std::size_t i = 0; i < n_actions_; ++i) col[i] = reward(i, j);
  return col;
}

std::vector<double> GameSpec::feedback_column(std::size_t j) const {
  const std::size_t S = n_signals();
  std::vector<double> col(n_actions_ * S);
  for (std::size_t i = 0; i < n_actions_; ++i) {
    auto cell = feedback_.cell(i, j);
    std::copy(cell.begin(), cell.end(), col.begin() + i * S);
  }
  return col;
}

std::size_t GameSpec::signal_index(std::string_view name) const {
  for (std::size_t s = 0; s < signals_.size(); ++s) {
    if (signals_[s] == name) return s;
  }
  throw ValidationError("unknown signal name '" + std::string(name) + "'");
}

namespace {

using nlohmann::json;

// Line and column of a byte offset, for parse diagnostics.
std::string locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::size_t signal_by_name(const json& v, const std::vector<std::string>& signals,
                           const std::string& path) {
  if (!v.is_string()) fail(path, "expected a signal name");
  const auto name = v.get<std::string>();
  for (std::size_t s = 0; s < signals.size(); ++s) {
    if (signals[s] == name) return s;
  }
  fail(path, "unknown signal name '" + name + "'");
}

// A stochastic cell: an array of |S| probabilities or an object keyed by
// signal name (missing names have probability zero).
std::vector<double> stochastic_cell(const json& v,
                                    const std::vector<std::string>& signals,
                                    const std::string& path) {
  std::vector<double> cell(signals.size(), 0.0);
  if (v.is_array()) {
    if (v.size() != signals.size()) fail(path, "dimension mismatch: expected |S| probabilities");
    for (std::size_t s = 0; s < signals.size(); ++s) {
      cell[s] = number(v[s], path + "[" + std::to_string(s) + "]");
    }
  } else if (v.is_object()) {
    for (const auto& [key, prob] : v.items()) {
      const std::size_t s = signal_by_name(json(key), signals, path);
      cell[s] = number(prob, path + "." + key);
    }
  } else {
    fail(path, "expected a probability vector");
  }
  double sum = 0.0;
  for (double p : cell) {
    if (p < -kSimplexTolerance) fail(path, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) fail(path, "row not summing to 1");
  return cell;
}

const json& array_of(const json& v, std::size_t n, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  if (v.size() != n) {
    fail(path, "dimension mismatch: expected " + std::to_string(n) +
                   " entries, found " + std::to_string(v.size()));
  }
  return v;
}

}  // namespace

GameSpec parse_game(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed document at " + locate(text, e.byte) + ": " +
                          e.what());
  }
  if (!doc.is_object()) fail("$", "expected a JSON object");

  std::string name = "game";
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) fail("name", "expected a string");
    name = it->get<std::string>();
  }

  const json& jsignals = member(doc, "signals", "$");
  if (!jsignals.is_array() || jsignals.empty()) fail("signals", "expected a non-empty array");
  std::vector<std::string> signals;
  for (std::size_t s = 0; s < jsignals.size(); ++s) {
    if (!jsignals[s].is_string()) fail("signals[" + std::to_string(s) + "]", "expected a string");
    signals.push_back(jsignals[s].get<std::string>());
  }

  const json& jrewards = member(doc, "rewards", "$");
  if (!jrewards.is_array() || jrewards.empty()) fail("rewards", "expected a non-empty matrix");
  const std::size_t N = jrewards.size();
  if (!jrewards[0].is_array() || jrewards[0].empty()) fail("rewards[0]", "expected a non-empty row");
  const std::size_t M = jrewards[0].size();
  std::vector<double> rewards(N * M);
  for (std::size_t i = 0; i < N; ++i) {
    const std::string row_path = "rewards[" + std::to_string(i) + "]";
    const json& row = array_of(jrewards[i], M, row_path);
    for (std::size_t j = 0; j < M; ++j) {
      const std::string cell_path = row_path + "[" + std::to_string(j) + "]";
      const double r = number(row[j], cell_path);
      if (r < 0.0 || r > 1.0) fail(cell_path, "reward out of [0,1]");
      rewards[i * M + j] = r;
    }
  }

  const json& jfeedback = member(doc, "feedback", "$");
  if (!jfeedback.is_object()) fail("feedback", "expected an object");
  const json& jtype = member(jfeedback, "type", "feedback");
  if (!jtype.is_string()) fail("feedback.type", "expected a string");
  const auto type = jtype.get<std::string>();
  if (type != "deterministic" && type != "stochastic") {
    fail("feedback.type", "expected \"deterministic\" or \"stochastic\"");
  }
  bool outcome_only = false;
  if (auto it = jfeedback.find("outcome_only"); it != jfeedback.end()) {
    if (!it->is_boolean()) fail("feedback.outcome_only", "expected a boolean");
    outcome_only = it->get<bool>();
  }
  const json& jtable = member(jfeedback, "table", "feedback");
  const std::size_t S = signals.size();
  std::vector<double> table(N * M * S, 0.0);

  // Cell (i, j) of the expanded tensor from the compact or full form.
  auto put = [&](std::size_t i, std::size_t j, const std::vector<double>& cell) {
    std::copy(cell.begin(), cell.end(), table.begin() + (i * M + j) * S);
  };
  auto parse_cell = [&](const json& v, const std::string& path) {
    if (type == "deterministic") {
      std::vector<double> cell(S, 0.0);
      cell[signal_by_name(v, signals, path)] = 1.0;
      return cell;
    }
    return stochastic_cell(v, signals, path);
  };

  if (outcome_only) {
    const json& cols = array_of(jtable, M, "feedback.table");
    for (std::size_t j = 0; j < M; ++j) {
      const auto cell = parse_cell(cols[j], "feedback.table[" + std::to_string(j) + "]");
      for (std::size_t i = 0; i < N; ++i) put(i, j, cell);
    }
  } else {
    const json& rows = array_of(jtable, N, "feedback.table");
    for (std::size_t i = 0; i < N; ++i) {
      const std::string row_path = "feedback.table[" + std::to_string(i) + "]";
      const json& row = array_of(rows[i], M, row_path);
      for (std::size_t j = 0; j < M; ++j) {
        put(i, j, parse_cell(row[j], row_path + "[" + std::to_string(j) + "]"));
      }
    }
  }

  FeedbackKernel kernel(N, M, S, std::move(table));
  return GameSpec(std::move(name), std::move(signals), N, M, std::move(rewards),
                  std::move(kernel));
}

GameSpec load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open game file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_game(buffer.str());
}

SignalDistVector signal_dist(const GameSpec& game, const OutcomeDistribution& q) {
  const std::size_t N = game.n_actions();
  const std::size_t M = game.n_outcomes();
  const std::size_t S = game.n_signals();
  if (q.size() != M) throw ValidationError("signal_dist: q has wrong dimension");
  const auto& H = game.feedback();
  const std::size_t rows = H.is_outcome_only() ? 1 : N;
  std::vector<double> flat(N * S, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      if (q[j] == 0.0) continue;
      auto cell = H.cell(i, j);
      for (std::size_t s = 0; s < S; ++s) flat[i * S + s] += q[j] * cell[s];
    }
  }
  if (H.is_outcome_only()) {
    for (std::size_t i = 1; i < N; ++i) {
      std::copy(flat.begin(), flat.begin() + S, flat.begin() + i * S);
    }
  }
  return SignalDistVector(N, S, std::move(flat));
}

SignalDistVector signal_column(const GameSpec& game, std::size_t j) {
  return SignalDistVector(game.n_actions(), game.n_signals(), game.feedback_column(j));
}

std::size_t draw_signal(const GameSpec& game, std::size_t i, std::size_t j, Rng& rng) {
  const auto& H = game.feedback();
  if (H.is_deterministic()) return H.signal_of(i, j);
  return rng.categorical(H.cell(i, j));
}

bool has_distinct_columns(const GameSpec& game) {
  const std::size_t M = game.n_outcomes();
  for (std::size_t j = 0; j < M; ++j) {
    const auto a = game.feedback_column(j);
    for (std::size_t k = j + 1; k < M; ++k) {
      if (a == game.feedback_column(k)) return false;
    }
  }
  return true;
}

}  // namespace pmf
