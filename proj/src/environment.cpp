#include "pmf/environment.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pmf {

namespace {

class IidEnvironment final : public Environment {
 public:
  explicit IidEnvironment(OutcomeDistribution q) : q_(std::move(q)) {}
  std::size_t next_outcome(Rng& rng) override { return rng.categorical(q_.probs()); }
  std::string describe() const override { return "iid"; }

 private:
  OutcomeDistribution q_;
};

class CyclicEnvironment final : public Environment {
 public:
  explicit CyclicEnvironment(std::vector<std::size_t> seq) : seq_(std::move(seq)) {}
  std::size_t next_outcome(Rng&) override {
    const std::size_t j = seq_[pos_];
    pos_ = (pos_ + 1) % seq_.size();
    return j;
  }
  std::string describe() const override { return "cyclic"; }

 private:
  std::vector<std::size_t> seq_;
  std::size_t pos_ = 0;
};

class BestResponseEnvironment final : public Environment {
 public:
  explicit BestResponseEnvironment(const GameSpec& game)
      : game_(game), counts_(game.n_actions(), 0.0) {}

  std::size_t next_outcome(Rng&) override {
    std::vector<double> p(counts_.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = total_ > 0.0 ? counts_[i] / total_ : 1.0 / static_cast<double>(p.size());
    }
    std::size_t best = 0;
    double best_r = game_.reward(p, 0);
    for (std::size_t j = 1; j < game_.n_outcomes(); ++j) {
      const double r = game_.reward(p, j);
      if (r < best_r) {
        best_r = r;
        best = j;
      }
    }
    return best;
  }
  void observe_action(std::size_t action) override {
    counts_.at(action) += 1.0;
    total_ += 1.0;
  }
  std::string describe() const override { return "best-response"; }

 private:
  const GameSpec& game_;
  std::vector<double> counts_;
  double total_ = 0.0;
};

class SwitchingEnvironment final : public Environment {
 public:
  SwitchingEnvironment(std::size_t m, std::size_t period) : m_(m), period_(period) {}
  std::size_t next_outcome(Rng&) override { return (t_++ / period_) % m_; }
  std::string describe() const override { return "switching"; }

 private:
  std::size_t m_;
  std::size_t period_;
  std::size_t t_ = 0;
};

template <typename T>
std::vector<T> parse_list(std::string_view body, std::string_view what) {
  std::vector<T> out;
  std::string item;
  std::istringstream in{std::string(body)};
  while (std::getline(in, item, ',')) {
    std::istringstream cell(item);
    T v{};
    cell >> v;
    if (cell.fail() || !(cell >> std::ws).eof()) {
      throw ConfigError("environment: cannot parse " + std::string(what) + " entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("environment: empty " + std::string(what));
  return out;
}

}  // namespace

EnvironmentSpec EnvironmentSpec::iid(std::vector<double> q) {
  EnvironmentSpec s;
  s.kind = Kind::kIid;
  s.q = std::move(q);
  return s;
}

EnvironmentSpec EnvironmentSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  EnvironmentSpec s;
  if (head == "iid") {
    s.kind = Kind::kIid;
    s.q = parse_list<double>(body, "probability");
  } else if (head == "cyclic") {
    s.kind = Kind::kCyclic;
    s.sequence = parse_list<std::size_t>(body, "outcome");
  } else if (head == "best-response") {
    if (!body.empty()) throw ConfigError("environment: best-response takes no parameters");
    s.kind = Kind::kBestResponse;
  } else if (head == "switching") {
    s.kind = Kind::kSwitching;
    if (!body.empty()) {
      s.period = parse_list<std::size_t>(body, "period").front();
      if (s.period == 0) throw ConfigError("environment: switching period must be positive");
    }
  } else {
    throw ConfigError("unknown environment '" + std::string(text) + "'");
  }
  return s;
}

std::string EnvironmentSpec::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::kIid: {
      out << "iid:";
      for (std::size_t k = 0; k < q.size(); ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", q[k]);
        out << (k ? "," : "") << buf;
      }
      break;
    }
    case Kind::kCyclic:
      out << "cyclic:";
      for (std::size_t k = 0; k < sequence.size(); ++k) out << (k ? "," : "") << sequence[k];
      break;
    case Kind::kBestResponse:
      out << "best-response";
      break;
    case Kind::kSwitching:
      out << "switching";
      if (period > 0) out << ':' << period;
      break;
  }
  return out.str();
}

std::unique_ptr<Environment> EnvironmentSpec::instantiate(const GameSpec& game,
                                                          std::size_t horizon) const {
  const std::size_t m = game.n_outcomes();
  switch (kind) {
    case Kind::kIid:
      if (q.size() != m) throw ConfigError("environment: iid distribution has wrong length");
      try {
        return std::make_unique<IidEnvironment>(OutcomeDistribution(q));
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("environment: ") + e.what());
      }
    case Kind::kCyclic:
      for (std::size_t j : sequence) {
        if (j >= m) throw ConfigError("environment: cyclic outcome index out of range");
      }
      return std::make_unique<CyclicEnvironment>(sequence);
    case Kind::kBestResponse:
      return std::make_unique<BestResponseEnvironment>(game);
    case Kind::kSwitching: {
      const std::size_t p = period > 0 ? period
                                       : static_cast<std::size_t>(std::ceil(
                                             std::sqrt(static_cast<double>(std::max<std::size_t>(horizon, 1)))));
      return std::make_unique<SwitchingEnvironment>(m, p);
    }
  }
  throw ConfigError("unknown environment kind");
}

}  // namespace pmf
