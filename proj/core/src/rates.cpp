#include "cayley/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace cayley {

std::string transition_key(int from_pair, int to_pair) {
  std::string key;
  key += static_cast<char>('0' + pair_left(to_pair));
  key += static_cast<char>('0' + pair_right(to_pair));
  key += "<-";
  key += static_cast<char>('0' + pair_left(from_pair));
  key += static_cast<char>('0' + pair_right(from_pair));
  return key;
}

std::pair<int, int> parse_transition_key(const std::string& key) {
  auto bad = [&](const char* why) {
    throw std::invalid_argument("bad transition key \"" + key + "\": " + why);
  };
  if (key.size() != 6 || key[2] != '<' || key[3] != '-') bad("expected \"lk<-nm\"");
  int digits[4];
  const int pos[4] = {0, 1, 4, 5};
  for (int d = 0; d < 4; ++d) {
    const char c = key[pos[d]];
    if (c != '0' && c != '1') bad("states must be 0 or 1");
    digits[d] = c - '0';
  }
  const int to = pair_state(digits[0], digits[1]);
  const int from = pair_state(digits[2], digits[3]);
  if (to == from) bad("diagonal transition");
  return {from, to};
}

double RateModel::exit_rate(int from_pair) const {
  double total = 0.0;
  for (int to = 0; to < kNumPairStates; ++to) {
    if (to != from_pair) total += rates[from_pair][to];
  }
  return total;
}

RateModel diffusion_model(int xi, double hop_rate) {
  RateModel m;
  m.xi = xi;
  m.set_rate(1, 0, 0, 1, hop_rate);
  m.set_rate(0, 1, 1, 0, hop_rate);
  return m;
}

RateModel annihilation_creation_model(int xi, double rate) {
  RateModel m;
  m.xi = xi;
  m.set_rate(1, 1, 0, 0, rate);
  m.set_rate(0, 0, 1, 1, rate);
  return m;
}

SymmetryReport validate_symmetry(const RateModel& model) {
  SymmetryReport report;
  if (model.xi < 2) report.problems.push_back("coordination number must be >= 2");
  for (int from = 0; from < kNumPairStates; ++from) {
    for (int to = 0; to < kNumPairStates; ++to) {
      if (from == to) continue;
      const double r = model.rates[from][to];
      if (r < 0.0 || std::isnan(r)) {
        report.problems.push_back("negative rate at " + transition_key(from, to));
        continue;
      }
      const int mfrom = pair_mirror(from);
      const int mto = pair_mirror(to);
      // Each unordered pair reported once.
      if (std::make_pair(from, to) < std::make_pair(mfrom, mto) &&
          r != model.rates[mfrom][mto]) {
        report.problems.push_back("symmetry violation: " + transition_key(from, to) + " = " +
                                  std::to_string(r) + " but " + transition_key(mfrom, mto) +
                                  " = " + std::to_string(model.rates[mfrom][mto]));
      }
    }
  }
  return report;
}

AutonomyCheck check_autonomy(const RateModel& model) {
  // Coefficient of the two-point function in the per-link density balance.
  const double lhs = model.rate(1, 1, 0, 0) + model.rate(0, 1, 1, 1) + model.rate(1, 1, 0, 1);
  const double rhs = model.rate(0, 0, 1, 1) + model.rate(1, 0, 0, 0) + model.rate(0, 0, 1, 0);
  return AutonomyCheck{lhs - rhs};
}

Coefficients derive_coefficients(const RateModel& model) {
  Coefficients c;
  c.xi = model.xi;
  c.alpha = model.rate(0, 0, 1, 1) + model.rate(0, 0, 1, 0);
  c.beta = model.rate(1, 0, 0, 1) + model.rate(1, 0, 1, 1) - c.alpha;
  c.gamma = model.rate(1, 0, 0, 1) + model.rate(0, 1, 0, 0) + c.alpha;
  c.eta = 0.5 * std::log(static_cast<double>(model.xi - 1));

  // Implied by rate nonnegativity plus autonomy; a failure means bad input.
  if (!(c.alpha >= 0.0) || !(c.beta >= -c.alpha) || !(c.gamma >= c.alpha) ||
      !(c.gamma >= c.alpha + c.beta)) {
    throw std::invalid_argument(
        "derived coefficients violate the nonnegativity constraints; "
        "check rates for symmetry/autonomy first");
  }
  if (c.gamma == c.beta) {
    c.stationary = std::nullopt;  // conserved total density
  } else {
    c.stationary = c.alpha / (c.gamma - c.beta);
  }
  return c;
}

}  // namespace cayley
