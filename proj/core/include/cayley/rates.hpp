#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cayley {

// Site states: 0 = vacant, 1 = occupied. A joint state of an ordered pair of
// neighboring sites is encoded as 2*left + right, giving the four pair states
// 00, 01, 10, 11 -> 0, 1, 2, 3.
inline constexpr int kNumPairStates = 4;

constexpr int pair_state(int left, int right) { return 2 * left + right; }
constexpr int pair_left(int p) { return p >> 1; }
constexpr int pair_right(int p) { return p & 1; }

// Mirror of pair (nu,mu) -> (mu,nu).
constexpr int pair_mirror(int p) { return ((p & 1) << 1) | (p >> 1); }

// Canonical key for a two-site transition, e.g. "10<-01" for (0,1) -> (1,0).
std::string transition_key(int from_pair, int to_pair);

// Parses "lk<-nm" with l,k,n,m in {0,1}. Throws std::invalid_argument on
// malformed keys or diagonal transitions.
std::pair<int, int> parse_transition_key(const std::string& key);

// Two-site transition rates on a Cayley tree with coordination number xi.
// rates[from][to] is the rate for the ordered pair transition
// (nu,mu) -> (lam,kap); the four diagonal entries are unused and stay 0.
struct RateModel {
  int xi = 2;
  std::array<std::array<double, kNumPairStates>, kNumPairStates> rates{};

  double rate(int from_pair, int to_pair) const { return rates[from_pair][to_pair]; }
  double rate(int nu, int mu, int lam, int kap) const {
    return rates[pair_state(nu, mu)][pair_state(lam, kap)];
  }
  void set_rate(int nu, int mu, int lam, int kap, double r) {
    rates[pair_state(nu, mu)][pair_state(lam, kap)] = r;
  }

  // Total exit rate out of a pair state.
  double exit_rate(int from_pair) const;
};

// Named rate sets used throughout the tests and docs.
RateModel diffusion_model(int xi, double hop_rate);
RateModel annihilation_creation_model(int xi, double rate);

struct SymmetryReport {
  // Human-readable descriptions, one per violated pair or negative entry.
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

// Checks nonnegativity of all entries and the link symmetry
// rate(nu,mu -> lam,kap) == rate(mu,nu -> kap,lam), with exact equality.
SymmetryReport validate_symmetry(const RateModel& model);

struct AutonomyCheck {
  double residual = 0.0;
  bool ok(double tol = 0.0) const {
    return residual >= -tol && residual <= tol;
  }
};

// Residual of the closure criterion for the one-point density evolution:
//   (H(11->00) + H(01->11) + H(11->01)) - (H(00->11) + H(10->00) + H(00->10))
// written with transitions as from->to; zero iff the mean density obeys a
// closed linear equation.
AutonomyCheck check_autonomy(const RateModel& model);

// Coefficients of the closed density evolution
//   drho_i/dt = alpha*deg(i) + sum_{j in nbrs(i)} (beta*rho_j - gamma*rho_i),
// plus the tree geometry factor eta = ln(xi-1)/2. The stationary density
// alpha/(gamma-beta) is absent (conserved dynamics) when gamma == beta.
struct Coefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  int xi = 2;
  std::optional<double> stationary;  // nullopt: density conserved

  bool conserved() const { return !stationary.has_value(); }
  // Stationary value, or the given fallback for conserved dynamics.
  double stationary_or(double fallback) const { return stationary.value_or(fallback); }
};

// Derives (alpha, beta, gamma, eta, stationary) from a symmetric autonomous
// rate model and re-checks the four inequality constraints implied by rate
// nonnegativity. Throws std::invalid_argument on inconsistent input.
Coefficients derive_coefficients(const RateModel& model);

}  // namespace cayley
