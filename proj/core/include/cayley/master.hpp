#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cayley/rates.hpp"
#include "cayley/tree.hpp"

namespace cayley {

// Exact continuous-time Markov chain over the 2^S occupation states of a
// finite tree, with the two-site rates applied once per undirected edge
// (the link symmetry makes the orientation irrelevant).
struct MasterSystem {
  TruncatedTree tree;
  std::array<std::array<double, kNumPairStates>, kNumPairStates> pair_rates{};
  std::vector<std::array<int, 2>> edges;

  int sites() const { return tree.sites(); }
  std::size_t states() const { return std::size_t{1} << sites(); }
};

// Throws std::length_error when the tree has more than max_sites sites
// (default cap 20, i.e. 2^20 states).
MasterSystem make_master_system(const RateModel& model, const TruncatedTree& tree,
                                int max_sites = 20);

// v -> Q v for the generator Q (columns sum to zero).
std::vector<double> apply_generator(const MasterSystem& sys, std::span<const double> v);

// Dense generator for small systems (sites <= 12); test and debugging aid.
std::vector<std::vector<double>> dense_generator(const MasterSystem& sys);

// Product measure with per-shell occupation probabilities. shell_p may hold a
// single broadcast value or one entry per shell.
std::vector<double> product_bernoulli(const MasterSystem& sys, std::span<const double> shell_p);

std::vector<double> point_mass(const MasterSystem& sys, std::uint64_t occupation_bits);

struct MasterResult {
  std::vector<double> mean;          // per-site occupation means at time t
  std::vector<double> distribution;  // full probability vector at time t
  double norm_drift = 0.0;           // | ||P||_1 - 1 |
};

// Evolves the distribution by uniformization (Poisson-weighted powers of the
// uniformized transition matrix), long intervals split into substeps. The
// probability vector stays normalized to 1e-10; drift beyond 1e-8 throws.
MasterResult master_evolve(const MasterSystem& sys, std::vector<double> init_dist, double t,
                           double rel_tol = 1e-8);

struct WitnessReport {
  double max_gap = 0.0;               // over all sites and sample times
  std::vector<double> per_time_gap;   // max over sites, one entry per time
};

// Compares exact master-equation means against the closed density ODE built
// from the same rates, from a product-Bernoulli(1/2) start. For autonomous
// models the gap is integrator noise; otherwise it is macroscopic.
WitnessReport autonomy_witness(const RateModel& model, const TruncatedTree& tree,
                               std::span<const double> times);

}  // namespace cayley
