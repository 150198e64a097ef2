#include "cayley/master.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cayley/dynamics.hpp"

namespace cayley {

namespace {

int pair_of(std::uint64_t state, int i, int j) {
  return static_cast<int>(((state >> i) & 1) * 2 + ((state >> j) & 1));
}

std::uint64_t with_pair(std::uint64_t state, int i, int j, int pair) {
  state &= ~((std::uint64_t{1} << i) | (std::uint64_t{1} << j));
  state |= (static_cast<std::uint64_t>(pair >> 1) << i) |
           (static_cast<std::uint64_t>(pair & 1) << j);
  return state;
}

// One uniformization substep: P <- sum_k pois(k; rate*dt) M^k P with
// M = I + Q/rate. M is column-stochastic with nonnegative entries, so the
// iteration preserves positivity and the 1-norm up to the Poisson tail.
void uniformization_step(const MasterSystem& sys, std::vector<double>& p, double rate, double dt,
                         double tail_tol) {
  const double lt = rate * dt;
  std::vector<double> acc(p.size(), 0.0);
  double weight = std::exp(-lt);
  double cumulative = weight;
  for (std::size_t i = 0; i < p.size(); ++i) acc[i] = weight * p[i];

  std::vector<double> q;
  for (int k = 1; k < 100000; ++k) {
    q = apply_generator(sys, p);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += q[i] / rate;
    weight *= lt / static_cast<double>(k);
    cumulative += weight;
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += weight * p[i];
    // Second clause guards against the cumulative sum stalling just under 1
    // once the weights underflow.
    if (static_cast<double>(k) > lt &&
        (1.0 - cumulative < tail_tol || weight < tail_tol * 1e-6)) {
      break;
    }
  }
  p = std::move(acc);
}

}  // namespace

MasterSystem make_master_system(const RateModel& model, const TruncatedTree& tree,
                                int max_sites) {
  if (tree.sites() > max_sites) {
    throw std::length_error("master equation limited to " + std::to_string(max_sites) +
                            " sites, tree has " + std::to_string(tree.sites()));
  }
  MasterSystem sys;
  sys.tree = tree;
  sys.pair_rates = model.rates;
  for (int i = 0; i < tree.sites(); ++i) {
    for (int j : tree.adjacency[i]) {
      if (i < j) sys.edges.push_back({i, j});
    }
  }
  return sys;
}

std::vector<double> apply_generator(const MasterSystem& sys, std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  for (std::uint64_t s = 0; s < v.size(); ++s) {
    const double p = v[s];
    if (p == 0.0) continue;
    for (const auto& e : sys.edges) {
      const int from = pair_of(s, e[0], e[1]);
      for (int to = 0; to < kNumPairStates; ++to) {
        if (to == from) continue;
        const double r = sys.pair_rates[from][to];
        if (r == 0.0) continue;
        out[with_pair(s, e[0], e[1], to)] += r * p;
        out[s] -= r * p;
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> dense_generator(const MasterSystem& sys) {
  if (sys.sites() > 10) throw std::length_error("dense generator limited to 10 sites");
  const std::size_t n = sys.states();
  std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
  std::vector<double> unit(n, 0.0);
  for (std::size_t col = 0; col < n; ++col) {
    unit[col] = 1.0;
    const std::vector<double> image = apply_generator(sys, unit);
    for (std::size_t row = 0; row < n; ++row) q[row][col] = image[row];
    unit[col] = 0.0;
  }
  return q;
}

std::vector<double> product_bernoulli(const MasterSystem& sys, std::span<const double> shell_p) {
  if (shell_p.empty()) throw std::invalid_argument("need at least one occupation probability");
  auto p_of_site = [&](int i) {
    const int shell = sys.tree.shell_of[i];
    const double p =
        shell_p.size() == 1 ? shell_p[0] : shell_p[static_cast<std::size_t>(shell)];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("occupation probability outside [0, 1]");
    }
    return p;
  };
  if (shell_p.size() != 1 && static_cast<int>(shell_p.size()) < sys.tree.depth + 1) {
    throw std::invalid_argument("need an occupation probability for every shell");
  }
  std::vector<double> dist(sys.states(), 1.0);
  for (std::uint64_t s = 0; s < dist.size(); ++s) {
    for (int i = 0; i < sys.sites(); ++i) {
      const double p = p_of_site(i);
      dist[s] *= ((s >> i) & 1) ? p : 1.0 - p;
    }
  }
  return dist;
}

std::vector<double> point_mass(const MasterSystem& sys, std::uint64_t occupation_bits) {
  if (sys.sites() < 64 && occupation_bits >> sys.sites()) {
    throw std::invalid_argument("occupation bitmask addresses sites beyond the tree");
  }
  std::vector<double> dist(sys.states(), 0.0);
  dist[occupation_bits] = 1.0;
  return dist;
}

MasterResult master_evolve(const MasterSystem& sys, std::vector<double> init_dist, double t,
                           double rel_tol) {
  if (init_dist.size() != sys.states()) {
    throw std::invalid_argument("distribution length must be 2^sites");
  }
  if (!(t >= 0.0)) throw std::domain_error("time must be >= 0");
  double norm = 0.0;
  for (double v : init_dist) norm += v;
  if (std::fabs(norm - 1.0) > 1e-8) {
    throw std::invalid_argument("initial distribution is not normalized");
  }

  // Uniformization rate: an upper bound on every total exit rate.
  double rate = 0.0;
  double max_exit = 0.0;
  for (int from = 0; from < kNumPairStates; ++from) {
    double exit = 0.0;
    for (int to = 0; to < kNumPairStates; ++to) {
      if (to != from) exit += sys.pair_rates[from][to];
    }
    max_exit = std::max(max_exit, exit);
  }
  rate = max_exit * static_cast<double>(sys.edges.size());

  if (rate > 0.0 && t > 0.0) {
    const int substeps = std::max(1, static_cast<int>(std::ceil(rate * t / 64.0)));
    const double tail_tol = std::min(1e-13, rel_tol * 1e-4) / substeps;
    for (int s = 0; s < substeps; ++s) {
      uniformization_step(sys, init_dist, rate, t / substeps, tail_tol);
    }
  }

  MasterResult result;
  norm = 0.0;
  for (double v : init_dist) norm += v;
  result.norm_drift = std::fabs(norm - 1.0);
  if (result.norm_drift > 1e-8) {
    throw std::runtime_error("probability normalization drifted by " +
                             std::to_string(result.norm_drift));
  }
  result.mean.assign(sys.sites(), 0.0);
  for (std::uint64_t s = 0; s < init_dist.size(); ++s) {
    const double p = init_dist[s];
    if (p == 0.0) continue;
    for (int i = 0; i < sys.sites(); ++i) {
      if ((s >> i) & 1) result.mean[i] += p;
    }
  }
  result.distribution = std::move(init_dist);
  return result;
}

WitnessReport autonomy_witness(const RateModel& model, const TruncatedTree& tree,
                               std::span<const double> times) {
  if (tree.sites() > 16) {
    throw std::length_error("autonomy witness limited to 16 sites");
  }
  const MasterSystem sys = make_master_system(model, tree);
  const double half[] = {0.5};
  std::vector<double> dist = product_bernoulli(sys, half);
  const DensityField ode_init =
      DensityField::per_site(std::vector<double>(tree.sites(), 0.5));

  WitnessReport report;
  double t_now = 0.0;
  for (double t : times) {
    if (t < t_now) throw std::invalid_argument("witness times must be ascending");
    MasterResult master = master_evolve(sys, std::move(dist), t - t_now);
    dist = std::move(master.distribution);
    t_now = t;
    const DensityField ode = evolve_site_ode(model, tree, ode_init, t, 1e-10);
    double gap = 0.0;
    for (int i = 0; i < tree.sites(); ++i) {
      gap = std::max(gap, std::fabs(master.mean[i] - ode.values[i]));
    }
    report.per_time_gap.push_back(gap);
    report.max_gap = std::max(report.max_gap, gap);
  }
  return report;
}

}  // namespace cayley
