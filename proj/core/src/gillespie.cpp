#include "cayley/gillespie.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace cayley {

namespace {

// splitmix64 output function.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Uniform double in [0,1) from the high 53 bits.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0,1]; safe under log().
double uniform01_positive(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

std::vector<std::uint8_t> sample_occupancy(const TruncatedTree& tree, const InitSpec& init,
                                           std::mt19937_64& rng) {
  const int sites = tree.sites();
  std::vector<std::uint8_t> occ(sites, 0);
  switch (init.kind) {
    case InitSpec::Kind::bitmask:
      if (sites < 64 && (init.bits >> sites)) {
        throw std::invalid_argument("occupation bitmask addresses sites beyond the tree");
      }
      for (int i = 0; i < sites && i < 64; ++i) occ[i] = (init.bits >> i) & 1;
      break;
    case InitSpec::Kind::bernoulli: {
      if (init.shell_p.empty() ||
          (init.shell_p.size() != 1 &&
           static_cast<int>(init.shell_p.size()) < tree.depth + 1)) {
        throw std::invalid_argument("need an occupation probability for every shell");
      }
      for (int i = 0; i < sites; ++i) {
        const double p = init.shell_p.size() == 1
                             ? init.shell_p[0]
                             : init.shell_p[static_cast<std::size_t>(tree.shell_of[i])];
        if (!(p >= 0.0 && p <= 1.0)) {
          throw std::invalid_argument("occupation probability outside [0, 1]");
        }
        occ[i] = uniform01(rng) < p ? 1 : 0;
      }
      break;
    }
  }
  return occ;
}

}  // namespace

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return mix64(master_seed + (run_index + 1) * kGoldenGamma);
}

PropensityTable::PropensityTable(std::size_t n) : values_(n, 0.0), tree_(n + 1, 0.0) {}

void PropensityTable::set(std::size_t i, double v) {
  const double delta = v - values_[i];
  if (delta == 0.0) return;
  values_[i] = v;
  for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
}

double PropensityTable::total() const {
  double sum = 0.0;
  for (std::size_t j = values_.size(); j > 0; j -= j & (~j + 1)) sum += tree_[j];
  return sum;
}

std::size_t PropensityTable::sample(double u) const {
  double remaining = u * total();
  std::size_t idx = 0;
  std::size_t bit = std::size_t{1};
  while ((bit << 1) <= values_.size()) bit <<= 1;
  for (; bit > 0; bit >>= 1) {
    const std::size_t next = idx + bit;
    if (next < tree_.size() && tree_[next] <= remaining) {
      idx = next;
      remaining -= tree_[next];
    }
  }
  if (idx >= values_.size()) idx = values_.size() - 1;
  // Rounding can land on a zero-propensity link; the nearest live link
  // forward owns that prefix boundary.
  if (values_[idx] == 0.0) {
    std::size_t fwd = idx;
    while (fwd + 1 < values_.size() && values_[fwd] == 0.0) ++fwd;
    if (values_[fwd] != 0.0) return fwd;
    while (idx > 0 && values_[idx] == 0.0) --idx;
  }
  return idx;
}

InitSpec InitSpec::full(const TruncatedTree& tree) {
  if (tree.sites() > 64) {
    // Broadcast probability 1: deterministic full occupation for any size.
    return bernoulli(1.0);
  }
  const std::uint64_t bits =
      tree.sites() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << tree.sites()) - 1;
  return bitmask(bits);
}

std::vector<std::uint8_t> sample_initial_occupancy(const TruncatedTree& tree,
                                                   const InitSpec& init, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_occupancy(tree, init, rng);
}

TrajectoryRecord gillespie_run(const RateModel& model, const TruncatedTree& tree,
                               const InitSpec& init, std::uint64_t seed,
                               std::span<const double> t_samples,
                               std::vector<LinkEvent>* event_log, std::size_t max_log) {
  for (std::size_t k = 0; k + 1 < t_samples.size(); ++k) {
    if (t_samples[k] > t_samples[k + 1]) {
      throw std::invalid_argument("sample times must be ascending");
    }
  }
  if (!t_samples.empty() && t_samples[0] < 0.0) {
    throw std::invalid_argument("sample times must be >= 0");
  }
  const int sites = tree.sites();
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> occ = sample_occupancy(tree, init, rng);

  // Per-pair-state exit rates and outgoing channels.
  std::array<double, kNumPairStates> exit{};
  std::array<std::array<std::pair<int, double>, 3>, kNumPairStates> channels{};
  std::array<int, kNumPairStates> n_channels{};
  for (int from = 0; from < kNumPairStates; ++from) {
    for (int to = 0; to < kNumPairStates; ++to) {
      if (to == from) continue;
      const double r = model.rates[from][to];
      if (r > 0.0) {
        channels[from][n_channels[from]++] = {to, r};
        exit[from] += r;
      }
    }
  }

  std::vector<std::array<int, 2>> links;
  std::vector<std::vector<int>> links_of(sites);
  for (int i = 0; i < sites; ++i) {
    for (int j : tree.adjacency[i]) {
      if (i < j) {
        links_of[i].push_back(static_cast<int>(links.size()));
        links_of[j].push_back(static_cast<int>(links.size()));
        links.push_back({i, j});
      }
    }
  }

  auto pair_of_link = [&](int l) { return occ[links[l][0]] * 2 + occ[links[l][1]]; };

  PropensityTable propensity(links.size());
  for (std::size_t l = 0; l < links.size(); ++l) {
    propensity.set(l, exit[pair_of_link(static_cast<int>(l))]);
  }

  TrajectoryRecord record;
  record.occupancy.resize(t_samples.size() * static_cast<std::size_t>(sites));
  std::size_t next_sample = 0;
  auto record_through = [&](double horizon) {
    while (next_sample < t_samples.size() && t_samples[next_sample] < horizon) {
      std::copy(occ.begin(), occ.end(),
                record.occupancy.begin() + next_sample * static_cast<std::size_t>(sites));
      ++next_sample;
    }
  };

  double t = 0.0;
  while (next_sample < t_samples.size()) {
    const double total = propensity.total();
    if (total <= 0.0) break;  // frozen configuration
    const double dt = -std::log(uniform01_positive(rng)) / total;
    const double t_next = t + dt;
    record_through(t_next);
    if (next_sample >= t_samples.size()) break;

    const int link = static_cast<int>(propensity.sample(uniform01(rng)));
    const int from = pair_of_link(link);
    int to = from;
    double pick = uniform01(rng) * exit[from];
    for (int c = 0; c < n_channels[from]; ++c) {
      pick -= channels[from][c].second;
      to = channels[from][c].first;
      if (pick <= 0.0) break;
    }

    const int a = links[link][0];
    const int b = links[link][1];
    occ[a] = static_cast<std::uint8_t>(to >> 1);
    occ[b] = static_cast<std::uint8_t>(to & 1);
    // Only links touching the two flipped sites change propensity.
    for (int l : links_of[a]) propensity.set(l, exit[pair_of_link(l)]);
    for (int l : links_of[b]) propensity.set(l, exit[pair_of_link(l)]);

    t = t_next;
    ++record.events;
    if (event_log && event_log->size() < max_log) {
      event_log->push_back(LinkEvent{t, a, b, from, to});
    }
  }
  record_through(std::numeric_limits<double>::infinity());
  return record;
}

double EnsembleResult::mean(std::size_t k, int site) const {
  return static_cast<double>(occupied_count[k][static_cast<std::size_t>(site)]) /
         static_cast<double>(runs);
}

double EnsembleResult::std_error(std::size_t k, int site) const {
  if (runs < 2) return 0.0;
  const double c = static_cast<double>(occupied_count[k][static_cast<std::size_t>(site)]);
  const double n = static_cast<double>(runs);
  return std::sqrt(c * (n - c) / (n - 1.0)) / n;
}

double EnsembleResult::events_per_second() const {
  return elapsed_seconds > 0.0 ? static_cast<double>(total_events) / elapsed_seconds : 0.0;
}

EnsembleResult ensemble_mean(const RateModel& model, const TruncatedTree& tree,
                             const EnsembleConfig& config, const InitSpec& init) {
  if (config.runs == 0) throw std::invalid_argument("need at least one run");
  const auto t_start = std::chrono::steady_clock::now();

  const int sites = tree.sites();
  const std::size_t n_samples = config.t_samples.size();
  unsigned threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, config.runs)));

  // Integer occupation counts: the merge is exact, so the result does not
  // depend on the thread partition.
  std::vector<std::vector<std::vector<std::uint64_t>>> partial(
      threads, std::vector<std::vector<std::uint64_t>>(
                   n_samples, std::vector<std::uint64_t>(static_cast<std::size_t>(sites), 0)));
  std::vector<std::uint64_t> partial_events(threads, 0);

  auto worker = [&](unsigned th) {
    const std::size_t begin = config.runs * th / threads;
    const std::size_t end = config.runs * (th + 1) / threads;
    for (std::size_t run = begin; run < end; ++run) {
      const TrajectoryRecord traj =
          gillespie_run(model, tree, init, derive_run_seed(config.master_seed, run),
                        config.t_samples);
      partial_events[th] += traj.events;
      for (std::size_t k = 0; k < n_samples; ++k) {
        for (int i = 0; i < sites; ++i) {
          partial[th][k][static_cast<std::size_t>(i)] +=
              traj.occupancy[k * static_cast<std::size_t>(sites) + static_cast<std::size_t>(i)];
        }
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned th = 1; th < threads; ++th) pool.emplace_back(worker, th);
  worker(0);
  for (auto& th : pool) th.join();

  EnsembleResult result;
  result.t_samples = config.t_samples;
  result.runs = config.runs;
  result.occupied_count.assign(
      n_samples, std::vector<std::uint64_t>(static_cast<std::size_t>(sites), 0));
  for (unsigned th = 0; th < threads; ++th) {
    result.total_events += partial_events[th];
    for (std::size_t k = 0; k < n_samples; ++k) {
      for (int i = 0; i < sites; ++i) {
        result.occupied_count[k][static_cast<std::size_t>(i)] +=
            partial[th][k][static_cast<std::size_t>(i)];
      }
    }
  }
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace cayley
