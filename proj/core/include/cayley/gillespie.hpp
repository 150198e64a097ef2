#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cayley/rates.hpp"
#include "cayley/tree.hpp"

namespace cayley {

// Per-run seed for run k of an ensemble: splitmix64 output function applied
// to master_seed + (k+1) * golden-gamma. This mapping is part of the output
// reproducibility contract (see FORMATS.md); changing it changes results.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index);

// Indexed partial-sum table (Fenwick layout) over per-link propensities:
// point updates and proportional sampling both in O(log n).
class PropensityTable {
 public:
  explicit PropensityTable(std::size_t n);

  void set(std::size_t i, double v);
  double value(std::size_t i) const { return values_[i]; }
  double total() const;
  std::size_t size() const { return values_.size(); }

  // Smallest index whose prefix sum exceeds u * total(), u in [0,1).
  std::size_t sample(double u) const;

 private:
  std::vector<double> values_;
  std::vector<double> tree_;  // 1-based Fenwick array
};

// Initial occupation: fixed bitmask (trees up to 64 sites) or product
// Bernoulli with per-shell probabilities (single value broadcasts).
struct InitSpec {
  enum class Kind { bitmask, bernoulli };
  Kind kind = Kind::bitmask;
  std::uint64_t bits = 0;
  std::vector<double> shell_p;

  static InitSpec empty() { return {}; }
  static InitSpec bitmask(std::uint64_t bits) { return {Kind::bitmask, bits, {}}; }
  static InitSpec full(const TruncatedTree& tree);
  static InitSpec bernoulli(double p) { return {Kind::bernoulli, 0, {p}}; }
  static InitSpec bernoulli_per_shell(std::vector<double> p) {
    return {Kind::bernoulli, 0, std::move(p)};
  }
};

std::vector<std::uint8_t> sample_initial_occupancy(const TruncatedTree& tree,
                                                   const InitSpec& init, std::uint64_t seed);

struct LinkEvent {
  double time;
  int site_a, site_b;
  int from_pair, to_pair;
};

struct TrajectoryRecord {
  // occupancy[k * sites + i]: site i at sample time k.
  std::vector<std::uint8_t> occupancy;
  std::uint64_t events = 0;
};

// One statistically exact trajectory of the link CTMC, recorded at the given
// ascending sample times. Deterministic for a fixed seed. If event_log is
// non-null the first max_log events are appended to it.
TrajectoryRecord gillespie_run(const RateModel& model, const TruncatedTree& tree,
                               const InitSpec& init, std::uint64_t seed,
                               std::span<const double> t_samples,
                               std::vector<LinkEvent>* event_log = nullptr,
                               std::size_t max_log = 1u << 20);

struct EnsembleConfig {
  std::size_t runs = 1;
  std::uint64_t master_seed = 0;
  std::vector<double> t_samples;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct EnsembleResult {
  std::vector<double> t_samples;
  std::size_t runs = 0;
  // occupied_count[k][i]: runs with site i occupied at sample k. Integer
  // counts make the aggregation exact, so results are bit-identical for any
  // thread count.
  std::vector<std::vector<std::uint64_t>> occupied_count;
  std::uint64_t total_events = 0;
  double elapsed_seconds = 0.0;

  double mean(std::size_t k, int site) const;
  double std_error(std::size_t k, int site) const;
  double events_per_second() const;
};

// Independent runs with per-run seeds derived from master_seed, partitioned
// over threads.
EnsembleResult ensemble_mean(const RateModel& model, const TruncatedTree& tree,
                             const EnsembleConfig& config, const InitSpec& init);

}  // namespace cayley
