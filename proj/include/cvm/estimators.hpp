#pragma once

// Monte Carlo estimators built on the simulation engine.
//
// Replicate i always draws from CounterRng(seed, i), both for its initial
// configuration and its dynamics, and results are reduced in replicate order,
// so estimates do not depend on the thread count.

#include "cvm/edge_particles.hpp"
#include "cvm/model.hpp"
#include "cvm/rational.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cvm {

inline constexpr double kDefaultConfidence = 0.99;

/// Two-sided standard normal quantile z with P(|Z| <= z) = confidence.
double normal_critical_value(double confidence);

struct EstimateWithCI {
  double estimate = 0.0;
  double half_width = 0.0;
  double confidence = kDefaultConfidence;
  std::uint64_t replicates = 0;

  double lower() const noexcept { return estimate - half_width; }
  double upper() const noexcept { return estimate + half_width; }
  bool covers(double value) const noexcept { return lower() <= value && value <= upper(); }
};

/// Proportion with normal-approximation half-width z sqrt(p(1-p)/n).
EstimateWithCI proportion_estimate(std::uint64_t successes, std::uint64_t trials,
                                   double confidence = kDefaultConfidence);

/// Exact Clopper-Pearson interval for a proportion.
struct Interval {
  double lower;
  double upper;
};
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                         double confidence = kDefaultConfidence);

/// Sample mean with half-width z s / sqrt(n), s the sample standard deviation.
EstimateWithCI mean_estimate(std::span<const double> samples, double confidence = kDefaultConfidence);

struct TimeSeriesSummary {
  std::string name;
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> half_width;
  std::uint64_t replicates = 0;
  double confidence = kDefaultConfidence;

  EstimateWithCI at(std::size_t k) const { return {mean[k], half_width[k], confidence, replicates}; }
};

/// per_replicate[r][k] is replicate r's value at times[k].
TimeSeriesSummary summarize(std::string name, std::vector<double> times,
                            const std::vector<std::vector<double>>& per_replicate,
                            double confidence = kDefaultConfidence);

/// 0, 1, 2, 4, ... up to and including t_max.
std::vector<double> geometric_times(double t_max);

struct EstimatorOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  double confidence = kDefaultConfidence;
  std::uint64_t event_budget = 1'000'000'000ULL;
};

unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, replicates) on a pool of threads and returns the
/// results in index order. The first exception thrown by any replicate is
/// rethrown after all workers stop.
template <class R>
std::vector<R> run_replicates(std::uint64_t replicates, unsigned threads,
                              const std::function<R(std::uint64_t)>& body);

/// Thrown when the total edge-particle count grows at some event.
class ParticleIncrease : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Tracks sum_e |xi(e)| of a cycle or path run event by event and throws
/// ParticleIncrease the moment it grows.
class ParticleMonitor {
 public:
  explicit ParticleMonitor(const Configuration& config);
  void observe(const ArrowEvent& event, const RunState& state, Opinion previous);
  std::int64_t total() const noexcept { return total_; }
  std::uint64_t events_checked() const noexcept { return events_; }

 private:
  std::int64_t total_ = 0;
  std::uint64_t events_ = 0;
};

struct ConsensusReport {
  EstimateWithCI consensus;
  std::uint64_t replicates = 0;
  std::uint64_t consensus_count = 0;
  std::uint64_t frozen_count = 0;    // absorbed without consensus
  std::uint64_t censored_count = 0;  // event budget exhausted
  Rational rho_c_bound;
  /// Set for cycles and paths, where every event was checked.
  bool particle_monotone_checked = false;
  std::uint64_t particle_events_checked = 0;

  bool lower_bound_consistent() const {
    return consensus.upper() >= to_double(rho_c_bound);
  }
  bool accounting_consistent() const {
    return consensus_count + frozen_count + censored_count == replicates;
  }
};

ConsensusReport estimate_consensus_probability(const Params& params, const DensityVector& density,
                                               std::shared_ptr<const Graph> graph,
                                               std::uint64_t replicates, std::uint64_t seed,
                                               const EstimatorOptions& options = {});

/// One summary per pair: fraction of replicates with opinion(x) = opinion(y).
std::vector<TimeSeriesSummary> estimate_pair_agreement(
    const Params& params, const DensityVector& density, int cycle_size,
    const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& times,
    std::uint64_t replicates, std::uint64_t seed, const EstimatorOptions& options = {});

struct ParticleDensityReport {
  TimeSeriesSummary mean_abs_xi;        // particles per edge
  TimeSeriesSummary interface_density;  // fraction of edges with xi != 0
  TimeSeriesSummary blockade_density;   // fraction of edges with |xi| > theta
  std::uint64_t events_checked = 0;
};

/// Cycle runs to the last sample time. Every event is checked by a
/// ParticleMonitor, so a particle increase throws instead of returning.
ParticleDensityReport estimate_particle_density(const Params& params, const DensityVector& density,
                                                int cycle_size, const std::vector<double>& times,
                                                std::uint64_t replicates, std::uint64_t seed,
                                                const EstimatorOptions& options = {});

struct MartingaleReport {
  std::vector<TimeSeriesSummary> counts;  // counts[j - 1] tracks X_t(j)
  std::vector<double> expected;           // N rho_j
  std::optional<TimeSeriesSummary> centrist_total;
  double centrist_expected = 0.0;

  /// Every mean within its half-width of the expectation.
  bool within_ci() const;
};

MartingaleReport martingale_check(const Params& params, const DensityVector& density,
                                  std::shared_ptr<const Graph> graph, const std::vector<double>& times,
                                  std::uint64_t replicates, std::uint64_t seed,
                                  const EstimatorOptions& options = {});

/// Z_N: the number of adjacent unequal pairs. Throws for fewer than two outcomes.
template <class T>
std::uint64_t count_changeovers(std::span<const T> outcomes) {
  if (outcomes.size() < 2) throw std::invalid_argument("changeovers need at least two outcomes");
  std::uint64_t z = 0;
  for (std::size_t j = 0; j + 1 < outcomes.size(); ++j) z += outcomes[j + 1] != outcomes[j];
  return z;
}

/// counts[i-1][j-1] = #{x : s[x] = i, s[x+1] = j} over the N adjacent pairs.
std::vector<std::vector<std::uint64_t>> count_edge_types(std::span<const Opinion> sequence, int opinions);

struct LdPoint {
  int length = 0;  // N
  std::uint64_t deviations = 0;
  std::uint64_t replicates = 0;
  double probability = 0.0;
  /// log(probability), or log(1/replicates) when no deviation was seen.
  double log_probability = 0.0;
  bool censored = false;
  EstimateWithCI mean_changeovers;
};

/// Empirical P(|Z_N - 2Np(1-p)| >= epsilon N) for i.i.d. Bernoulli(p) outcomes.
std::vector<LdPoint> ld_decay_curve(double p, double epsilon, const std::vector<int>& lengths,
                                    std::uint64_t replicates, std::uint64_t seed,
                                    const EstimatorOptions& options = {});

struct WindowWeightReport {
  std::vector<int> weights;
  /// min over l <= r of sum_{e=l}^{r} weight(e), for each right end r.
  std::vector<std::int64_t> min_window_sum;
  std::int64_t overall_min = 0;
  bool any_nonpositive = false;
};

WindowWeightReport window_weight_sums(std::span<const int> xi, int theta);
WindowWeightReport window_weight_sums_from_opinions(std::span<const Opinion> opinions, int theta);

/// Fraction of windows of exactly `length` consecutive weights whose sum is <= 0.
double nonpositive_window_fraction(std::span<const int> weights, std::size_t length);

struct DomainStats {
  std::vector<int> lengths;
  double mean = 0.0;
  int max = 0;
  std::vector<std::uint64_t> histogram;  // histogram[k] = domains of length k
};

/// Maximal monochromatic runs, cyclic on a cycle.
DomainStats domain_length_stats(const Configuration& config);

std::vector<std::uint64_t> flip_counts(const RunResult& result);

double median(std::vector<double> values);

/// Replicate-mean of the median per-site flip count at each horizon, on a cycle.
TimeSeriesSummary flip_count_profile(const Params& params, const DensityVector& density, int cycle_size,
                                     const std::vector<double>& horizons, std::uint64_t replicates,
                                     std::uint64_t seed, const EstimatorOptions& options = {});

// ---- template definitions ----

template <class R>
std::vector<R> run_replicates(std::uint64_t replicates, unsigned threads,
                              const std::function<R(std::uint64_t)>& body) {
  std::vector<std::optional<R>> slots(replicates);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(replicates, 1)));
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= replicates) return;
      try {
        slots[i].emplace(body(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  std::vector<R> out;
  out.reserve(replicates);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

} // namespace cvm
