#include "cvm/estimators.hpp"

#include "cvm/analytics.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <cstdlib>
#include <numeric>

namespace cvm {

double normal_critical_value(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
}

EstimateWithCI proportion_estimate(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw std::invalid_argument("proportion needs at least one trial");
  if (successes > trials) throw std::invalid_argument("more successes than trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  return {p, normal_critical_value(confidence) * std::sqrt(p * (1.0 - p) / n), confidence, trials};
}

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw std::invalid_argument("proportion needs at least one trial");
  if (successes > trials) throw std::invalid_argument("more successes than trials");
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  Interval out{0.0, 1.0};
  if (successes > 0)
    out.lower = boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1.0), alpha / 2.0);
  if (successes < trials)
    out.upper = boost::math::quantile(boost::math::beta_distribution<>(k + 1.0, n - k), 1.0 - alpha / 2.0);
  return out;
}

EstimateWithCI mean_estimate(std::span<const double> samples, double confidence) {
  if (samples.empty()) throw std::invalid_argument("mean needs at least one sample");
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, normal_critical_value(confidence) * sd / std::sqrt(n), confidence, samples.size()};
}

TimeSeriesSummary summarize(std::string name, std::vector<double> times,
                            const std::vector<std::vector<double>>& per_replicate, double confidence) {
  TimeSeriesSummary out;
  out.name = std::move(name);
  out.replicates = per_replicate.size();
  out.confidence = confidence;
  std::vector<double> column(per_replicate.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t r = 0; r < per_replicate.size(); ++r) {
      if (per_replicate[r].size() != times.size())
        throw std::logic_error("replicate series length differs from the sample grid");
      column[r] = per_replicate[r][k];
    }
    const EstimateWithCI e = mean_estimate(column, confidence);
    out.mean.push_back(e.estimate);
    out.half_width.push_back(e.half_width);
  }
  out.times = std::move(times);
  return out;
}

std::vector<double> geometric_times(double t_max) {
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be nonnegative");
  std::vector<double> times{0.0};
  for (double t = 1.0; t < t_max; t *= 2.0) times.push_back(t);
  if (t_max > 0.0) times.push_back(t_max);
  return times;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

ParticleMonitor::ParticleMonitor(const Configuration& config) {
  if (!config.graph().is_linear())
    throw std::invalid_argument("particle monitor needs a cycle or path");
  for (const Edge& e : config.graph().edges()) total_ += std::abs(config[e.v] - config[e.u]);
}

void ParticleMonitor::observe(const ArrowEvent& event, const RunState& state, Opinion previous) {
  ++events_;
  if (!event.changed) return;
  const Configuration& c = state.configuration();
  const Opinion now = c[event.target];
  std::int64_t delta = 0;
  for (int w : c.graph().neighbors(event.target))
    delta += std::abs(now - c[w]) - std::abs(previous - c[w]);
  if (delta > 0)
    throw ParticleIncrease("edge particle count grew from " + std::to_string(total_) + " to " +
                           std::to_string(total_ + delta) + " at event " + std::to_string(events_));
  total_ += delta;
}

namespace {

void require_replicates(std::uint64_t replicates) {
  if (replicates == 0) throw std::invalid_argument("replicates must be positive");
}

void require_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("at least one sample time is required");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0)) throw std::invalid_argument("sample times must be nonnegative");
    if (k > 0 && !(times[k] > times[k - 1]))
      throw std::invalid_argument("sample times must be strictly increasing");
  }
}

void require_density(const Params& params, const DensityVector& density) {
  if (density.opinions() != params.opinions)
    throw std::invalid_argument("density has " + std::to_string(density.opinions()) +
                                " entries but F = " + std::to_string(params.opinions));
}

RunState start_replicate(const Params& params, const DensityVector& density,
                         std::shared_ptr<const Graph> graph, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  Configuration initial = sample_initial(std::move(graph), density, rng);
  return RunState(std::move(initial), params, rng);
}

StopRule sampled_until(const std::vector<double>& times, std::uint64_t budget) {
  StopRule stop = StopRule::until_time(times.back());
  // The state is frozen after absorption, so later samples are unchanged.
  stop.at_absorption = true;
  stop.event_budget = budget;
  return stop;
}

void require_full_series(const RunResult& result) {
  if (result.reason == StopReason::BudgetExhausted)
    throw std::runtime_error("event budget exhausted before the last sample time");
}

} // namespace

ConsensusReport estimate_consensus_probability(const Params& params, const DensityVector& density,
                                               std::shared_ptr<const Graph> graph,
                                               std::uint64_t replicates, std::uint64_t seed,
                                               const EstimatorOptions& options) {
  require_replicates(replicates);
  require_density(params, density);
  const bool linear = graph->is_linear();

  struct Outcome {
    StopReason reason;
    std::uint64_t checked;
  };
  const auto outcomes = run_replicates<Outcome>(replicates, options.threads, [&](std::uint64_t i) {
    RunState state = start_replicate(params, density, graph, seed, i);
    StopRule stop = StopRule::until_absorption();
    stop.event_budget = options.event_budget;
    if (!linear) return Outcome{run(state, stop).reason, 0};
    ParticleMonitor monitor(state.configuration());
    const RunResult result =
        run(state, stop, {}, [&](const ArrowEvent& e, const RunState& s, Opinion prev) {
          monitor.observe(e, s, prev);
        });
    return Outcome{result.reason, monitor.events_checked()};
  });

  ConsensusReport report;
  report.replicates = replicates;
  report.rho_c_bound = rho_c(params, density);
  report.particle_monotone_checked = linear;
  for (const Outcome& o : outcomes) {
    report.particle_events_checked += o.checked;
    switch (o.reason) {
      case StopReason::Consensus: ++report.consensus_count; break;
      case StopReason::Absorbed: ++report.frozen_count; break;
      default: ++report.censored_count; break;
    }
  }
  report.consensus = proportion_estimate(report.consensus_count, replicates, options.confidence);
  return report;
}

std::vector<TimeSeriesSummary> estimate_pair_agreement(
    const Params& params, const DensityVector& density, int cycle_size,
    const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& times,
    std::uint64_t replicates, std::uint64_t seed, const EstimatorOptions& options) {
  require_replicates(replicates);
  require_times(times);
  require_density(params, density);
  auto graph = std::make_shared<const Graph>(Graph::cycle(cycle_size));
  for (auto [x, y] : pairs)
    if (x < 0 || y < 0 || x >= cycle_size || y >= cycle_size)
      throw std::out_of_range("pair vertex outside the cycle");

  const Observer agree{"agreement", times, [&](const RunState& s) {
                         std::vector<double> v;
                         v.reserve(pairs.size());
                         for (auto [x, y] : pairs)
                           v.push_back(s.configuration()[x] == s.configuration()[y] ? 1.0 : 0.0);
                         return v;
                       }};
  const auto series =
      run_replicates<std::vector<std::vector<double>>>(replicates, options.threads, [&](std::uint64_t i) {
        RunState state = start_replicate(params, density, graph, seed, i);
        RunResult result = run(state, sampled_until(times, options.event_budget), {&agree, 1});
        require_full_series(result);
        return std::move(result.series.front().values);
      });

  std::vector<TimeSeriesSummary> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::vector<std::vector<double>> per_replicate(replicates);
    for (std::size_t r = 0; r < replicates; ++r)
      for (const auto& sample : series[r]) per_replicate[r].push_back(sample[p]);
    out.push_back(summarize("agreement(" + std::to_string(pairs[p].first) + "," +
                                std::to_string(pairs[p].second) + ")",
                            times, per_replicate, options.confidence));
  }
  return out;
}

ParticleDensityReport estimate_particle_density(const Params& params, const DensityVector& density,
                                                int cycle_size, const std::vector<double>& times,
                                                std::uint64_t replicates, std::uint64_t seed,
                                                const EstimatorOptions& options) {
  require_replicates(replicates);
  require_times(times);
  require_density(params, density);
  auto graph = std::make_shared<const Graph>(Graph::cycle(cycle_size));
  const int theta = params.threshold;

  const Observer edges{"edges", times, [theta](const RunState& s) {
                         const ParticleStats st = particle_stats(project_edges(s.configuration(), theta));
                         const double m = static_cast<double>(s.configuration().graph().edge_count());
                         return std::vector<double>{st.density, static_cast<double>(st.occupied_edges) / m,
                                                    static_cast<double>(st.blockade_count) / m};
                       }};

  struct Replicate {
    std::vector<std::vector<double>> samples;
    std::uint64_t checked;
  };
  const auto reps = run_replicates<Replicate>(replicates, options.threads, [&](std::uint64_t i) {
    RunState state = start_replicate(params, density, graph, seed, i);
    ParticleMonitor monitor(state.configuration());
    RunResult result = run(state, sampled_until(times, options.event_budget), {&edges, 1},
                           [&](const ArrowEvent& e, const RunState& s, Opinion prev) {
                             monitor.observe(e, s, prev);
                           });
    require_full_series(result);
    return Replicate{std::move(result.series.front().values), monitor.events_checked()};
  });

  ParticleDensityReport report;
  std::array<std::vector<std::vector<double>>, 3> split;
  for (auto& s : split) s.resize(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    report.events_checked += reps[r].checked;
    for (const auto& sample : reps[r].samples)
      for (std::size_t q = 0; q < 3; ++q) split[q][r].push_back(sample[q]);
  }
  report.mean_abs_xi = summarize("mean_abs_xi", times, split[0], options.confidence);
  report.interface_density = summarize("interface_density", times, split[1], options.confidence);
  report.blockade_density = summarize("blockade_density", times, split[2], options.confidence);
  return report;
}

bool MartingaleReport::within_ci() const {
  auto fits = [](const TimeSeriesSummary& s, double expected) {
    for (std::size_t k = 0; k < s.times.size(); ++k)
      if (std::abs(s.mean[k] - expected) > s.half_width[k]) return false;
    return true;
  };
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (!fits(counts[j], expected[j])) return false;
  return !centrist_total || fits(*centrist_total, centrist_expected);
}

MartingaleReport martingale_check(const Params& params, const DensityVector& density,
                                  std::shared_ptr<const Graph> graph, const std::vector<double>& times,
                                  std::uint64_t replicates, std::uint64_t seed,
                                  const EstimatorOptions& options) {
  require_replicates(replicates);
  require_times(times);
  require_density(params, density);
  const int F = params.opinions;
  const std::vector<Opinion> centrists = centrist_set(params);

  const Observer counts{"counts", times, [&](const RunState& s) {
                          std::vector<double> v(static_cast<std::size_t>(F) + 1, 0.0);
                          for (Opinion o : s.configuration().opinions()) v[static_cast<std::size_t>(o - 1)] += 1.0;
                          for (Opinion o : centrists) v.back() += v[static_cast<std::size_t>(o - 1)];
                          return v;
                        }};
  const auto series =
      run_replicates<std::vector<std::vector<double>>>(replicates, options.threads, [&](std::uint64_t i) {
        RunState state = start_replicate(params, density, graph, seed, i);
        RunResult result = run(state, sampled_until(times, options.event_budget), {&counts, 1});
        require_full_series(result);
        return std::move(result.series.front().values);
      });

  MartingaleReport report;
  const double n = graph->vertex_count();
  for (int j = 0; j <= F; ++j) {
    std::vector<std::vector<double>> per_replicate(replicates);
    for (std::size_t r = 0; r < replicates; ++r)
      for (const auto& sample : series[r]) per_replicate[r].push_back(sample[static_cast<std::size_t>(j)]);
    if (j < F) {
      report.counts.push_back(
          summarize("X(" + std::to_string(j + 1) + ")", times, per_replicate, options.confidence));
      report.expected.push_back(n * to_double(density[j + 1]));
    } else if (!centrists.empty()) {
      report.centrist_total = summarize("X(centrist)", times, per_replicate, options.confidence);
      report.centrist_expected = n * to_double(rho_c(params, density));
    }
  }
  return report;
}

std::vector<std::vector<std::uint64_t>> count_edge_types(std::span<const Opinion> sequence, int opinions) {
  if (opinions < 1) throw std::invalid_argument("need at least one opinion");
  std::vector<std::vector<std::uint64_t>> counts(static_cast<std::size_t>(opinions),
                                                 std::vector<std::uint64_t>(static_cast<std::size_t>(opinions), 0));
  for (Opinion o : sequence)
    if (o < 1 || o > opinions) throw std::out_of_range("opinion outside 1..F");
  for (std::size_t x = 0; x + 1 < sequence.size(); ++x)
    ++counts[static_cast<std::size_t>(sequence[x] - 1)][static_cast<std::size_t>(sequence[x + 1] - 1)];
  return counts;
}

std::vector<LdPoint> ld_decay_curve(double p, double epsilon, const std::vector<int>& lengths,
                                    std::uint64_t replicates, std::uint64_t seed,
                                    const EstimatorOptions& options) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  require_replicates(replicates);
  for (int n : lengths)
    if (n < 1) throw std::invalid_argument("window lengths must be positive");

  // Z_N for every length, one independent sequence per length.
  const auto samples =
      run_replicates<std::vector<std::uint32_t>>(replicates, options.threads, [&](std::uint64_t i) {
        CounterRng rng(seed, i);
        std::vector<std::uint32_t> z;
        z.reserve(lengths.size());
        for (int n : lengths) {
          bool last = rng.uniform01() < p;
          std::uint32_t changes = 0;
          for (int j = 0; j < n; ++j) {
            const bool next = rng.uniform01() < p;
            changes += next != last;
            last = next;
          }
          z.push_back(changes);
        }
        return z;
      });

  std::vector<LdPoint> out;
  std::vector<double> column(replicates);
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const double n = lengths[k];
    const double mean = 2.0 * n * p * (1.0 - p);
    // Guard against epsilon * N landing one ulp above an integer.
    const double threshold = epsilon * n * (1.0 - 1e-12);
    LdPoint point;
    point.length = lengths[k];
    point.replicates = replicates;
    for (std::size_t r = 0; r < replicates; ++r) {
      column[r] = samples[r][k];
      point.deviations += std::abs(column[r] - mean) >= threshold;
    }
    point.probability = static_cast<double>(point.deviations) / static_cast<double>(replicates);
    point.censored = point.deviations == 0;
    point.log_probability = std::log(point.censored ? 1.0 / static_cast<double>(replicates) : point.probability);
    point.mean_changeovers = mean_estimate(column, options.confidence);
    out.push_back(point);
  }
  return out;
}

WindowWeightReport window_weight_sums(std::span<const int> xi, int theta) {
  const WeightFunction phi(theta);
  WindowWeightReport report;
  report.weights.reserve(xi.size());
  for (int v : xi) report.weights.push_back(phi(std::abs(v)));

  // min_{l <= r} (S_{r+1} - S_l) = S_{r+1} - max_{l <= r} S_l.
  std::int64_t prefix = 0;
  std::int64_t best_prefix = 0;
  for (std::size_t r = 0; r < report.weights.size(); ++r) {
    best_prefix = std::max(best_prefix, prefix);
    prefix += report.weights[r];
    const std::int64_t m = prefix - best_prefix;
    report.min_window_sum.push_back(m);
    report.overall_min = r == 0 ? m : std::min(report.overall_min, m);
  }
  report.any_nonpositive = report.weights.empty() || report.overall_min <= 0;
  return report;
}

WindowWeightReport window_weight_sums_from_opinions(std::span<const Opinion> opinions, int theta) {
  std::vector<int> xi;
  for (std::size_t x = 0; x + 1 < opinions.size(); ++x) xi.push_back(opinions[x + 1] - opinions[x]);
  return window_weight_sums(xi, theta);
}

double nonpositive_window_fraction(std::span<const int> weights, std::size_t length) {
  if (length == 0 || length > weights.size())
    throw std::invalid_argument("window length must lie in 1..number of weights");
  std::int64_t sum = std::accumulate(weights.begin(), weights.begin() + static_cast<std::ptrdiff_t>(length),
                                     std::int64_t{0});
  std::uint64_t hits = sum <= 0;
  for (std::size_t r = length; r < weights.size(); ++r) {
    sum += weights[r] - weights[r - length];
    hits += sum <= 0;
  }
  return static_cast<double>(hits) / static_cast<double>(weights.size() - length + 1);
}

DomainStats domain_length_stats(const Configuration& config) {
  const Graph& g = config.graph();
  if (!g.is_linear()) throw std::invalid_argument("domain lengths need a cycle or path");
  const int n = config.size();
  DomainStats stats;
  if (g.topology() == Topology::Cycle && is_consensus(config)) {
    stats.lengths.push_back(n);
  } else {
    int start = 0;
    if (g.topology() == Topology::Cycle)
      while (config[start] == config[(start + n - 1) % n]) ++start;
    int run = 0;
    for (int k = 0; k < n; ++k) {
      const int x = (start + k) % n;
      if (k > 0 && config[x] != config[(x + n - 1) % n]) {
        stats.lengths.push_back(run);
        run = 0;
      }
      ++run;
    }
    stats.lengths.push_back(run);
  }
  stats.max = *std::max_element(stats.lengths.begin(), stats.lengths.end());
  stats.mean = static_cast<double>(n) / static_cast<double>(stats.lengths.size());
  stats.histogram.assign(static_cast<std::size_t>(stats.max) + 1, 0);
  for (int len : stats.lengths) ++stats.histogram[static_cast<std::size_t>(len)];
  return stats;
}

std::vector<std::uint64_t> flip_counts(const RunResult& result) { return result.flips; }

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return (lower + upper) / 2.0;
}

TimeSeriesSummary flip_count_profile(const Params& params, const DensityVector& density, int cycle_size,
                                     const std::vector<double>& horizons, std::uint64_t replicates,
                                     std::uint64_t seed, const EstimatorOptions& options) {
  require_replicates(replicates);
  require_times(horizons);
  require_density(params, density);
  auto graph = std::make_shared<const Graph>(Graph::cycle(cycle_size));
  const Observer flips{"median_flips", horizons, [](const RunState& s) {
                         std::vector<double> f(s.flip_counts().begin(), s.flip_counts().end());
                         return std::vector<double>{median(std::move(f))};
                       }};
  const auto per_replicate =
      run_replicates<std::vector<double>>(replicates, options.threads, [&](std::uint64_t i) {
        RunState state = start_replicate(params, density, graph, seed, i);
        RunResult result = run(state, sampled_until(horizons, options.event_budget), {&flips, 1});
        require_full_series(result);
        std::vector<double> v;
        for (const auto& sample : result.series.front().values) v.push_back(sample.front());
        return v;
      });
  return summarize("median_flips", horizons, per_replicate, options.confidence);
}

} // namespace cvm
