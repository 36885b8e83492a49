#pragma once

// Constrained voter model: state types and the exact event-driven engine.
//
// Opinions are the integers 1..F. Every directed neighbor pair (x, y) carries
// an independent rate-one arrow clock; when the arrow x -> y fires and
// |opinion(x) - opinion(y)| <= theta, vertex y copies the opinion of x.
// The engine superposes all clocks into a single exponential clock of rate
// 2|E| and picks the firing arrow uniformly, which has the same law.

#include "cvm/rational.hpp"
#include "cvm/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cvm {

using Opinion = int;

struct Params {
  Params(int opinion_count, int confidence_threshold);

  int opinions;
  int threshold;

  /// F <= theta + 1: every pair of opinions interacts, plain multitype voter model.
  bool is_voter_reduction() const noexcept { return opinions <= threshold + 1; }
  /// F <= 2 theta + 1: the centrist set is nonempty.
  bool fluctuation_regime() const noexcept { return opinions <= 2 * threshold + 1; }

  friend bool operator==(const Params&, const Params&) = default;
};

/// Opinions within the threshold of every opinion, ascending.
std::vector<Opinion> centrist_set(const Params& params);
bool is_centrist(const Params& params, Opinion opinion);

/// Product-measure densities rho_1..rho_F, stored exactly.
class DensityVector {
 public:
  static DensityVector uniform(int opinions);
  /// rho_1 = rho_F = rho1 and rho_2 = ... = rho_{F-1} = rho2.
  static DensityVector symmetric(int opinions, const Rational& rho1, const Rational& rho2);
  static DensityVector point_mass(int opinions, Opinion opinion);
  /// Entries must be nonnegative and sum to exactly one.
  static DensityVector from_values(std::vector<Rational> values);

  int opinions() const noexcept { return static_cast<int>(rho_.size()); }
  /// 1-based, as opinions are.
  const Rational& operator[](Opinion opinion) const { return rho_.at(opinion - 1); }
  const std::vector<Rational>& values() const noexcept { return rho_; }

  /// Every opinion has positive density (the non-degenerate initial law).
  bool all_positive() const;

  friend bool operator==(const DensityVector&, const DensityVector&) = default;

 private:
  explicit DensityVector(std::vector<Rational> values);
  std::vector<Rational> rho_;
};

/// Total density of the centrist opinions; zero when the set is empty.
Rational rho_c(const Params& params, const DensityVector& density);

enum class Topology { Cycle, Path, Complete, Custom };

std::string to_string(Topology topology);
Topology parse_topology(std::string_view name);

struct Edge {
  int u;
  int v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Finite connected simple graph.
///
/// For cycles and paths edge e joins vertices e and e+1 (mod N on the cycle),
/// which fixes the left-to-right orientation used by the edge process.
class Graph {
 public:
  static Graph cycle(int vertices);
  static Graph path(int vertices);
  static Graph complete(int vertices);
  /// Throws std::invalid_argument on self-loops, duplicates, out-of-range
  /// endpoints, fewer than two vertices, or a disconnected edge set.
  static Graph from_edges(int vertices, std::vector<Edge> edges);

  int vertex_count() const noexcept { return vertices_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  Topology topology() const noexcept { return topology_; }
  bool is_linear() const noexcept {
    return topology_ == Topology::Cycle || topology_ == Topology::Path;
  }

  std::span<const int> neighbors(int vertex) const;
  bool adjacent(int u, int v) const;

  /// Number of directed arrows, 2|E|.
  std::size_t arrow_count() const noexcept { return 2 * edges_.size(); }
  /// Arrow 2k is u -> v of edge k, arrow 2k+1 is v -> u.
  std::pair<int, int> arrow(std::size_t index) const noexcept {
    const Edge& e = edges_[index >> 1];
    return (index & 1U) ? std::pair{e.v, e.u} : std::pair{e.u, e.v};
  }

  std::string describe() const;

 private:
  Graph(int vertices, std::vector<Edge> edges, Topology topology);

  int vertices_;
  std::vector<Edge> edges_;
  Topology topology_;
  std::vector<std::size_t> offsets_;
  std::vector<int> adjacency_;
};

class Configuration {
 public:
  /// Throws std::invalid_argument when a value lies outside 1..opinion_count
  /// or the length does not match the graph.
  Configuration(std::shared_ptr<const Graph> graph, std::vector<Opinion> opinions,
                int opinion_count);

  const Graph& graph() const noexcept { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const noexcept { return graph_; }
  int opinion_count() const noexcept { return opinion_count_; }
  std::span<const Opinion> opinions() const noexcept { return opinions_; }
  Opinion operator[](int vertex) const { return opinions_[static_cast<std::size_t>(vertex)]; }
  int size() const noexcept { return static_cast<int>(opinions_.size()); }

  /// Unchecked write; callers keep values in range.
  void set(int vertex, Opinion opinion) { opinions_[static_cast<std::size_t>(vertex)] = opinion; }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.opinion_count_ == b.opinion_count_ && a.opinions_ == b.opinions_ &&
           (a.graph_ == b.graph_ || (a.graph_->topology() == b.graph_->topology() &&
                                     std::ranges::equal(a.graph_->edges(), b.graph_->edges())));
  }

 private:
  std::shared_ptr<const Graph> graph_;
  std::vector<Opinion> opinions_;
  int opinion_count_;
};

/// I.i.d. opinions with law `density`. Sampling is exact: a uniform integer is
/// drawn below the common denominator of the densities.
Configuration sample_initial(std::shared_ptr<const Graph> graph, const DensityVector& density,
                             CounterRng& rng);

/// Throws std::invalid_argument if x and y are not adjacent.
bool is_arrow_active(const Configuration& config, int x, int y, int theta);

/// Arrow x -> y: y copies x when the arrow is active. Throws like is_arrow_active.
Configuration apply_arrow(Configuration config, int x, int y, int theta);

/// No edge joins two distinct opinions within the threshold.
bool is_absorbing(const Configuration& config, int theta);

bool is_consensus(std::span<const Opinion> opinions) noexcept;
bool is_consensus(const Configuration& config) noexcept;

struct ArrowEvent {
  double time = 0.0;
  int source = 0;
  int target = 0;
  bool active = false;
  /// The target's opinion actually changed (active and discordant).
  bool changed = false;

  friend bool operator==(const ArrowEvent&, const ArrowEvent&) = default;
};

/// Mutable single-replicate state. Move it between threads, never share it.
class RunState {
 public:
  RunState(Configuration initial, Params params, CounterRng rng);

  const Configuration& configuration() const noexcept { return config_; }
  const Params& params() const noexcept { return params_; }
  double time() const noexcept { return time_; }
  std::uint64_t events() const noexcept { return events_; }
  std::span<const std::uint64_t> flip_counts() const noexcept { return flips_; }

  /// Edges whose endpoints differ (interfaces).
  std::size_t discordant_edges() const noexcept { return discordant_; }
  /// Edges whose endpoints differ by at most theta; zero iff absorbing.
  std::size_t active_discordant_edges() const noexcept { return active_discordant_; }
  bool absorbing() const noexcept { return active_discordant_ == 0; }
  bool consensus() const noexcept { return discordant_ == 0; }

  /// One uniformized Gillespie step.
  ArrowEvent step();

  /// Draws the next event without applying it; pair with apply().
  ArrowEvent draw();
  /// Applies a drawn event. Returns the target's previous opinion.
  Opinion apply(ArrowEvent& event);

  /// Horizon handling: set the clock without an event (never backwards).
  void advance_clock_to(double time);

 private:
  bool interacts(Opinion a, Opinion b) const noexcept {
    const int gap = a > b ? a - b : b - a;
    return gap != 0 && gap <= params_.threshold;
  }

  Configuration config_;
  Params params_;
  CounterRng rng_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  std::vector<std::uint64_t> flips_;
  std::size_t discordant_ = 0;
  std::size_t active_discordant_ = 0;
};

ArrowEvent step(RunState& state);

enum class StopReason { Horizon, Absorbed, Consensus, BudgetExhausted };

std::string to_string(StopReason reason);

struct StopRule {
  double horizon = std::numeric_limits<double>::infinity();
  bool at_absorption = false;
  bool at_consensus = false;
  std::uint64_t event_budget = 1'000'000'000ULL;

  static StopRule until_time(double t_max) { return StopRule{.horizon = t_max}; }
  static StopRule until_absorption() { return StopRule{.at_absorption = true}; }
  static StopRule until_consensus() { return StopRule{.at_consensus = true}; }
};

/// Samples `measure` at each of `times` (ascending). The value at time s
/// reflects every event with time <= s. Once the run is absorbed the state is
/// frozen, so the remaining sample times are filled from the final state.
struct Observer {
  std::string name;
  std::vector<double> times;
  std::function<std::vector<double>(const RunState&)> measure;
};

struct ObserverSeries {
  std::string name;
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  friend bool operator==(const ObserverSeries&, const ObserverSeries&) = default;
};

/// Called after every applied event with the target's previous opinion.
using EventHook = std::function<void(const ArrowEvent&, const RunState&, Opinion previous)>;

struct RunResult {
  StopReason reason = StopReason::Horizon;
  double final_time = 0.0;
  std::uint64_t events = 0;
  Configuration final_configuration;
  std::vector<std::uint64_t> flips;
  std::vector<ObserverSeries> series;

  bool absorbed() const noexcept {
    return reason == StopReason::Absorbed || reason == StopReason::Consensus;
  }

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

RunResult run(RunState& state, const StopRule& stop, std::span<const Observer> observers = {},
              const EventHook& hook = {});

} // namespace cvm
