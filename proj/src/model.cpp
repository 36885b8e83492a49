#include "cvm/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace cvm {

Params::Params(int opinion_count, int confidence_threshold)
    : opinions(opinion_count), threshold(confidence_threshold) {
  if (opinions < 2) throw std::invalid_argument("F must be at least 2");
  if (threshold < 1) throw std::invalid_argument("theta must be at least 1");
}

bool is_centrist(const Params& params, Opinion opinion) {
  if (opinion < 1 || opinion > params.opinions) return false;
  // |i - j| <= theta for every i in 1..F: only the two extremes matter.
  return opinion - 1 <= params.threshold && params.opinions - opinion <= params.threshold;
}

std::vector<Opinion> centrist_set(const Params& params) {
  std::vector<Opinion> out;
  for (Opinion j = 1; j <= params.opinions; ++j)
    if (is_centrist(params, j)) out.push_back(j);
  return out;
}

DensityVector::DensityVector(std::vector<Rational> values) : rho_(std::move(values)) {
  if (rho_.size() < 2) throw std::invalid_argument("density needs at least two opinions");
  Rational total = 0;
  for (const auto& r : rho_) {
    if (r < 0) throw std::invalid_argument("density entries must be nonnegative");
    total += r;
  }
  if (total != 1)
    throw std::invalid_argument("density entries sum to " + to_fraction_string(total) +
                                ", not 1");
}

DensityVector DensityVector::uniform(int opinions) {
  if (opinions < 2) throw std::invalid_argument("density needs at least two opinions");
  return DensityVector(std::vector<Rational>(static_cast<std::size_t>(opinions),
                                             Rational(1, opinions)));
}

DensityVector DensityVector::symmetric(int opinions, const Rational& rho1, const Rational& rho2) {
  if (opinions < 2) throw std::invalid_argument("density needs at least two opinions");
  if (rho1 <= 0) throw std::invalid_argument("symmetric density needs rho1 > 0");
  std::vector<Rational> values(static_cast<std::size_t>(opinions), rho2);
  values.front() = rho1;
  values.back() = rho1;
  return DensityVector(std::move(values));
}

DensityVector DensityVector::point_mass(int opinions, Opinion opinion) {
  if (opinion < 1 || opinion > opinions) throw std::invalid_argument("opinion out of range");
  std::vector<Rational> values(static_cast<std::size_t>(opinions), Rational(0));
  values[static_cast<std::size_t>(opinion - 1)] = 1;
  return DensityVector(std::move(values));
}

DensityVector DensityVector::from_values(std::vector<Rational> values) {
  return DensityVector(std::move(values));
}

bool DensityVector::all_positive() const {
  return std::ranges::all_of(rho_, [](const Rational& r) { return r > 0; });
}

Rational rho_c(const Params& params, const DensityVector& density) {
  if (density.opinions() != params.opinions)
    throw std::invalid_argument("density length differs from F");
  Rational total = 0;
  for (Opinion j : centrist_set(params)) total += density[j];
  return total;
}

std::string to_string(Topology topology) {
  switch (topology) {
    case Topology::Cycle: return "cycle";
    case Topology::Path: return "path";
    case Topology::Complete: return "complete";
    case Topology::Custom: return "custom";
  }
  return "custom";
}

Topology parse_topology(std::string_view name) {
  if (name == "cycle" || name == "torus") return Topology::Cycle;
  if (name == "path") return Topology::Path;
  if (name == "complete") return Topology::Complete;
  if (name == "custom") return Topology::Custom;
  throw std::invalid_argument("unknown topology '" + std::string(name) + "'");
}

Graph::Graph(int vertices, std::vector<Edge> edges, Topology topology)
    : vertices_(vertices), edges_(std::move(edges)), topology_(topology) {
  if (vertices_ < 2) throw std::invalid_argument("graph needs at least two vertices");
  std::vector<std::size_t> degree(static_cast<std::size_t>(vertices_), 0);
  for (const Edge& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= vertices_ || e.v >= vertices_)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop at vertex " + std::to_string(e.u));
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
  }
  offsets_.assign(static_cast<std::size_t>(vertices_) + 1, 0);
  std::partial_sum(degree.begin(), degree.end(), offsets_.begin() + 1);
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[cursor[static_cast<std::size_t>(e.u)]++] = e.v;
    adjacency_[cursor[static_cast<std::size_t>(e.v)]++] = e.u;
  }
  for (int v = 0; v < vertices_; ++v) {
    auto begin = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(v)]);
    auto end = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(v) + 1]);
    std::sort(begin, end);
    if (std::adjacent_find(begin, end) != end)
      throw std::invalid_argument("duplicate edge at vertex " + std::to_string(v));
  }

  std::vector<char> seen(static_cast<std::size_t>(vertices_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : neighbors(v)) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != vertices_) throw std::invalid_argument("graph is disconnected");
}

Graph Graph::cycle(int vertices) {
  if (vertices < 3) throw std::invalid_argument("cycle needs at least three vertices");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(vertices));
  for (int e = 0; e < vertices; ++e) edges.push_back({e, (e + 1) % vertices});
  return Graph(vertices, std::move(edges), Topology::Cycle);
}

Graph Graph::path(int vertices) {
  std::vector<Edge> edges;
  for (int e = 0; e + 1 < vertices; ++e) edges.push_back({e, e + 1});
  return Graph(vertices, std::move(edges), Topology::Path);
}

Graph Graph::complete(int vertices) {
  std::vector<Edge> edges;
  for (int u = 0; u < vertices; ++u)
    for (int v = u + 1; v < vertices; ++v) edges.push_back({u, v});
  return Graph(vertices, std::move(edges), Topology::Complete);
}

Graph Graph::from_edges(int vertices, std::vector<Edge> edges) {
  return Graph(vertices, std::move(edges), Topology::Custom);
}

std::span<const int> Graph::neighbors(int vertex) const {
  const auto v = static_cast<std::size_t>(vertex);
  return std::span<const int>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

bool Graph::adjacent(int u, int v) const {
  if (u < 0 || v < 0 || u >= vertices_ || v >= vertices_) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::string Graph::describe() const {
  return to_string(topology_) + "(" + std::to_string(vertices_) + ")";
}

Configuration::Configuration(std::shared_ptr<const Graph> graph, std::vector<Opinion> opinions,
                             int opinion_count)
    : graph_(std::move(graph)), opinions_(std::move(opinions)), opinion_count_(opinion_count) {
  if (!graph_) throw std::invalid_argument("configuration needs a graph");
  if (static_cast<int>(opinions_.size()) != graph_->vertex_count())
    throw std::invalid_argument("configuration length differs from vertex count");
  for (Opinion o : opinions_)
    if (o < 1 || o > opinion_count_)
      throw std::invalid_argument("opinion " + std::to_string(o) + " outside 1.." +
                                  std::to_string(opinion_count_));
}

Configuration sample_initial(std::shared_ptr<const Graph> graph, const DensityVector& density,
                             CounterRng& rng) {
  const auto& rho = density.values();
  mpz_class common = 1;
  for (const auto& r : rho) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), r.get_den().get_mpz_t());

  const int n = graph->vertex_count();
  std::vector<Opinion> opinions(static_cast<std::size_t>(n));
  if (common.fits_ulong_p()) {
    const std::uint64_t denominator = common.get_ui();
    std::vector<std::uint64_t> cumulative;
    mpz_class running = 0;
    for (const auto& r : rho) {
      running += r.get_num() * (common / r.get_den());
      cumulative.push_back(running.get_ui());
    }
    for (auto& o : opinions) {
      const std::uint64_t u = rng.below(denominator);
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      o = static_cast<Opinion>(it - cumulative.begin()) + 1;
    }
  } else {
    std::vector<double> cumulative;
    double running = 0.0;
    for (const auto& r : rho) cumulative.push_back(running += to_double(r));
    cumulative.back() = 1.0;
    for (auto& o : opinions) {
      const double u = rng.uniform01();
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      o = static_cast<Opinion>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                         static_cast<std::ptrdiff_t>(rho.size()) - 1)) + 1;
    }
  }
  return Configuration(std::move(graph), std::move(opinions), density.opinions());
}

namespace {

void require_adjacent(const Configuration& config, int x, int y) {
  if (!config.graph().adjacent(x, y))
    throw std::invalid_argument("vertices " + std::to_string(x) + " and " + std::to_string(y) +
                                " are not adjacent");
}

} // namespace

bool is_arrow_active(const Configuration& config, int x, int y, int theta) {
  require_adjacent(config, x, y);
  return std::abs(config[x] - config[y]) <= theta;
}

Configuration apply_arrow(Configuration config, int x, int y, int theta) {
  if (is_arrow_active(config, x, y, theta)) config.set(y, config[x]);
  return config;
}

bool is_absorbing(const Configuration& config, int theta) {
  for (const Edge& e : config.graph().edges()) {
    const int gap = std::abs(config[e.u] - config[e.v]);
    if (gap != 0 && gap <= theta) return false;
  }
  return true;
}

bool is_consensus(std::span<const Opinion> opinions) noexcept {
  return std::ranges::adjacent_find(opinions, std::ranges::not_equal_to{}) == opinions.end();
}

bool is_consensus(const Configuration& config) noexcept { return is_consensus(config.opinions()); }

RunState::RunState(Configuration initial, Params params, CounterRng rng)
    : config_(std::move(initial)), params_(params), rng_(rng),
      flips_(static_cast<std::size_t>(config_.size()), 0) {
  if (config_.opinion_count() != params_.opinions)
    throw std::invalid_argument("configuration opinion count differs from F");
  for (const Edge& e : config_.graph().edges()) {
    const Opinion a = config_[e.u];
    const Opinion b = config_[e.v];
    if (a != b) ++discordant_;
    if (interacts(a, b)) ++active_discordant_;
  }
}

ArrowEvent RunState::draw() {
  const Graph& g = config_.graph();
  ArrowEvent event;
  event.time = time_ + rng_.exponential(static_cast<double>(g.arrow_count()));
  const auto [x, y] = g.arrow(rng_.below(g.arrow_count()));
  event.source = x;
  event.target = y;
  return event;
}

Opinion RunState::apply(ArrowEvent& event) {
  time_ = event.time;
  ++events_;
  const Opinion incoming = config_[event.source];
  const Opinion previous = config_[event.target];
  const int gap = incoming > previous ? incoming - previous : previous - incoming;
  event.active = gap <= params_.threshold;
  event.changed = event.active && gap != 0;
  if (!event.changed) return previous;

  for (int w : config_.graph().neighbors(event.target)) {
    const Opinion other = config_[w];
    discordant_ -= static_cast<std::size_t>(other != previous);
    discordant_ += static_cast<std::size_t>(other != incoming);
    active_discordant_ -= static_cast<std::size_t>(interacts(other, previous));
    active_discordant_ += static_cast<std::size_t>(interacts(other, incoming));
  }
  config_.set(event.target, incoming);
  ++flips_[static_cast<std::size_t>(event.target)];
  return previous;
}

ArrowEvent RunState::step() {
  ArrowEvent event = draw();
  apply(event);
  return event;
}

void RunState::advance_clock_to(double time) {
  if (time > time_) time_ = time;
}

ArrowEvent step(RunState& state) { return state.step(); }

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Horizon: return "horizon";
    case StopReason::Absorbed: return "absorbed";
    case StopReason::Consensus: return "consensus";
    case StopReason::BudgetExhausted: return "budget_exhausted";
  }
  return "horizon";
}

RunResult run(RunState& state, const StopRule& stop, std::span<const Observer> observers,
              const EventHook& hook) {
  std::vector<ObserverSeries> series;
  std::vector<std::size_t> next_sample(observers.size(), 0);
  series.reserve(observers.size());
  for (const Observer& o : observers) {
    if (!std::ranges::is_sorted(o.times))
      throw std::invalid_argument("observer '" + o.name + "' times must be ascending");
    series.push_back({o.name, {}, {}});
  }

  // Emit every pending sample with time <= limit from the current state.
  auto flush = [&](double limit) {
    for (std::size_t k = 0; k < observers.size(); ++k) {
      const Observer& o = observers[k];
      while (next_sample[k] < o.times.size() && o.times[next_sample[k]] <= limit) {
        series[k].times.push_back(o.times[next_sample[k]]);
        series[k].values.push_back(o.measure(state));
        ++next_sample[k];
      }
    }
  };

  const bool stop_when_frozen = stop.at_absorption || stop.at_consensus;
  StopReason reason = StopReason::Horizon;
  const std::uint64_t start_events = state.events();

  while (true) {
    if (stop_when_frozen && state.absorbing()) {
      reason = state.consensus() ? StopReason::Consensus : StopReason::Absorbed;
      flush(stop.horizon);
      break;
    }
    if (state.events() - start_events >= stop.event_budget) {
      reason = StopReason::BudgetExhausted;
      flush(state.time());
      break;
    }
    ArrowEvent event = state.draw();
    if (event.time > stop.horizon) {
      flush(stop.horizon);
      state.advance_clock_to(stop.horizon);
      reason = StopReason::Horizon;
      break;
    }
    flush(std::nextafter(event.time, -1.0));
    const Opinion previous = state.apply(event);
    if (hook) hook(event, state, previous);
  }

  return RunResult{reason,
                   state.time(),
                   state.events() - start_events,
                   state.configuration(),
                   std::vector<std::uint64_t>(state.flip_counts().begin(), state.flip_counts().end()),
                   std::move(series)};
}

} // namespace cvm
