#include "cvm/edge_particles.hpp"

#include <cstdlib>
#include <stdexcept>

namespace cvm {

PileClass classify_pile(int value, int theta) noexcept {
  if (value == 0) return {};
  const int size = std::abs(value);
  return {size <= theta ? PileKind::Active : PileKind::Blockade, value > 0 ? 1 : -1, size};
}

std::optional<int> edge_between(Topology topology, int vertices, int x, int y) noexcept {
  if (x < 0 || y < 0 || x >= vertices || y >= vertices || x == y) return std::nullopt;
  if (topology == Topology::Cycle) {
    if ((x + 1) % vertices == y) return x;
    if ((y + 1) % vertices == x) return y;
    return std::nullopt;
  }
  if (topology == Topology::Path && std::abs(x - y) == 1) return x < y ? x : y;
  return std::nullopt;
}

EdgeConfiguration project_edges(const Configuration& config, int theta) {
  const Graph& g = config.graph();
  if (!g.is_linear())
    throw std::invalid_argument("edge process needs a cycle or path, got " + g.describe());
  EdgeConfiguration out{g.topology(), {}, theta};
  out.xi.reserve(g.edge_count());
  for (const Edge& e : g.edges()) out.xi.push_back(config[e.v] - config[e.u]);
  return out;
}

namespace {

/// The edge incident to `vertex` other than `crossed`, if any.
std::optional<int> far_edge(const EdgeConfiguration& edges, int vertex, int crossed) {
  const int n = edges.vertex_count();
  if (edges.topology == Topology::Cycle) {
    const int left = (vertex + n - 1) % n;
    return left == crossed ? vertex : left;
  }
  const int left = vertex - 1;
  const int right = vertex;  // edge (vertex, vertex + 1)
  if (left == crossed) return right < n - 1 ? std::optional<int>(right) : std::nullopt;
  return left >= 0 ? std::optional<int>(left) : std::nullopt;
}

} // namespace

void evolve_edges_in_place(EdgeConfiguration& edges, const ArrowEvent& event) {
  const auto crossed = edge_between(edges.topology, edges.vertex_count(), event.source, event.target);
  if (!crossed) throw std::invalid_argument("arrow does not cross an edge of the edge process");
  int& pile = edges.xi[static_cast<std::size_t>(*crossed)];
  if (classify_pile(pile, edges.theta).kind != PileKind::Active) return;
  if (auto beyond = far_edge(edges, event.target, *crossed))
    edges.xi[static_cast<std::size_t>(*beyond)] += pile;
  pile = 0;
}

EdgeConfiguration evolve_edges(EdgeConfiguration edges, const ArrowEvent& event) {
  evolve_edges_in_place(edges, event);
  return edges;
}

ParticleStats particle_stats(const EdgeConfiguration& edges) {
  ParticleStats s;
  for (int value : edges.xi) {
    const PileClass c = classify_pile(value, edges.theta);
    s.total += c.size;
    if (c.kind == PileKind::Active) s.active += c.size;
    if (c.kind == PileKind::Blockade) {
      s.frozen += c.size;
      ++s.blockade_count;
    }
    if (c.kind != PileKind::Empty) ++s.occupied_edges;
  }
  s.density = edges.xi.empty() ? 0.0 : static_cast<double>(s.total) / static_cast<double>(edges.xi.size());
  return s;
}

std::vector<std::uint8_t> zeta_projection(const Configuration& config, const Params& params) {
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(config.size()));
  for (Opinion o : config.opinions()) out.push_back(is_centrist(params, o) ? 0 : 1);
  return out;
}

AncestryState AncestryState::identity(int vertices) {
  AncestryState s;
  s.origin.resize(static_cast<std::size_t>(vertices));
  for (int x = 0; x < vertices; ++x) s.origin[static_cast<std::size_t>(x)] = x;
  return s;
}

void ancestry_update_in_place(AncestryState& state, const ArrowEvent& event, bool active) {
  if (active)
    state.origin[static_cast<std::size_t>(event.target)] =
        state.origin[static_cast<std::size_t>(event.source)];
}

AncestryState ancestry_update(AncestryState state, const ArrowEvent& event, bool active) {
  ancestry_update_in_place(state, event, active);
  return state;
}

bool descendant_sets_are_intervals(const AncestryState& state, Topology topology) {
  const auto n = state.origin.size();
  if (n == 0) return true;
  // A run starts wherever the label differs from the left neighbor; an
  // interval contributes exactly one start (none if it covers the whole cycle).
  std::vector<int> starts(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    const int label = state.origin[x];
    if (label < 0 || static_cast<std::size_t>(label) >= n) return false;
    bool start;
    if (x == 0)
      start = topology == Topology::Cycle ? state.origin[n - 1] != label : true;
    else
      start = state.origin[x - 1] != label;
    if (start && ++starts[static_cast<std::size_t>(label)] > 1) return false;
  }
  return true;
}

} // namespace cvm
