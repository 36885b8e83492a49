#pragma once

// Charged-particle edge process on cycles and paths.
//
// Edge e joins vertices e and e+1 and carries xi(e) = opinion(e+1) - opinion(e):
// a pile of |xi(e)| particles of charge sign(xi(e)). Piles of at most theta
// particles are active and hop when an arrow crosses them; larger piles are
// frozen blockades.

#include "cvm/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cvm {

enum class PileKind { Empty, Active, Blockade };

struct PileClass {
  PileKind kind = PileKind::Empty;
  int charge = 0;  // -1, 0 or +1
  int size = 0;

  friend bool operator==(const PileClass&, const PileClass&) = default;
};

PileClass classify_pile(int value, int theta) noexcept;

struct EdgeConfiguration {
  Topology topology = Topology::Cycle;
  std::vector<int> xi;
  int theta = 1;

  int vertex_count() const noexcept {
    return static_cast<int>(xi.size()) + (topology == Topology::Path ? 1 : 0);
  }

  friend bool operator==(const EdgeConfiguration&, const EdgeConfiguration&) = default;
};

/// Index of the edge joining x and y on a cycle or path with `vertices`
/// vertices, if they are nearest neighbors.
std::optional<int> edge_between(Topology topology, int vertices, int x, int y) noexcept;

/// Throws std::invalid_argument unless the graph is a cycle or path.
EdgeConfiguration project_edges(const Configuration& config, int theta);

/// Evolves xi through one arrow event without looking at opinions. The pile
/// on the crossed edge, when active, is added onto the edge beyond the target
/// (annihilating opposite charges) and the crossed edge empties. On a path a
/// pile pushed past an endpoint leaves the system.
EdgeConfiguration evolve_edges(EdgeConfiguration edges, const ArrowEvent& event);
void evolve_edges_in_place(EdgeConfiguration& edges, const ArrowEvent& event);

struct ParticleStats {
  std::int64_t total = 0;
  std::int64_t active = 0;
  std::int64_t frozen = 0;
  std::int64_t blockade_count = 0;
  std::int64_t occupied_edges = 0;
  double density = 0.0;  // total / edge count

  friend bool operator==(const ParticleStats&, const ParticleStats&) = default;
};

ParticleStats particle_stats(const EdgeConfiguration& edges);

/// 1 where the opinion is extremist (outside the centrist set), else 0.
std::vector<std::uint8_t> zeta_projection(const Configuration& config, const Params& params);

/// Forward ancestry: origin[x] is the initial vertex whose opinion x holds.
struct AncestryState {
  std::vector<int> origin;

  static AncestryState identity(int vertices);

  friend bool operator==(const AncestryState&, const AncestryState&) = default;
};

AncestryState ancestry_update(AncestryState state, const ArrowEvent& event, bool active);
void ancestry_update_in_place(AncestryState& state, const ArrowEvent& event, bool active);

/// Every nonempty descendant set {x : origin[x] = z} is a contiguous run of
/// vertices (cyclically contiguous on a cycle).
bool descendant_sets_are_intervals(const AncestryState& state, Topology topology);

} // namespace cvm
