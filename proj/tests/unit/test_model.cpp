#include "cvm/model.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <memory>

using namespace cvm;

namespace {

std::shared_ptr<const Graph> cycle_ptr(int n) { return std::make_shared<const Graph>(Graph::cycle(n)); }

Configuration on_cycle(std::vector<Opinion> opinions, int F) {
  const int n = static_cast<int>(opinions.size());
  return Configuration(cycle_ptr(n), std::move(opinions), F);
}

Configuration on_path(std::vector<Opinion> opinions, int F) {
  const int n = static_cast<int>(opinions.size());
  return Configuration(std::make_shared<const Graph>(Graph::path(n)), std::move(opinions), F);
}

} // namespace

TEST_CASE("params validation and derived flags") {
  CHECK_THROWS_AS(Params(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(Params(3, 0), std::invalid_argument);
  CHECK(Params(2, 1).is_voter_reduction());
  CHECK(Params(4, 3).is_voter_reduction());
  CHECK_FALSE(Params(4, 2).is_voter_reduction());
  CHECK(Params(3, 1).fluctuation_regime());
  CHECK_FALSE(Params(4, 1).fluctuation_regime());
}

TEST_CASE("centrist set") {
  CHECK(centrist_set(Params(3, 1)) == std::vector<Opinion>{2});
  CHECK(centrist_set(Params(2, 1)) == std::vector<Opinion>{1, 2});
  CHECK(centrist_set(Params(4, 1)).empty());
  CHECK(centrist_set(Params(5, 2)) == std::vector<Opinion>{3});
  for (int F = 2; F <= 12; ++F)
    for (int t = 1; t < F + 2; ++t) {
      CAPTURE(F);
      CAPTURE(t);
      CHECK(centrist_set(Params(F, t)) == oracle::centrists_by_definition(F, t));
    }
}

TEST_CASE("rho_c") {
  CHECK(rho_c(Params(3, 1), DensityVector::uniform(3)) == Rational(1, 3));
  CHECK(rho_c(Params(5, 3), DensityVector::uniform(5)) == Rational(3, 5));
  CHECK(rho_c(Params(4, 1), DensityVector::uniform(4)) == 0);
  CHECK(rho_c(Params(4, 1), DensityVector::symmetric(4, Rational(9, 20), Rational(1, 20))) == 0);
}

TEST_CASE("density validation") {
  CHECK_THROWS_AS(DensityVector::from_values({Rational(1, 2), Rational(1, 3)}), std::invalid_argument);
  CHECK_THROWS_AS(DensityVector::from_values({Rational(3, 2), Rational(-1, 2)}), std::invalid_argument);
  const auto d = DensityVector::from_values({Rational(1, 2), Rational(1, 4), Rational(1, 4)});
  CHECK(d[1] == Rational(1, 2));
  CHECK(d.all_positive());
  CHECK_FALSE(DensityVector::point_mass(3, 2).all_positive());
  CHECK_THROWS(DensityVector::symmetric(4, Rational(1, 2), Rational(1, 4)));
}

TEST_CASE("graph construction") {
  const Graph c = Graph::cycle(5);
  CHECK(c.vertex_count() == 5);
  CHECK(c.edge_count() == 5);
  CHECK(Graph::path(2).edge_count() == 1);
  CHECK(Graph::complete(6).edge_count() == 15);
  CHECK_THROWS_AS(Graph::from_edges(4, {{0, 1}, {2, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}, {1, 0}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::path(1), std::invalid_argument);
  CHECK(c.adjacent(4, 0));
  CHECK_FALSE(c.adjacent(1, 3));
  for (std::size_t k = 0; k < c.arrow_count(); ++k) {
    const auto [x, y] = c.arrow(k);
    CHECK(c.adjacent(x, y));
  }
}

TEST_CASE("configuration rejects out-of-range opinions") {
  CHECK_THROWS_AS(on_cycle({1, 2, 4}, 3), std::invalid_argument);
  CHECK_THROWS_AS(on_cycle({0, 1, 1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(Configuration(cycle_ptr(4), {1, 1, 1}, 3), std::invalid_argument);
}

TEST_CASE("initial sampling") {
  CounterRng rng(5, 0);
  const auto point = sample_initial(cycle_ptr(50), DensityVector::point_mass(4, 1), rng);
  for (Opinion o : point.opinions()) CHECK(o == 1);

  const int n = 100000;
  CounterRng rng2(11, 0);
  const auto big = sample_initial(cycle_ptr(n), DensityVector::uniform(4), rng2);
  std::vector<int> counts(4, 0);
  for (Opinion o : big.opinions()) ++counts[static_cast<std::size_t>(o - 1)];
  const double sigma = std::sqrt(0.25 * 0.75 / n);
  for (int c : counts) CHECK(std::abs(static_cast<double>(c) / n - 0.25) < 5 * sigma);

  CounterRng a(77, 3), b(77, 3);
  CHECK(sample_initial(cycle_ptr(30), DensityVector::uniform(5), a) ==
        sample_initial(cycle_ptr(30), DensityVector::uniform(5), b));
}

TEST_CASE("arrow activity") {
  CHECK_FALSE(is_arrow_active(on_path({2, 4}, 4), 0, 1, 1));
  CHECK(is_arrow_active(on_path({3, 3}, 4), 0, 1, 1));
  CHECK_FALSE(is_arrow_active(on_path({1, 4}, 4), 0, 1, 2));
  CHECK(is_arrow_active(on_path({1, 4}, 4), 0, 1, 3));
  CHECK_THROWS_AS(is_arrow_active(on_path({1, 2, 3}, 3), 0, 2, 1), std::invalid_argument);

  CounterRng rng(3, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto c = sample_initial(cycle_ptr(9), DensityVector::uniform(6), rng);
    for (int x = 0; x < 9; ++x)
      for (int t = 1; t <= 5; ++t)
        CHECK(is_arrow_active(c, x, (x + 1) % 9, t) == is_arrow_active(c, (x + 1) % 9, x, t));
  }
}

TEST_CASE("apply arrow") {
  CHECK(apply_arrow(on_path({1, 2, 3, 1}, 4), 1, 2, 1).opinions()[2] == 2);
  const auto blocked = on_path({1, 2, 4, 1}, 4);
  CHECK(apply_arrow(blocked, 1, 2, 1) == blocked);
  const auto same = on_path({2, 2, 2}, 3);
  CHECK(apply_arrow(same, 0, 1, 1) == same);

  CounterRng rng(4, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto c = sample_initial(cycle_ptr(7), DensityVector::uniform(5), rng);
    const int x = static_cast<int>(rng.below(7));
    const int y = (x + 1) % 7;
    const auto after = apply_arrow(c, x, y, 2);
    for (int v = 0; v < 7; ++v)
      if (v != y) CHECK(after[v] == c[v]);
  }
}

TEST_CASE("absorbing and consensus predicates") {
  CHECK(is_absorbing(on_cycle({2, 2, 2, 2}, 4), 1));
  CHECK(is_absorbing(on_cycle({1, 3, 1, 3}, 4), 1));
  CHECK_FALSE(is_absorbing(on_cycle({1, 2, 3, 3}, 3), 1));
  CHECK(is_consensus(on_cycle({2, 2, 2}, 3)));
  CHECK_FALSE(is_consensus(on_cycle({1, 1, 2}, 3)));
  const std::vector<Opinion> single{4};
  CHECK(is_consensus(single));
}

TEST_CASE("absorbing states on small cycles split by centrist presence") {
  // With a nonempty centrist set an absorbing state is either a consensus or
  // has no centrist at all; frozen states made only of extremists do exist.
  CHECK(is_absorbing(on_cycle({1, 3, 1, 3}, 3), 1));
  CHECK_FALSE(is_consensus(on_cycle({1, 3, 1, 3}, 3)));
  for (int n = 3; n <= 6; ++n) {
    for (int F = 2; F <= 5; ++F) {
      for (int t = 1; t < F; ++t) {
        const Params p(F, t);
        std::vector<Opinion> o(static_cast<std::size_t>(n), 1);
        while (true) {
          const auto c = on_cycle(o, F);
          const bool frozen = is_absorbing(c, t);
          REQUIRE(frozen == oracle::cycle_is_frozen(o, t));
          if (frozen && p.fluctuation_regime()) {
            int centrists = 0;
            for (Opinion v : o) centrists += is_centrist(p, v);
            CHECK((centrists == 0 || (centrists == n && is_consensus(c))));
          }
          std::size_t k = 0;
          while (k < o.size() && o[k] == F) o[k++] = 1;
          if (k == o.size()) break;
          ++o[k];
        }
      }
    }
  }
}

TEST_CASE("step on a two-vertex complete graph waits 1/2 on average") {
  auto g = std::make_shared<const Graph>(Graph::complete(2));
  RunState s(Configuration(g, {1, 1}, 2), Params(2, 1), CounterRng(8, 0));
  const int n = 100000;
  double last = 0.0, sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto e = s.step();
    sum += e.time - last;
    last = e.time;
  }
  CHECK(std::abs(sum / n - 0.5) < 5 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("frozen and monochromatic states never change") {
  RunState frozen(on_cycle({1, 3, 1, 3}, 4), Params(4, 1), CounterRng(1, 0));
  RunState mono(on_cycle({2, 2, 2}, 3), Params(3, 1), CounterRng(1, 1));
  double last = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto e = frozen.step();
    CHECK_FALSE(e.changed);
    CHECK(e.time > last);
    last = e.time;
    CHECK_FALSE(mono.step().changed);
  }
  CHECK(frozen.configuration() == on_cycle({1, 3, 1, 3}, 4));
  CHECK(mono.configuration() == on_cycle({2, 2, 2}, 3));
}

TEST_CASE("incremental counters and flip counts match recomputation") {
  CounterRng seeder(21, 0);
  RunState s(sample_initial(cycle_ptr(40), DensityVector::uniform(6), seeder), Params(6, 2), CounterRng(21, 1));
  std::vector<std::uint64_t> flips(40, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto e = s.step();
    if (e.changed) ++flips[static_cast<std::size_t>(e.target)];
    if (i % 97 == 0) {
      std::size_t disc = 0, active = 0;
      const auto& c = s.configuration();
      for (const Edge& ed : c.graph().edges()) {
        const int gap = std::abs(c[ed.u] - c[ed.v]);
        disc += gap != 0;
        active += gap != 0 && gap <= 2;
      }
      REQUIRE(s.discordant_edges() == disc);
      REQUIRE(s.active_discordant_edges() == active);
      REQUIRE(s.absorbing() == is_absorbing(c, 2));
    }
  }
  CHECK(std::vector<std::uint64_t>(s.flip_counts().begin(), s.flip_counts().end()) == flips);
}

TEST_CASE("voter reduction is pathwise the multitype voter model") {
  CounterRng seeder(31, 0);
  const auto init = sample_initial(cycle_ptr(25), DensityVector::uniform(3), seeder);
  RunState s(init, Params(3, 2), CounterRng(31, 1));
  std::vector<Opinion> voter(init.opinions().begin(), init.opinions().end());
  for (int i = 0; i < 5000; ++i) {
    const auto e = s.step();
    CHECK(e.active);
    voter[static_cast<std::size_t>(e.target)] = voter[static_cast<std::size_t>(e.source)];
    REQUIRE(std::ranges::equal(voter, s.configuration().opinions()));
  }
}

TEST_CASE("run: two-vertex voter model ends in consensus") {
  auto g = std::make_shared<const Graph>(Graph::path(2));
  for (std::uint64_t i = 0; i < 100; ++i) {
    RunState s(Configuration(g, {1, 2}, 2), Params(2, 1), CounterRng(5, i));
    const RunResult r = run(s, StopRule::until_absorption());
    CHECK(r.reason == StopReason::Consensus);
    CHECK(is_consensus(r.final_configuration));
  }
}

TEST_CASE("run: already absorbed applies no event") {
  RunState s(on_cycle({1, 3, 1, 3}, 4), Params(4, 1), CounterRng(5, 0));
  const RunResult r = run(s, StopRule::until_absorption());
  CHECK(r.events == 0);
  CHECK(r.reason == StopReason::Absorbed);
}

TEST_CASE("run: budget exhaustion is reported distinctly") {
  CounterRng seeder(6, 0);
  RunState s(sample_initial(cycle_ptr(200), DensityVector::uniform(3), seeder), Params(3, 1), CounterRng(6, 1));
  StopRule stop = StopRule::until_absorption();
  stop.event_budget = 10;
  const RunResult r = run(s, stop);
  CHECK(r.reason == StopReason::BudgetExhausted);
  CHECK(r.events == 10);
}

TEST_CASE("run: deterministic given the seed, observers sample pre-event state") {
  auto make = [] {
    CounterRng seeder(12, 0);
    return RunState(sample_initial(cycle_ptr(30), DensityVector::uniform(4), seeder), Params(4, 2), CounterRng(12, 1));
  };
  const Observer obs{"first", {0.0, 0.5, 3.0, 10.0}, [](const RunState& s) {
                       return std::vector<double>{static_cast<double>(s.configuration()[0]),
                                                  static_cast<double>(s.discordant_edges())};
                     }};
  RunState a = make(), b = make();
  const RunResult ra = run(a, StopRule::until_time(10.0), {&obs, 1});
  const RunResult rb = run(b, StopRule::until_time(10.0), {&obs, 1});
  CHECK(ra == rb);
  REQUIRE(ra.series.front().values.size() == 4);
  RunState c = make();
  CHECK(ra.series.front().values.front()[0] == c.configuration()[0]);
  CHECK(ra.final_time == 10.0);
  CHECK(ra.reason == StopReason::Horizon);
}
