// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include "cvm/analytics.hpp"
#include "cvm/edge_particles.hpp"
#include "cvm/estimators.hpp"
#include "cvm/model.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace cvm;

namespace {

// Fixed before the first run.
constexpr std::uint64_t kSeedConsensus = 2026101501;
constexpr std::uint64_t kSeedCoupling = 2026101502;
constexpr std::uint64_t kSeedMartingale = 2026101506;
constexpr std::uint64_t kSeedClustering = 2026101508;
constexpr std::uint64_t kSeedFixation = 2026101509;
constexpr std::uint64_t kSeedChangeovers = 2026101510;
constexpr std::uint64_t kSeedAncestry = 2026101511;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s  %-40s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::shared_ptr<const Graph> cycle_graph(int n) { return std::make_shared<const Graph>(Graph::cycle(n)); }

// Shared with the particle monotonicity criterion.
ConsensusReport consensus_report;
bool consensus_ran = false;
ParticleDensityReport clustering_report, fixation_report;
bool clustering_ran = false, fixation_ran = false;

Outcome consensus_lower_bound() {
  consensus_report = estimate_consensus_probability(Params(3, 1), DensityVector::uniform(3), cycle_graph(12), 20000,
                                                    kSeedConsensus);
  consensus_ran = true;
  const auto& r = consensus_report;
  const bool ok = r.consensus.upper() >= 1.0 / 3.0 && r.censored_count == 0;
  return {ok, "estimate " + fmt(r.consensus.estimate) + " +/- " + fmt(r.consensus.half_width) + ", bound 1/3, censored " +
                  std::to_string(r.censored_count)};
}

Outcome exact_coupling() {
  std::uint64_t events = 0;
  for (std::uint64_t run_index = 0; run_index < 1000; ++run_index) {
    CounterRng pick(kSeedCoupling, run_index);
    const int F = 2 + static_cast<int>(pick.below(5));
    const int theta = 1 + static_cast<int>(pick.below(4));
    const int n = 3 + static_cast<int>(pick.below(48));
    RunState s(sample_initial(cycle_graph(n), DensityVector::uniform(F), pick), Params(F, theta),
               CounterRng(kSeedCoupling + 1, run_index));
    EdgeConfiguration xi = project_edges(s.configuration(), theta);
    for (int i = 0; i < 10000; ++i) {
      ArrowEvent e = s.draw();
      s.apply(e);
      evolve_edges_in_place(xi, e);
      ++events;
      if (xi != project_edges(s.configuration(), theta))
        return {false, "mismatch in run " + std::to_string(run_index) + " at event " + std::to_string(i)};
    }
  }
  return {true, std::to_string(events) + " events compared exactly"};
}

Outcome formula_oracle() {
  std::uint64_t checked = 0, raw_only = 0;
  for (int F = 2; F <= 12; ++F)
    for (int theta = 1; theta < F; ++theta) {
      const Params p(F, theta);
      for (int k = 1; k <= 49; ++k) {
        Rational rho2(k, 100);
        rho2.canonicalize();
        const Rational rho1 = (1 - (F - 2) * rho2) / 2;
        std::vector<Rational> rho(static_cast<std::size_t>(F), rho2);
        rho.front() = rho1;
        rho.back() = rho1;
        const Rational pair_sum = oracle::pair_sum_expected_phi(theta, rho);
        if (weight_polynomial_q(p, rho1, rho2) / 3 != pair_sum)
          return {false, "Q mismatch at F=" + std::to_string(F) + " theta=" + std::to_string(theta)};
        if (F == 2 && k > 1) continue;  // the symmetric family is a single law
        if (F > 2 && rho1 <= 0) {
          ++raw_only;  // not a probability law; only the polynomial identity applies
          continue;
        }
        const auto sym = F == 2 ? SymmetricDensity::uniform(2) : SymmetricDensity::from_rho2(F, rho2);
        const auto law = sym.to_density();
        Rational by_types = 0;
        for (int j = 1; j < F; ++j) by_types += oracle::weight(j, theta) * edge_type_prob(p, law, j);
        const Rational phi = expected_phi(p, sym);
        if (phi != by_types || phi != oracle::pair_sum_expected_phi(theta, law.values()))
          return {false, "E phi mismatch at F=" + std::to_string(F) + " theta=" + std::to_string(theta) +
                             " rho2=" + std::to_string(k) + "/100"};
        ++checked;
      }
    }
  return {true, std::to_string(checked) + " laws exact, " + std::to_string(raw_only) +
                    " points with rho1 <= 0 checked through Q only"};
}

Outcome constants() {
  const auto roots = asymptotic_slope_roots();
  const double cm = roots.c_minus.midpoint(), cp = roots.c_plus.midpoint();
  const Rational tiny(mpz_class(1), mpz_class("1000000000000"));
  const auto rp = root_p();
  const Polynomial w = slope_polynomial_weight_only();
  const Polynomial s = slope_polynomial_with_contributions();
  const bool roots_ok = std::abs(cm - 0.20630) <= 5e-6 && std::abs(cp - 0.21851) <= 5e-6 &&
                        roots.c_minus.width() <= tiny && roots.c_plus.width() <= tiny &&
                        w(roots.c_minus.lower) > 0 && w(roots.c_minus.upper) < 0 && s(roots.c_plus.lower) > 0 &&
                        s(roots.c_plus.upper) < 0;
  Rational half(1, 2), probe(2134, 10000), minus(-57835, 8);
  probe.canonicalize();
  const bool p_ok = polynomial_p(Rational(0)) == 9000 && polynomial_p(half) == minus && polynomial_p(probe) > 0;
  const bool bracket_ok = rp.lower > probe && rp.upper < half && rp.width() <= tiny && polynomial_p(rp.lower) > 0 &&
                          polynomial_p(rp.upper) < 0;
  return {roots_ok && p_ok && bracket_ok, "c- " + fmt(cm) + ", c+ " + fmt(cp) + ", root of P in [" +
                                              fmt(to_double(rp.lower)) + ", " + fmt(to_double(rp.upper)) + "]"};
}

Outcome margin_decomposition() {
  int cells = 0;
  for (int F = 2; F <= 20; ++F)
    for (int theta = 1; theta < F; ++theta) {
      const Params p(F, theta);
      const auto m = fixation_margin_uniform(p);
      const Rational normalized = 36 * F * F * F * (expected_phi_uniform(p) + contribution_bounds_uniform(p).total());
      Rational sum = 0;
      for (const auto& t : m.terms) sum += t;
      if (m.margin != normalized || m.margin != sum || m.margin != oracle::uniform_margin(F, theta))
        return {false, "mismatch at F=" + std::to_string(F) + " theta=" + std::to_string(theta)};
      ++cells;
    }
  const Rational m4 = fixation_margin_uniform(Params(4, 1)).margin;
  const Rational m10 = fixation_margin_uniform(Params(10, 2)).margin;
  return {m4 == -264 && m10 == 9048, std::to_string(cells) + " cells; (4,1) margin " + to_fraction_string(m4) +
                                         ", (10,2) margin " + to_fraction_string(m10)};
}

Outcome martingale() {
  const auto r = martingale_check(Params(3, 1), DensityVector::uniform(3), std::make_shared<const Graph>(Graph::complete(10)),
                                  {0.0, 1.0, 5.0, 25.0}, 50000, kSeedMartingale);
  double worst = 0.0;
  for (std::size_t j = 0; j < r.counts.size(); ++j)
    for (std::size_t k = 0; k < r.counts[j].times.size(); ++k) {
      const auto e = r.counts[j].at(k);
      worst = std::max(worst, std::abs(e.estimate - r.expected[j]) / e.half_width);
    }
  return {r.within_ci(), "largest |mean - 10/3| / half-width " + fmt(worst)};
}

Outcome regime_contrast() {
  clustering_report = estimate_particle_density(Params(3, 1), DensityVector::uniform(3), 1000, {0.0, 2000.0}, 200,
                                                kSeedClustering);
  clustering_ran = true;
  fixation_report = estimate_particle_density(Params(4, 1), DensityVector::symmetric(4, Rational(9, 20), Rational(1, 20)),
                                              1000, {0.0, 2000.0}, 200, kSeedFixation);
  fixation_ran = true;
  const auto& i = clustering_report.interface_density;
  const auto& b = fixation_report.blockade_density;
  const double ri = i.mean[1] / i.mean[0], rb = b.mean[1] / b.mean[0];
  return {ri < 0.2 && rb > 0.5, "F=3 interface density " + fmt(i.mean[0]) + " -> " + fmt(i.mean[1]) + " (ratio " +
                                    fmt(ri) + " < 0.2); F=4 rho2=0.05 blockade density " + fmt(b.mean[0]) + " -> " +
                                    fmt(b.mean[1]) + " (ratio " + fmt(rb) + " > 0.5)"};
}

Outcome particle_monotonicity() {
  // An increase throws inside the estimators, which would have failed the
  // criteria above; here we confirm every event was actually checked.
  const bool ok = consensus_ran && clustering_ran && fixation_ran && consensus_report.particle_monotone_checked &&
                  consensus_report.particle_events_checked > 0 && clustering_report.events_checked > 0 &&
                  fixation_report.events_checked > 0;
  const std::uint64_t total = consensus_report.particle_events_checked + clustering_report.events_checked +
                              fixation_report.events_checked;
  return {ok, std::to_string(total) + " events checked, no increase"};
}

Outcome changeovers() {
  const auto pts = ld_decay_curve(0.5, 0.1, {100, 200, 400}, 100000, kSeedChangeovers);
  const bool mean_ok = pts[0].mean_changeovers.covers(50.0);
  const bool decreasing = pts[0].probability > pts[1].probability && pts[1].probability > pts[2].probability;
  const double exact = oracle::changeover_deviation_probability(100, 0.5, 0.1);
  const auto observed = proportion_estimate(pts[0].deviations, pts[0].replicates);
  return {mean_ok && decreasing && observed.covers(exact),
          "E Z_100 " + fmt(pts[0].mean_changeovers.estimate) + " +/- " + fmt(pts[0].mean_changeovers.half_width) +
              "; P(dev) " + fmt(pts[0].probability) + ", " + fmt(pts[1].probability) + ", " +
              fmt(pts[2].probability) + "; exact N=100 " + fmt(exact)};
}

Outcome exhaustive_absorption() {
  std::uint64_t configs = 0, mismatches = 0, frozen_fluct = 0, literal_violations = 0, dichotomy_violations = 0;
  std::string example;
  for (int n = 3; n <= 6; ++n) {
    auto g = cycle_graph(n);
    for (int F = 2; F <= 5; ++F)
      for (int theta = 1; theta < F; ++theta) {
        const Params p(F, theta);
        std::vector<Opinion> o(static_cast<std::size_t>(n), 1);
        while (true) {
          const Configuration c(g, o, F);
          ++configs;
          const bool absorbing = is_absorbing(c, theta);
          if (absorbing != oracle::cycle_is_frozen(o, theta)) ++mismatches;
          if (absorbing && p.fluctuation_regime()) {
            ++frozen_fluct;
            int centrists = 0;
            for (Opinion v : o) centrists += is_centrist(p, v) ? 1 : 0;
            if (!is_consensus(c)) {
              ++literal_violations;
              if (example.empty()) {
                std::ostringstream os;
                os << "F=" << F << " theta=" << theta << " cycle(" << n << ") (";
                for (std::size_t i = 0; i < o.size(); ++i) os << (i ? "," : "") << o[i];
                os << ")";
                example = os.str();
              }
            }
            if (!(centrists == 0 || (centrists == n && is_consensus(c)))) ++dichotomy_violations;
          }
          std::size_t k = 0;
          while (k < o.size() && o[k] == F) o[k++] = 1;
          if (k == o.size()) break;
          ++o[k];
        }
      }
  }
  std::string detail = std::to_string(configs) + " configurations; absorbing == no active discordant edge: " +
                       (mismatches == 0 ? "holds" : std::to_string(mismatches) + " mismatches") +
                       "; absorbing => consensus when F <= 2 theta + 1: " + std::to_string(literal_violations) +
                       " of " + std::to_string(frozen_fluct) + " absorbing states are not consensus";
  if (!example.empty()) detail += " (first: " + example + ")";
  detail += "; centrist dichotomy: " +
            (dichotomy_violations == 0 ? std::string("holds") : std::to_string(dichotomy_violations) + " violations");
  return {mismatches == 0 && literal_violations == 0 && dichotomy_violations == 0, detail};
}

Outcome ancestry() {
  std::uint64_t runs = 0, events = 0;
  auto check_run = [&](const Configuration& init, int F, int theta, CounterRng rng, int steps) -> bool {
    RunState s(init, Params(F, theta), std::move(rng));
    auto anc = AncestryState::identity(init.size());
    const Topology topology = init.graph().topology();
    for (int i = 0; i < steps; ++i) {
      const ArrowEvent e = s.step();
      ancestry_update_in_place(anc, e, e.active);
      ++events;
      if (!descendant_sets_are_intervals(anc, topology)) return false;
      for (int x = 0; x < init.size(); ++x)
        if (s.configuration()[x] != init[anc.origin[static_cast<std::size_t>(x)]]) return false;
    }
    ++runs;
    return true;
  };
  // path(5): every F = 3 configuration, cycled through 10^4 event sequences
  auto path5 = std::make_shared<const Graph>(Graph::path(5));
  for (std::uint64_t r = 0; r < 10000; ++r) {
    std::vector<Opinion> o(5);
    std::uint64_t code = r % 243;
    for (auto& v : o) {
      v = static_cast<Opinion>(code % 3) + 1;
      code /= 3;
    }
    if (!check_run(Configuration(path5, o, 3), 3, 1, CounterRng(kSeedAncestry, r), 200))
      return {false, "path(5) run " + std::to_string(r)};
  }
  auto cycle8 = cycle_graph(8);
  for (std::uint64_t r = 0; r < 10000; ++r) {
    CounterRng pick(kSeedAncestry + 1, r);
    const int F = 2 + static_cast<int>(pick.below(4));
    const int theta = 1 + static_cast<int>(pick.below(static_cast<std::uint64_t>(F - 1)));
    const auto init = sample_initial(cycle8, DensityVector::uniform(F), pick);
    if (!check_run(init, F, theta, CounterRng(kSeedAncestry + 2, r), 200))
      return {false, "cycle(8) run " + std::to_string(r)};
  }
  return {true, std::to_string(runs) + " runs, " + std::to_string(events) + " events"};
}

} // namespace

int main() {
  std::printf("threads: %u\n", resolve_threads(0));
  report("consensus lower bound", consensus_lower_bound);
  report("exact edge-process coupling", exact_coupling);
  report("expected weight formula vs oracle", formula_oracle);
  report("asymptotic and special constants", constants);
  report("fixation margin decomposition", margin_decomposition);
  report("opinion-count martingale", martingale);
  report("regime contrast at t=2000", regime_contrast);
  report("particle count never increases", particle_monotonicity);
  report("changeover statistics", changeovers);
  report("exhaustive small-cycle absorption", exhaustive_absorption);
  report("ancestry intervals and consistency", ancestry);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
