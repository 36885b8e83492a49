#include "cvm/analytics.hpp"
#include "cvm/edge_particles.hpp"
#include "cvm/estimators.hpp"
#include "cvm/model.hpp"
#include "cvm/output.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cvm;

namespace {

py::object fraction(const Rational& value) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(to_fraction_string(value));
}

Rational rational(const py::handle& value) { return parse_rational(py::str(value).cast<std::string>()); }

DensityVector density_from(int F, const py::object& densities) {
  if (densities.is_none()) return DensityVector::uniform(F);
  std::vector<Rational> values;
  for (const auto& v : densities) values.push_back(rational(v));
  if (static_cast<int>(values.size()) != F) throw py::value_error("need one density per opinion");
  return DensityVector::from_values(std::move(values));
}

std::shared_ptr<const Graph> graph_from(const std::string& topology, int n) {
  switch (parse_topology(topology)) {
    case Topology::Cycle: return std::make_shared<const Graph>(Graph::cycle(n));
    case Topology::Path: return std::make_shared<const Graph>(Graph::path(n));
    case Topology::Complete: return std::make_shared<const Graph>(Graph::complete(n));
    default: throw py::value_error("topology must be cycle, path or complete");
  }
}

StopRule stop_from(const std::string& stop, double t_max) {
  if (stop == "horizon") return StopRule::until_time(t_max);
  StopRule rule = stop == "absorption" ? StopRule::until_absorption() : StopRule::until_consensus();
  if (stop != "absorption" && stop != "consensus") throw py::value_error("stop must be horizon, absorption or consensus");
  rule.horizon = t_max;
  return rule;
}

} // namespace

PYBIND11_MODULE(_cvm, m) {
  m.attr("__version__") = version_string();

  m.def("centrist_set", [](int F, int theta) { return centrist_set(Params(F, theta)); }, py::arg("F"), py::arg("theta"));

  m.def(
      "rho_c",
      [](int F, int theta, const py::object& densities) {
        return fraction(rho_c(Params(F, theta), density_from(F, densities)));
      },
      py::arg("F"), py::arg("theta"), py::arg("densities") = py::none());

  m.def(
      "is_absorbing",
      [](const std::vector<int>& opinions, int F, int theta, const std::string& topology) {
        const int n = static_cast<int>(opinions.size());
        return is_absorbing(Configuration(graph_from(topology, n), opinions, F), theta);
      },
      py::arg("opinions"), py::arg("F"), py::arg("theta"), py::arg("topology") = "cycle");

  m.def(
      "project_edges",
      [](const std::vector<int>& opinions, int F, int theta, const std::string& topology) {
        const int n = static_cast<int>(opinions.size());
        return project_edges(Configuration(graph_from(topology, n), opinions, F), theta).xi;
      },
      py::arg("opinions"), py::arg("F"), py::arg("theta"), py::arg("topology") = "cycle");

  m.def("count_changeovers", [](const std::vector<long long>& outcomes) {
    return count_changeovers<long long>(outcomes);
  });

  m.def("expected_phi_uniform", [](int F, int theta) { return fraction(expected_phi_uniform(Params(F, theta))); });

  m.def("fixation_margin", [](int F, int theta) {
    const auto r = fixation_margin_uniform(Params(F, theta));
    py::list terms;
    for (const auto& t : r.terms) terms.append(fraction(t));
    py::dict d;
    d["terms"] = terms;
    d["margin"] = fraction(r.margin);
    d["fixates"] = r.fixates();
    return d;
  });

  m.def("asymptotic_slope_roots", [] {
    const auto r = asymptotic_slope_roots();
    return py::make_tuple(r.c_minus.midpoint(), r.c_plus.midpoint());
  });

  m.def("polynomial_p", [](const py::object& x) { return fraction(polynomial_p(rational(x))); });

  m.def("root_p", [] {
    const auto r = root_p();
    return py::make_tuple(fraction(r.lower), fraction(r.upper));
  });

  m.def(
      "phase_diagram",
      [](int F_max) {
        py::list out;
        for (const auto& c : phase_diagram(F_max)) {
          py::dict d;
          d["F"] = c.opinions;
          d["theta"] = c.theta;
          d["phase"] = to_string(c.phase);
          d["margin"] = fraction(c.margin);
          out.append(d);
        }
        return out;
      },
      py::arg("F_max"));

  m.def(
      "simulate",
      [](int F, int theta, const std::vector<int>& opinions, const std::string& topology, double t_max,
         std::uint64_t seed, const std::string& stop) {
        const int n = static_cast<int>(opinions.size());
        RunState state(Configuration(graph_from(topology, n), opinions, F), Params(F, theta), CounterRng(seed, 0));
        const StopRule rule = stop_from(stop, t_max);
        const RunResult r = [&] {
          py::gil_scoped_release release;
          return run(state, rule);
        }();
        py::dict d;
        d["reason"] = to_string(r.reason);
        d["final_time"] = r.final_time;
        d["events"] = r.events;
        d["opinions"] = std::vector<int>(r.final_configuration.opinions().begin(), r.final_configuration.opinions().end());
        d["flips"] = r.flips;
        return d;
      },
      py::arg("F"), py::arg("theta"), py::arg("opinions"), py::arg("topology") = "cycle", py::arg("t_max") = 100.0,
      py::arg("seed") = 0, py::arg("stop") = "horizon");

  m.def(
      "estimate_consensus",
      [](int F, int theta, int size, std::uint64_t replicates, std::uint64_t seed, const std::string& topology,
         const py::object& densities, unsigned threads) {
        ConsensusReport r;
        const auto law = density_from(F, densities);
        const auto g = graph_from(topology, size);
        {
          py::gil_scoped_release release;
          r = estimate_consensus_probability(Params(F, theta), law, g, replicates, seed, EstimatorOptions{.threads = threads});
        }
        py::dict d;
        d["estimate"] = r.consensus.estimate;
        d["half_width"] = r.consensus.half_width;
        d["consensus"] = r.consensus_count;
        d["frozen"] = r.frozen_count;
        d["censored"] = r.censored_count;
        d["rho_c_bound"] = fraction(r.rho_c_bound);
        return d;
      },
      py::arg("F"), py::arg("theta"), py::arg("size"), py::arg("replicates"), py::arg("seed"),
      py::arg("topology") = "cycle", py::arg("densities") = py::none(), py::arg("threads") = 0);
}
