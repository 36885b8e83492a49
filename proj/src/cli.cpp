#include "cvm/cli.hpp"

#include "cvm/analytics.hpp"
#include "cvm/config.hpp"
#include "cvm/estimators.hpp"
#include "cvm/output.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <ostream>

namespace cvm {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  std::optional<int> opinions;
  std::optional<int> theta;
  std::optional<int> f_max;
};

void add_common(CLI::App& sub, CommonFlags& flags) {
  sub.add_option("--config", flags.config_path, "Run configuration file");
  sub.add_option("--set", flags.overrides, "Override a key: section.key=value")->take_all();
  sub.add_option("--seed", flags.seed, "Master seed");
  sub.add_option("--out", flags.out_dir, "Output directory");
  sub.add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
  sub.add_option("--F", flags.opinions, "Number of opinions");
  sub.add_option("--theta", flags.theta, "Confidence threshold");
}

RunConfig build_config(const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) config = load_config_file(flags.config_path);
  for (const auto& o : flags.overrides) apply_override(config, o);
  if (flags.opinions) apply_setting(config, "model.F", std::to_string(*flags.opinions));
  if (flags.theta) apply_setting(config, "model.theta", std::to_string(*flags.theta));
  if (flags.seed) apply_setting(config, "run.seed", std::to_string(*flags.seed));
  if (flags.out_dir) apply_setting(config, "output.directory", *flags.out_dir);
  if (flags.threads) apply_setting(config, "run.threads", std::to_string(*flags.threads));
  return config;
}

fs::path prepare_output(const RunConfig& config) {
  fs::path dir = config.output_directory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

EstimatorOptions estimator_options(const RunConfig& config) {
  EstimatorOptions o;
  o.threads = config.threads;
  o.event_budget = config.event_budget;
  return o;
}

void require_cycle(const RunConfig& config, const std::string& command) {
  if (config.topology != Topology::Cycle)
    throw ConfigError("graph.topology", command + " needs graph.topology = cycle");
}

bool wants(const RunConfig& config, const std::string& format) {
  return std::find(config.formats.begin(), config.formats.end(), format) != config.formats.end();
}

void finish(const fs::path& dir, const RunConfig& config, const std::string& command,
            std::optional<std::uint64_t> seed, std::vector<std::string> artifacts, std::ostream& out) {
  write_manifest(dir, config, {command, seed, artifacts});
  for (const auto& a : artifacts) out << "wrote " << (dir / a).string() << '\n';
  out << "wrote " << (dir / "manifest.json").string() << '\n';
}

// ---- subcommands ----

void cmd_simulate(const RunConfig& config, std::ostream& out) {
  config.validate();
  const std::uint64_t seed = config.require_seed();
  const Params params = config.params();
  const DensityVector density = config.density();
  const auto graph = config.graph();
  const auto times = config.sample_times();
  const int theta = params.threshold;
  for (const auto& q : config.quantities)
    if ((q == "mean_abs_xi" || q == "blockade_density") && !graph->is_linear())
      throw ConfigError("observers.quantities", q + " needs a cycle or path");

  std::vector<std::string> names;
  for (const auto& q : config.quantities) {
    if (q == "opinion_counts")
      for (int j = 1; j <= params.opinions; ++j) names.push_back("X(" + std::to_string(j) + ")");
    else
      names.push_back(q);
  }
  const Observer observer{"quantities", times, [&](const RunState& s) {
                            std::vector<double> v;
                            const double m = static_cast<double>(s.configuration().graph().edge_count());
                            for (const auto& q : config.quantities) {
                              if (q == "interface_density") {
                                v.push_back(static_cast<double>(s.discordant_edges()) / m);
                              } else if (q == "active_interface_density") {
                                v.push_back(static_cast<double>(s.active_discordant_edges()) / m);
                              } else if (q == "opinion_counts") {
                                std::vector<double> c(static_cast<std::size_t>(params.opinions), 0.0);
                                for (Opinion o : s.configuration().opinions()) c[static_cast<std::size_t>(o - 1)] += 1;
                                v.insert(v.end(), c.begin(), c.end());
                              } else {
                                const ParticleStats st = particle_stats(project_edges(s.configuration(), theta));
                                v.push_back(q == "mean_abs_xi" ? st.density
                                                               : static_cast<double>(st.blockade_count) / m);
                              }
                            }
                            return v;
                          }};

  StopRule stop = StopRule::until_time(config.t_max);
  stop.at_absorption = config.stop == StopMode::Absorption;
  stop.at_consensus = config.stop == StopMode::Consensus;
  stop.event_budget = config.event_budget;
  if (config.stop == StopMode::Consensus) stop.at_absorption = false;

  struct Replicate {
    StopReason reason;
    double time;
    std::uint64_t events;
    std::vector<std::vector<double>> samples;
  };
  const auto reps = run_replicates<Replicate>(config.replicates, config.threads, [&](std::uint64_t i) {
    CounterRng rng(seed, i);
    Configuration initial = sample_initial(graph, density, rng);
    RunState state(std::move(initial), params, rng);
    RunResult r = run(state, stop, {&observer, 1});
    return Replicate{r.reason, r.final_time, r.events, std::move(r.series.front().values)};
  });

  const fs::path dir = prepare_output(config);
  CsvWriter runs(dir / "runs.csv", {"replicate", "stop_reason", "final_time", "events"});
  for (std::size_t i = 0; i < reps.size(); ++i)
    runs.row({CsvWriter::cell(std::uint64_t{i}), to_string(reps[i].reason), CsvWriter::cell(reps[i].time),
              CsvWriter::cell(reps[i].events)});
  runs.close();

  CsvWriter series(dir / "timeseries.csv", {"time", "quantity", "mean", "ci_half_width", "samples"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t q = 0; q < names.size(); ++q) {
      std::vector<double> column;
      for (const auto& r : reps)
        if (k < r.samples.size()) column.push_back(r.samples[k][q]);
      if (column.empty()) continue;
      const EstimateWithCI e = mean_estimate(column);
      series.row({CsvWriter::cell(times[k]), names[q], CsvWriter::cell(e.estimate), CsvWriter::cell(e.half_width),
                  CsvWriter::cell(std::uint64_t{column.size()})});
    }
  }
  series.close();
  finish(dir, config, "simulate", seed, {"runs.csv", "timeseries.csv"}, out);
}

void cmd_consensus(const RunConfig& config, std::ostream& out) {
  config.validate();
  const std::uint64_t seed = config.require_seed();
  const Params params = config.params();
  const auto graph = config.graph();
  const ConsensusReport r = estimate_consensus_probability(params, config.density(), graph, config.replicates, seed,
                                                           estimator_options(config));
  const fs::path dir = prepare_output(config);
  CsvWriter csv(dir / "consensus.csv", {"F", "theta", "graph", "N", "replicates", "consensus_rate",
                                        "ci_half_width", "rho_c_bound", "censored"});
  csv.row({CsvWriter::cell(params.opinions), CsvWriter::cell(params.threshold), to_string(graph->topology()),
           CsvWriter::cell(graph->vertex_count()), CsvWriter::cell(r.replicates), CsvWriter::cell(r.consensus.estimate),
           CsvWriter::cell(r.consensus.half_width), CsvWriter::cell(r.rho_c_bound), CsvWriter::cell(r.censored_count)});
  csv.close();
  out << "consensus " << format_real(r.consensus.estimate) << " +/- " << format_real(r.consensus.half_width)
      << " (rho_c " << to_fraction_string(r.rho_c_bound) << ", frozen " << r.frozen_count << ", censored "
      << r.censored_count << ")\n";
  finish(dir, config, "consensus", seed, {"consensus.csv"}, out);
}

void write_particle_csv(const fs::path& path, const ParticleDensityReport& p) {
  CsvWriter csv(path, {"time", "mean_abs_xi", "mean_abs_xi_ci", "interface_density", "interface_density_ci",
                       "blockade_density", "blockade_density_ci"});
  for (std::size_t k = 0; k < p.mean_abs_xi.times.size(); ++k)
    csv.row({CsvWriter::cell(p.mean_abs_xi.times[k]), CsvWriter::cell(p.mean_abs_xi.mean[k]),
             CsvWriter::cell(p.mean_abs_xi.half_width[k]), CsvWriter::cell(p.interface_density.mean[k]),
             CsvWriter::cell(p.interface_density.half_width[k]), CsvWriter::cell(p.blockade_density.mean[k]),
             CsvWriter::cell(p.blockade_density.half_width[k])});
  csv.close();
}

void cmd_cluster(const RunConfig& config, std::ostream& out) {
  config.validate();
  require_cycle(config, "cluster");
  const std::uint64_t seed = config.require_seed();
  const Params params = config.params();
  const DensityVector density = config.density();
  const auto times = config.sample_times();
  const auto agreement = estimate_pair_agreement(params, density, config.graph_size, config.pairs, times,
                                                 config.replicates, seed, estimator_options(config));
  const auto particles = estimate_particle_density(params, density, config.graph_size, times, config.replicates,
                                                   seed, estimator_options(config));
  const fs::path dir = prepare_output(config);
  CsvWriter csv(dir / "agreement.csv", {"time", "x", "y", "agreement", "ci_half_width", "replicates"});
  for (std::size_t p = 0; p < config.pairs.size(); ++p)
    for (std::size_t k = 0; k < times.size(); ++k)
      csv.row({CsvWriter::cell(times[k]), CsvWriter::cell(config.pairs[p].first),
               CsvWriter::cell(config.pairs[p].second), CsvWriter::cell(agreement[p].mean[k]),
               CsvWriter::cell(agreement[p].half_width[k]), CsvWriter::cell(agreement[p].replicates)});
  csv.close();
  write_particle_csv(dir / "particles.csv", particles);
  finish(dir, config, "cluster", seed, {"agreement.csv", "particles.csv"}, out);
}

void cmd_fixation(const RunConfig& config, std::ostream& out) {
  config.validate();
  require_cycle(config, "fixation");
  const std::uint64_t seed = config.require_seed();
  const Params params = config.params();
  const DensityVector density = config.density();
  const auto times = config.sample_times();
  const auto flips = flip_count_profile(params, density, config.graph_size, times, config.replicates, seed,
                                        estimator_options(config));
  const auto particles = estimate_particle_density(params, density, config.graph_size, times, config.replicates,
                                                   seed, estimator_options(config));
  const fs::path dir = prepare_output(config);
  // Finite-horizon flip counts only hint at fixation; the column name says so.
  CsvWriter csv(dir / "fixation.csv", {"time", "median_flips_proxy", "median_flips_ci", "blockade_density",
                                       "blockade_density_ci", "replicates"});
  for (std::size_t k = 0; k < times.size(); ++k)
    csv.row({CsvWriter::cell(times[k]), CsvWriter::cell(flips.mean[k]), CsvWriter::cell(flips.half_width[k]),
             CsvWriter::cell(particles.blockade_density.mean[k]),
             CsvWriter::cell(particles.blockade_density.half_width[k]), CsvWriter::cell(flips.replicates)});
  csv.close();
  write_particle_csv(dir / "particles.csv", particles);
  finish(dir, config, "fixation", seed, {"fixation.csv", "particles.csv"}, out);
}

void cmd_ld_check(const RunConfig& config, std::ostream& out) {
  if (config.replicates == 0) throw ConfigError("run.replicates", "run.replicates must be positive");
  if (!(config.ld_p > 0.0 && config.ld_p < 1.0)) throw ConfigError("ld.p", "ld.p must lie in (0, 1)");
  if (!(config.ld_epsilon > 0.0)) throw ConfigError("ld.epsilon", "ld.epsilon must be positive");
  if (config.ld_lengths.empty()) throw ConfigError("ld.lengths", "ld.lengths must not be empty");
  for (int n : config.ld_lengths)
    if (n < 1) throw ConfigError("ld.lengths", "ld.lengths must be positive");
  const std::uint64_t seed = config.require_seed();
  const auto curve = ld_decay_curve(config.ld_p, config.ld_epsilon, config.ld_lengths, config.replicates, seed,
                                    estimator_options(config));
  const fs::path dir = prepare_output(config);
  CsvWriter csv(dir / "ld.csv", {"N", "p", "epsilon", "deviations", "replicates", "probability", "log_probability",
                                 "censored", "mean_changeovers", "ci_half_width", "expected_changeovers"});
  for (const auto& pt : curve)
    csv.row({CsvWriter::cell(pt.length), CsvWriter::cell(config.ld_p), CsvWriter::cell(config.ld_epsilon),
             CsvWriter::cell(pt.deviations), CsvWriter::cell(pt.replicates), CsvWriter::cell(pt.probability),
             CsvWriter::cell(pt.log_probability), pt.censored ? "1" : "0",
             CsvWriter::cell(pt.mean_changeovers.estimate), CsvWriter::cell(pt.mean_changeovers.half_width),
             CsvWriter::cell(2.0 * pt.length * config.ld_p * (1.0 - config.ld_p))});
  csv.close();
  finish(dir, config, "ld-check", seed, {"ld.csv"}, out);
}

void cmd_analytics(const RunConfig& config, std::ostream& out) {
  Params params(3, 1);
  try {
    params = config.params();
  } catch (const std::exception& e) {
    throw ConfigError("model", std::string("invalid model: ") + e.what());
  }
  const DensityVector uniform = DensityVector::uniform(params.opinions);
  const ContributionBounds derived = contribution_bounds_uniform(params, BlockadeFormationBound::Derived);
  const ContributionBounds stated = contribution_bounds_uniform(params, BlockadeFormationBound::Stated);
  const FixationMargin margin = fixation_margin_uniform(params);
  const Polynomial phi = expected_phi_in_rho2(params);

  std::vector<std::pair<std::string, Rational>> rows{
      {"rho_c_bound", rho_c(params, uniform)},
      {"expected_phi_uniform", expected_phi_uniform(params)},
      {"f_annihilation", derived.annihilation},
      {"f_blockade_formation", derived.blockade_formation},
      {"f_blockade_formation_stated", stated.blockade_formation},
      {"f_blockade_increase", derived.blockade_increase},
      {"margin_weight", margin.terms[0]},
      {"margin_annihilation", margin.terms[1]},
      {"margin_formation", margin.terms[2]},
      {"margin_increase", margin.terms[3]},
      {"fixation_margin", margin.margin},
  };
  for (int k = 0; k <= std::max(phi.degree(), 0); ++k)
    rows.emplace_back("expected_phi_rho2_coeff_" + std::to_string(k), phi.coefficient(k));

  const fs::path dir = prepare_output(config);
  CsvWriter csv(dir / "analytics.csv", {"F", "theta", "quantity", "value", "exact"});
  for (const auto& [name, value] : rows) {
    csv.row({CsvWriter::cell(params.opinions), CsvWriter::cell(params.threshold), name,
             CsvWriter::cell(to_double(value)), CsvWriter::cell(value)});
    out << name << " = " << to_fraction_string(value) << '\n';
  }
  const Phase phase = params.fluctuation_regime() ? Phase::Fluctuation
                      : margin.fixates()          ? Phase::FixationProved
                                                  : Phase::Unresolved;
  csv.row({CsvWriter::cell(params.opinions), CsvWriter::cell(params.threshold), "phase", to_string(phase), ""});
  csv.close();
  out << "expected_phi(rho2) = " << phi.to_string("rho2") << '\n' << "phase = " << to_string(phase) << '\n';
  finish(dir, config, "analytics", std::nullopt, {"analytics.csv"}, out);
}

void cmd_phase_diagram(const RunConfig& config, int f_max, std::ostream& out) {
  if (f_max < 2) throw ConfigError("F-max", "--F-max must be at least 2");
  const auto cells = phase_diagram(f_max);
  const fs::path dir = prepare_output(config);
  CsvWriter csv(dir / "phase_diagram.csv", {"F", "theta", "phase", "margin", "margin_decimal"});
  for (const auto& c : cells)
    csv.row({CsvWriter::cell(c.opinions), CsvWriter::cell(c.theta), to_string(c.phase), CsvWriter::cell(c.margin),
             CsvWriter::cell(to_double(c.margin))});
  csv.close();
  write_ppm(dir / "phase_diagram.ppm", render_phase_diagram(cells));
  finish(dir, config, "phase-diagram", std::nullopt, {"phase_diagram.csv", "phase_diagram.ppm"}, out);
}

void cmd_spacetime(const RunConfig& config, std::ostream& out) {
  config.validate();
  require_cycle(config, "spacetime");
  const std::uint64_t seed = config.require_seed();
  const Params params = config.params();
  const auto trajectory =
      sample_spacetime(params, config.density(), config.graph_size, config.t_max, config.spacetime_rows, seed);
  const fs::path dir = prepare_output(config);
  std::vector<std::string> artifacts{"spacetime.ppm", "spacetime_interfaces.ppm"};
  write_ppm(dir / artifacts[0], render_spacetime(trajectory, config.spacetime_interfaces));
  write_ppm(dir / artifacts[1], render_spacetime(trajectory, true));
  if (wants(config, "csv")) {
    artifacts.emplace_back("spacetime.csv");
    CsvWriter csv(dir / artifacts.back(), {"row", "time", "interfaces"});
    const int n = config.graph_size;
    for (std::size_t k = 0; k < trajectory.rows.size(); ++k) {
      const auto& row = trajectory.rows[k];
      int interfaces = 0;
      for (int x = 0; x < n; ++x)
        interfaces += row[static_cast<std::size_t>(x)] != row[static_cast<std::size_t>((x + 1) % n)];
      csv.row({CsvWriter::cell(std::uint64_t{k}), CsvWriter::cell(trajectory.times[k]), CsvWriter::cell(interfaces)});
    }
    csv.close();
  }
  finish(dir, config, "spacetime", seed, artifacts, out);
}

void report_error(std::ostream& err, const std::string& type, const std::string& message, const std::string& key = {}) {
  nlohmann::ordered_json j;
  j["error"]["type"] = type;
  if (!key.empty()) j["error"]["key"] = key;
  j["error"]["message"] = message;
  err << j.dump() << '\n';
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained voter model simulator and analytics", "cvm"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  CommonFlags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "Run replicates and record observer time series"},
      {"consensus", "Estimate the consensus probability"},
      {"cluster", "Pair agreement and edge-particle density over time"},
      {"fixation", "Flip-count and blockade-density fixation proxies"},
      {"ld-check", "Changeover large-deviation decay"},
      {"analytics", "Exact closed-form quantities for one (F, theta)"},
      {"phase-diagram", "Classify every (F, theta) up to --F-max"},
      {"spacetime", "Render a space-time diagram of one cycle run"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(*sub, flags);
    if (name == "phase-diagram") sub->add_option("--F-max", flags.f_max, "Largest number of opinions");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitUsageError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig config = build_config(flags);
    if (command == "simulate") cmd_simulate(config, out);
    else if (command == "consensus") cmd_consensus(config, out);
    else if (command == "cluster") cmd_cluster(config, out);
    else if (command == "fixation") cmd_fixation(config, out);
    else if (command == "ld-check") cmd_ld_check(config, out);
    else if (command == "analytics") cmd_analytics(config, out);
    else if (command == "phase-diagram") cmd_phase_diagram(config, flags.f_max.value_or(20), out);
    else if (command == "spacetime") cmd_spacetime(config, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    report_error(err, "config", e.what(), e.key());
    return kExitUsageError;
  } catch (const std::exception& e) {
    report_error(err, "runtime", e.what());
    return kExitRuntimeError;
  }
}

} // namespace cvm
