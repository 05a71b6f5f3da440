#include "cbrm_tools/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cbrm/case_library.hpp"
#include "cbrm/cbr_model.hpp"
#include "cbrm/errors.hpp"
#include "cbrm/markov_chain.hpp"
#include "cbrm/simulate.hpp"
#include "cbrm/trajectory_io.hpp"
#include "cbrm_tools/render.hpp"

namespace cbrm::cli {

namespace {

enum class Format { Table, Machine };

struct Settings {
  Format format = Format::Table;
  std::string p31;
  std::string p33;
  std::string matrix_path;
  std::string start;
  std::size_t phases = 5;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  std::uint64_t max_phases = 1'000'000;
  unsigned threads = 0;
  std::string library_path;
  std::string trajectories_path;
  bool allow_low_t = false;
  bool trend = false;
};

const CLI::Validator kRationalCheck(
    [](std::string& value) -> std::string {
      try {
        parse_rational(value);
        return {};
      } catch (const Error& e) {
        return e.what();
      }
    },
    "RATIONAL");

CbrParameters cbr_params(const Settings& s) {
  return CbrParameters::from_return_and_stay(parse_rational(s.p31), parse_rational(s.p33));
}

Json params_json(const CbrParameters& p) {
  return {{"p31", rational_json(p.p31())},
          {"p33", rational_json(p.p33())},
          {"p34", rational_json(p.p34())}};
}

void print_params(std::ostream& out, const Style& st, const CbrParameters& p) {
  out << st.heading("CBR chain parameters") << '\n';
  print_table(out, {{"p31 (R3 -> R1)", exact_and_decimal(p.p31())},
                    {"p33 (R3 -> R3)", exact_and_decimal(p.p33())},
                    {"p34 (R3 -> R4)", exact_and_decimal(p.p34())}});
}

TransitionMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": byte " + std::to_string(e.byte), e.what());
  }
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::SchemaError, path + ": " + what);
  };
  if (!doc.is_object() || !doc.contains("states") || !doc.contains("rows")) {
    fail("expected an object with 'states' and 'rows'");
  }
  std::vector<std::string> states;
  for (const auto& s : doc["states"]) {
    if (!s.is_string()) fail("state labels must be strings");
    states.push_back(s.get<std::string>());
  }
  std::vector<std::vector<Rational>> rows;
  for (const auto& row : doc["rows"]) {
    if (!row.is_array()) fail("each row must be an array");
    std::vector<Rational> r;
    for (const auto& v : row) {
      if (v.is_number_integer()) {
        r.emplace_back(v.get<long long>());
      } else if (v.is_string()) {
        try {
          r.push_back(parse_rational(v.get<std::string>()));
        } catch (const Error& e) {
          fail(e.what());
        }
      } else {
        fail("entries must be rational strings or integers");
      }
    }
    rows.push_back(std::move(r));
  }
  return validate_stochastic(std::move(states), Matrix::from_rows(rows));
}

// --- chain-analyze --------------------------------------------------------

void chain_analyze(const Settings& s, std::ostream& out, const Style& st) {
  const TransitionMatrix m =
      s.matrix_path.empty() ? cbr_transition_matrix(cbr_params(s)) : read_matrix_file(s.matrix_path);
  const StateClassification cls = classify_states(m);
  if (!cls.is_absorbing_chain) {
    throw Error(ErrorCode::NotAbsorbingChain,
                cls.absorbing.empty() ? "chain has no absorbing state"
                                      : "some transient state cannot reach an absorbing state");
  }
  const CanonicalChain c = canonical_form(m);
  const Matrix& n = fundamental_matrix(c);
  const auto t = expected_absorption_steps(c);
  const Matrix b = absorption_probabilities(c);
  const auto absorbing = c.absorbing_states();
  const auto transient = c.transient_states();

  if (s.format == Format::Machine) {
    Json steps = Json::object();
    for (std::size_t i = 0; i < transient.size(); ++i) steps[transient[i]] = rational_json(t[i]);
    Json doc{{"command", "chain-analyze"},
             {"absorbing", absorbing},
             {"transient", transient},
             {"transition_matrix", matrix_json(m.entries(), m.states(), m.states())},
             {"canonical_form", matrix_json(c.a_star().entries(), c.a_star().states(),
                                            c.a_star().states())},
             {"fundamental", matrix_json(n, transient, transient)},
             {"expected_absorption_steps", std::move(steps)},
             {"absorption_probabilities", matrix_json(b, transient, absorbing)}};
    out << doc.dump(2) << '\n';
    return;
  }

  auto join = [](const std::vector<std::string>& v) {
    return v.empty() ? std::string("(none)")
                     : std::accumulate(std::next(v.begin()), v.end(), v.front(),
                                       [](std::string a, const std::string& b) {
                                         return std::move(a) + ", " + b;
                                       });
  };
  out << st.heading("State classification") << '\n';
  print_table(out, {{"absorbing", join(absorbing)}, {"transient", join(transient)}});
  out << '\n' << st.heading("Transition matrix") << '\n';
  print_matrix(out, m.entries(), m.states(), m.states());
  out << '\n' << st.heading("Canonical form A* = [I 0; R Q]") << '\n';
  print_matrix(out, c.a_star().entries(), c.a_star().states(), c.a_star().states());
  out << '\n' << st.heading("Fundamental matrix N = (I - Q)^-1") << '\n';
  print_matrix(out, n, transient, transient);
  out << '\n' << st.heading("Mean phases before absorption") << '\n';
  for (std::size_t i = 0; i < transient.size(); ++i) {
    out << "  t(" << transient[i] << ") = " << exact_and_decimal(t[i]) << '\n';
  }
  out << '\n' << st.heading("Absorption probabilities B = N R") << '\n';
  print_matrix(out, b, transient, absorbing);
}

// --- cbr-analyze ----------------------------------------------------------

void cbr_analyze(const Settings& s, std::ostream& out, const Style& st) {
  const CbrParameters p = cbr_params(s);
  const Rational t = mean_phases(p);
  const Rational steps = completion_steps(p);
  const TransitionMatrix a = cbr_transition_matrix(p);
  const CanonicalChain c = canonical_form(a);
  const Matrix& n = c.fundamental();
  const auto transient = c.transient_states();

  if (s.format == Format::Machine) {
    Json sums = Json::object();
    const auto rs = n.row_sums();
    for (std::size_t i = 0; i < transient.size(); ++i) sums[transient[i]] = rational_json(rs[i]);
    Json doc{{"command", "cbr-analyze"},
             {"params", params_json(p)},
             {"transition_matrix", matrix_json(a.entries(), a.states(), a.states())},
             {"canonical_form", matrix_json(c.a_star().entries(), c.a_star().states(),
                                            c.a_star().states())},
             {"fundamental", matrix_json(n, transient, transient)},
             {"expected_absorption_steps", std::move(sums)},
             {"t", rational_json(t)},
             {"completion_steps", rational_json(steps)}};
    out << doc.dump(2) << '\n';
    return;
  }

  print_params(out, st, p);
  out << '\n' << st.heading("Transition matrix A") << '\n';
  print_matrix(out, a.entries(), a.states(), a.states());
  out << '\n' << st.heading("Canonical form A* (absorbing state first)") << '\n';
  print_matrix(out, c.a_star().entries(), c.a_star().states(), c.a_star().states());
  out << '\n' << render_fundamental(p, st);
  out << '\n' << st.heading("Summary") << '\n';
  out << "  t = " << to_fraction(t) << "  (" << to_decimal(t)
      << ")  mean phases before absorption, starting at R1\n";
  out << "  completion steps = " << to_fraction(steps) << "  (" << to_decimal(steps)
      << ")  t + 1\n";
}

// --- cbr-evolve -----------------------------------------------------------

void cbr_evolve(const Settings& s, std::ostream& out, const Style& st) {
  const CbrParameters p = cbr_params(s);
  const TransitionMatrix a = cbr_transition_matrix(p);
  const auto dists = evolve(ProbabilityVector::point_mass(a.states(), "R1"), a, s.phases);

  if (s.format == Format::Machine) {
    Json rows = Json::array();
    for (const auto& d : dists) {
      rows.push_back({{"phase", d.phase_index()}, {"probs", rational_row_json(d.probs())}});
    }
    Json doc{{"command", "cbr-evolve"},
             {"params", params_json(p)},
             {"states", a.states()},
             {"distributions", std::move(rows)}};
    out << doc.dump(2) << '\n';
    return;
  }

  print_params(out, st, p);
  out << '\n' << st.heading("Probability vectors P_i = P_{i-1} A  (states R1 R2 R3 R4)") << '\n';
  for (const auto& d : dists) {
    std::string exact = "P" + std::to_string(d.phase_index()) + ":";
    std::string dec;
    for (const auto& v : d.probs()) {
      exact += " " + to_fraction(v);
      dec += (dec.empty() ? "" : " ") + to_decimal(v);
    }
    out << exact << "   [" << dec << "]\n";
  }
}

// --- cbr-simulate ---------------------------------------------------------

void cbr_simulate(const Settings& s, std::ostream& out, const Style& st) {
  const CbrParameters p = cbr_params(s);
  const Rational steps = completion_steps(p);
  const TransitionMatrix a = cbr_transition_matrix(p);
  SimulationConfig cfg;
  cfg.seed = s.seed;
  cfg.num_trajectories = s.samples;
  cfg.max_phases = s.max_phases;
  cfg.threads = s.threads;
  std::vector<std::size_t> phases(s.phases + 1);
  std::iota(phases.begin(), phases.end(), std::size_t{0});
  const SimulationReport r = run_simulation(a, "R1", cfg, phases);
  const R3ExitCounts exits = exit_counts_from_r3(r);

  if (s.format == Format::Machine) {
    Json doc{{"command", "cbr-simulate"},
             {"params", params_json(p)},
             {"analytic_completion_steps", rational_json(steps)},
             {"report", Json::parse(report_to_json(r))}};
    out << doc.dump(2) << '\n';
    return;
  }

  print_params(out, st, p);
  out << '\n' << st.heading("Monte Carlo") << '\n';
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%#.6g", v);
    return std::string(buf);
  };
  print_table(out, {{"trajectories", std::to_string(r.num_trajectories)},
                    {"seed", std::to_string(r.seed)},
                    {"absorbed", std::to_string(r.absorbed_count)},
                    {"censored", std::to_string(r.censored_count)},
                    {"empirical completion steps",
                     r.empirical_mean_steps ? fmt(*r.empirical_mean_steps) : "n/a"},
                    {"standard error", r.standard_error ? fmt(*r.standard_error) : "n/a"},
                    {"analytic completion steps (t + 1)", exact_and_decimal(steps)}});
  if (r.censored_count > 0) {
    out << "  warning: " << r.censored_count << " trajectories hit --max-phases "
        << r.max_phases << " and are excluded from the mean\n";
  }

  out << '\n' << st.heading("Phase distributions (empirical vs exact)") << '\n';
  std::vector<std::vector<std::string>> rows{{"phase", "state", "empirical", "exact"}};
  for (const auto& pf : r.phase_distributions) {
    const ProbabilityVector exact = phase_distribution(p, pf.phase);
    for (std::size_t j = 0; j < r.states.size(); ++j) {
      rows.push_back({"P" + std::to_string(pf.phase), r.states[j], fmt(pf.frequencies[j]),
                      exact_and_decimal(exact[j])});
    }
  }
  print_table(out, rows);

  out << '\n' << st.heading("Exits from R3") << '\n';
  const double total = static_cast<double>(std::max<std::uint64_t>(exits.total(), 1));
  print_table(out, {{"transition", "count", "ratio", "parameter"},
                    {"R3 -> R1", std::to_string(exits.to_r1), fmt(exits.to_r1 / total),
                     exact_and_decimal(p.p31())},
                    {"R3 -> R3", std::to_string(exits.stay), fmt(exits.stay / total),
                     exact_and_decimal(p.p33())},
                    {"R3 -> R4", std::to_string(exits.to_r4), fmt(exits.to_r4 / total),
                     exact_and_decimal(p.p34())}});
}

// --- estimate -------------------------------------------------------------

void estimate(const Settings& s, std::ostream& out, const Style& st) {
  const std::vector<Trajectory> trajectories =
      s.trajectories_path == "-" ? parse_trajectories(std::cin)
                                 : load_trajectories(s.trajectories_path);
  const EstimationResult est = estimate_parameters(trajectories);
  const auto absorbed = static_cast<std::size_t>(std::count_if(
      trajectories.begin(), trajectories.end(), [](const Trajectory& t) { return t.absorbed(); }));
  std::optional<Rational> t;
  if (est.params.is_absorbing()) t = mean_phases(est.params);

  if (s.format == Format::Machine) {
    Json doc{{"command", "estimate"},
             {"trajectories", trajectories.size()},
             {"absorbed", absorbed},
             {"r3_exit_counts",
              {{"to_r1", est.r3_exit_counts.to_r1},
               {"stay", est.r3_exit_counts.stay},
               {"to_r4", est.r3_exit_counts.to_r4}}},
             {"params", params_json(est.params)},
             {"t", t ? rational_json(*t) : Json(nullptr)},
             {"completion_steps", t ? rational_json(*t + 1) : Json(nullptr)}};
    out << doc.dump(2) << '\n';
    return;
  }

  out << st.heading("Observed trajectories") << '\n';
  print_table(out, {{"trajectories", std::to_string(trajectories.size())},
                    {"absorbed", std::to_string(absorbed)},
                    {"censored", std::to_string(trajectories.size() - absorbed)},
                    {"R3 -> R1", std::to_string(est.r3_exit_counts.to_r1)},
                    {"R3 -> R3", std::to_string(est.r3_exit_counts.stay)},
                    {"R3 -> R4", std::to_string(est.r3_exit_counts.to_r4)}});
  out << '\n';
  print_params(out, st, est.params);
  out << '\n' << st.heading("Implied difficulty") << '\n';
  if (t) {
    out << "  t = " << to_fraction(*t) << "  (" << to_decimal(*t) << ")\n";
    out << "  completion steps = " << to_fraction(*t + 1) << "  (" << to_decimal(*t + 1)
        << ")\n";
  } else {
    out << "  t undefined: no R3 -> R4 exit observed (NonAbsorbing)\n";
  }
}

// --- library-efficiency ---------------------------------------------------

void library_efficiency(const Settings& s, std::ostream& out, std::ostream& err,
                        const Style& st) {
  LoadOptions opts;
  opts.allow_low_t = s.allow_low_t;
  const CaseLibrary lib = load_library(s.library_path, opts);
  for (const auto& w : lib.warnings) err << "warning: " << w << '\n';

  const Rational flat = flat_efficiency(lib);
  const Rational system = system_efficiency(lib);
  struct Row {
    std::string name;
    std::size_t cases;
    Rational efficiency;
  };
  std::vector<Row> per_ge;
  for (const auto& g : lib.episodes) {
    per_ge.push_back({g.name, distinct_cases(g).size(), episode_efficiency(g)});
  }
  std::vector<Rational> trend;
  if (s.trend) trend = flat_efficiency_trend(lib);

  if (s.format == Format::Machine) {
    Json eps = Json::array();
    for (const auto& r : per_ge) {
      eps.push_back({{"name", r.name}, {"cases", r.cases}, {"efficiency", rational_json(r.efficiency)}});
    }
    Json doc{{"command", "library-efficiency"},
             {"n", lib.n()},
             {"flat_efficiency", rational_json(flat)},
             {"system_efficiency", rational_json(system)},
             {"episodes", std::move(eps)}};
    if (s.trend) doc["trend"] = rational_row_json(trend);
    out << doc.dump(2) << '\n';
    return;
  }

  out << st.heading("Case library") << '\n';
  print_table(out, {{"distinct cases (n)", std::to_string(lib.n())},
                    {"flat efficiency (mean t_i)", exact_and_decimal(flat)},
                    {"system efficiency (mean of GE efficiencies)", exact_and_decimal(system)}});
  out << '\n' << st.heading("Generalized episodes") << '\n';
  std::vector<std::vector<std::string>> rows{{"episode", "cases", "efficiency"}};
  for (const auto& r : per_ge) {
    rows.push_back({r.name, std::to_string(r.cases), exact_and_decimal(r.efficiency)});
  }
  print_table(out, rows);
  if (s.trend) {
    out << '\n' << st.heading("Flat efficiency after each insertion") << '\n';
    std::vector<std::vector<std::string>> tr{{"n", "efficiency"}};
    for (std::size_t i = 0; i < trend.size(); ++i) {
      tr.push_back({std::to_string(i + 1), exact_and_decimal(trend[i])});
    }
    print_table(out, tr);
  }
}

void add_format(CLI::App* cmd, Settings& s) {
  cmd->add_option("--format", s.format, "Output mode")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Format>{{"table", Format::Table}, {"machine", Format::Machine}}));
}

void add_params(CLI::App* cmd, Settings& s, bool required) {
  auto* p31 = cmd->add_option("--p31", s.p31, "Probability R3 -> R1 (e.g. 1/3)")
                  ->check(kRationalCheck);
  auto* p33 = cmd->add_option("--p33", s.p33, "Probability R3 -> R3 (e.g. 1/3)")
                  ->check(kRationalCheck);
  if (required) {
    p31->required();
    p33->required();
  } else {
    p31->needs(p33);
    p33->needs(p31);
  }
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err,
        const RunOptions& options) {
  Settings s;
  CLI::App app{"Absorbing Markov chain analysis of the case-based reasoning cycle", "cbrm"};
  app.require_subcommand(1);

  auto* chain = app.add_subcommand("chain-analyze", "Generic absorbing-chain analysis");
  add_params(chain, s, false);
  auto* matrix = chain->add_option("--matrix", s.matrix_path,
                                   "JSON file {\"states\": [...], \"rows\": [[...]]}");
  matrix->excludes(chain->get_option("--p31"))->excludes(chain->get_option("--p33"));
  add_format(chain, s);

  auto* analyze = app.add_subcommand("cbr-analyze", "Exact analysis of the CBR chain");
  add_params(analyze, s, true);
  add_format(analyze, s);

  auto* evolve_cmd = app.add_subcommand("cbr-evolve", "Probability vectors P_0..P_k");
  add_params(evolve_cmd, s, true);
  evolve_cmd->add_option("--phases", s.phases, "Last phase to print")->capture_default_str();
  add_format(evolve_cmd, s);

  auto* sim = app.add_subcommand("cbr-simulate", "Monte Carlo cross-check of the analytics");
  add_params(sim, s, true);
  sim->add_option("--phases", s.phases, "Report phase distributions for 0..k")
      ->capture_default_str();
  sim->add_option("--samples", s.samples, "Number of trajectories")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--seed", s.seed, "Base seed")->capture_default_str();
  sim->add_option("--max-phases", s.max_phases, "Censoring cap on transitions per path")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--threads", s.threads, "Worker threads (0 = all cores)");
  add_format(sim, s);

  auto* est = app.add_subcommand("estimate", "Estimate p31, p33, p34 from trajectories");
  est->add_option("--trajectories", s.trajectories_path, "Trajectory file, or - for stdin")
      ->required();
  add_format(est, s);

  auto* lib = app.add_subcommand("library-efficiency", "Efficiency of a case library");
  lib->add_option("--library", s.library_path, "Library JSON document")->required();
  lib->add_flag("--allow-low-t", s.allow_low_t, "Warn instead of failing on direct t < 3");
  lib->add_flag("--trend", s.trend, "Print flat efficiency after each insertion");
  add_format(lib, s);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    app.exit(e, out, err);
    return 2;
  }
  if (chain->parsed() && s.matrix_path.empty() && s.p31.empty()) {
    err << "chain-analyze: one of --matrix or --p31/--p33 is required\n";
    return 2;
  }

  const Style style{options.color && s.format == Format::Table};
  std::ostringstream buffer;
  try {
    if (chain->parsed()) chain_analyze(s, buffer, style);
    else if (analyze->parsed()) cbr_analyze(s, buffer, style);
    else if (evolve_cmd->parsed()) cbr_evolve(s, buffer, style);
    else if (sim->parsed()) cbr_simulate(s, buffer, style);
    else if (est->parsed()) estimate(s, buffer, style);
    else if (lib->parsed()) library_efficiency(s, buffer, err, style);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  out << buffer.str();
  return 0;
}

}  // namespace cbrm::cli
