// difflog: spatio-temporal information-diffusion modeling over social graphs.
//
// Pipeline subcommands: gen-graph -> simulate -> density -> predict|fit -> evaluate.
// Exit codes: 0 success, 1 runtime/solver failure, 2 input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "difflog/calibrate.hpp"
#include "difflog/events.hpp"
#include "difflog/graph.hpp"
#include "difflog/manifest.hpp"
#include "difflog/params.hpp"
#include "difflog/pde.hpp"
#include "difflog/spline.hpp"
#include "difflog/synth.hpp"

namespace {

using namespace difflog;

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write output file: " + path);
  out << contents;
}

template <typename WriteFn>
void write_with(const std::string& path, WriteFn&& fn) {
  std::ostringstream buf;
  fn(buf);
  write_text_file(path, buf.str());
}

std::vector<int> int_range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

// ---------------------------------------------------------------------------
// gen-graph
// ---------------------------------------------------------------------------

struct GenGraphArgs {
  std::string kind = "chain";
  std::size_t nodes = 100;
  std::size_t neighbors = 4;
  double rewire = 0.1;
  std::size_t attach = 2;
  std::uint64_t seed = 1;
  std::string output = "graph.csv";
};

int run_gen_graph(const GenGraphArgs& args) {
  GraphConfig cfg;
  cfg.n = args.nodes;
  cfg.ws_k = args.neighbors;
  cfg.ws_beta = args.rewire;
  cfg.ba_m = args.attach;
  cfg.seed = args.seed;
  if (args.kind == "chain")
    cfg.kind = GraphKind::Chain;
  else if (args.kind == "star")
    cfg.kind = GraphKind::Star;
  else if (args.kind == "watts-strogatz")
    cfg.kind = GraphKind::WattsStrogatz;
  else if (args.kind == "barabasi-albert")
    cfg.kind = GraphKind::BarabasiAlbert;
  else
    throw input_error("unknown graph kind '" + args.kind + "'");

  auto graph = generate_graph(cfg);
  write_with(args.output, [&](std::ostream& os) { write_graph_csv(graph, os); });

  RunManifest m;
  m.subcommand = "gen-graph";
  m.config = {{"kind", args.kind}, {"nodes", args.nodes},     {"neighbors", args.neighbors},
              {"rewire", args.rewire}, {"attach", args.attach}, {"seed", args.seed}};
  m.outputs = {args.output};
  m.write(args.output + ".manifest.json");

  std::cerr << "gen-graph: " << graph.num_users() << " users, " << graph.num_edges()
            << " follow edges -> " << args.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string graph_path;
  std::string initiator;
  std::string story = "s1";
  std::string config_path;
  double p_follow = 0.05;
  double q_random = 0.0;
  int t_promote = -1;  // negative: never promoted
  int horizon = 50;
  std::uint64_t seed = 1;
  std::string output = "votes.csv";
};

int run_simulate(const SimulateArgs& args, const CLI::App& cmd) {
  SimConfig cfg;
  if (!args.config_path.empty()) {
    // config file fills anything the command line does not explicitly set
    std::ifstream in(args.config_path);
    if (!in) throw input_error("cannot open simulation config: " + args.config_path);
    nlohmann::json j;
    if (args.config_path.size() >= 5 &&
        args.config_path.substr(args.config_path.size() - 5) == ".toml") {
      std::string line;
      j = nlohmann::json::object();
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        auto s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string_view::npos)
          throw input_error(args.config_path + ":" + std::to_string(lineno) + ": expected key = value");
        j[std::string(trim(s.substr(0, eq)))] =
            parse_double(trim(s.substr(eq + 1)), args.config_path);
      }
    } else {
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw input_error("bad JSON in " + args.config_path + ": " + e.what());
      }
    }
    cfg.p_follow = j.value("p_follow", cfg.p_follow);
    cfg.q_random = j.value("q_random", cfg.q_random);
    if (j.contains("t_promote")) cfg.t_promote = static_cast<int>(j.at("t_promote").get<double>());
    if (j.contains("horizon")) cfg.horizon = static_cast<int>(j.at("horizon").get<double>());
    if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(j.at("seed").get<double>());
  }
  // precedence: explicit CLI flag > config file > default
  if (cmd.count("--p-follow") || args.config_path.empty()) cfg.p_follow = args.p_follow;
  if (cmd.count("--q-random") || args.config_path.empty()) cfg.q_random = args.q_random;
  if (cmd.count("--t-promote") || args.config_path.empty())
    cfg.t_promote = args.t_promote < 0 ? (1 << 30) : args.t_promote;
  if (cmd.count("--horizon") || args.config_path.empty()) cfg.horizon = args.horizon;
  if (cmd.count("--seed") || args.config_path.empty()) cfg.seed = args.seed;

  auto graph = load_graph_csv(args.graph_path);
  auto log = generate_cascade(graph, cfg, args.initiator, args.story);
  write_with(args.output, [&](std::ostream& os) { write_votes_csv(log, os); });

  RunManifest m;
  m.subcommand = "simulate";
  m.config = {{"initiator", args.initiator}, {"story", args.story},   {"p_follow", cfg.p_follow},
              {"q_random", cfg.q_random},    {"t_promote", cfg.t_promote}, {"horizon", cfg.horizon},
              {"seed", cfg.seed}};
  m.add_input(args.graph_path);
  m.outputs = {args.output};
  m.write(args.output + ".manifest.json");

  std::cerr << "simulate: " << log.votes.size() << " votes over " << cfg.horizon << " hours -> "
            << args.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// density
// ---------------------------------------------------------------------------

struct DensityArgs {
  std::string graph_path;
  std::string votes_path;
  std::string story;
  std::string metric = "hops";
  int max_distance = 5;
  int horizon = 50;
  std::string output = "density.csv";
  std::string sizes_output;
};

int run_density(const DensityArgs& args) {
  auto records = load_votes_csv(args.votes_path);
  auto log = ingest_votes(votes_for_story(records, args.story));

  DistancePartition partition;
  if (args.metric == "hops") {
    auto graph = load_graph_csv(args.graph_path);
    if (graph.dropped_self_loops() + graph.dropped_duplicate_edges() > 0)
      std::cerr << "density: dropped " << graph.dropped_self_loops() << " self-loops and "
                << graph.dropped_duplicate_edges() << " duplicate edges\n";
    partition = partition_by_hops(graph, log.initiator(), args.max_distance);
  } else if (args.metric == "interest") {
    partition = partition_by_interest(vote_histories(records), log.initiator(), args.max_distance);
  } else {
    throw input_error("unknown metric '" + args.metric + "' (expected hops or interest)");
  }

  auto surface = empirical_density(log, partition, args.horizon);
  write_with(args.output, [&](std::ostream& os) { write_density_csv(surface, os); });
  std::string sizes_path = args.sizes_output.empty() ? args.output + ".sizes.csv" : args.sizes_output;
  write_with(sizes_path, [&](std::ostream& os) { write_partition_sizes_csv(partition, os); });

  RunManifest m;
  m.subcommand = "density";
  m.config = {{"story", args.story},
              {"metric", args.metric},
              {"max_distance", args.max_distance},
              {"horizon", args.horizon}};
  m.add_input(args.votes_path);
  if (args.metric == "hops") m.add_input(args.graph_path);
  m.outputs = {args.output, sizes_path};
  m.write(args.output + ".manifest.json");

  std::cerr << "density: " << log.votes.size() << " votes, " << surface.distances.size()
            << " distance rows, " << surface.unclassified_voters
            << " voters outside all groups -> " << args.output << '\n';
  if (log.duplicates_dropped > 0)
    std::cerr << "density: dropped " << log.duplicates_dropped << " duplicate votes\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string density_path;
  std::string samples_inline;  // alternative to a density file: "x:y,x:y,..."
  std::string params_path;
  int train_t = 1;
  int t_end = -1;  // overrides params file when >= 2
  double dx = -1.0, dt = -1.0, d = -1.0, K = -1.0, l = 0.0, L = 0.0;
  double ra = -1.0, rb = -1.0, rc = -1.0;
  bool has_l = false, has_L = false;
  std::string output = "solution.csv";
  std::string report_output;
};

SolverConfig resolve_solver_config(const PredictArgs& args, const InitialDensity& phi,
                                   const CLI::App& cmd) {
  SolverConfig cfg;
  if (!args.params_path.empty()) cfg = load_solver_config(args.params_path);
  if (cmd.count("--d")) cfg.params.d = args.d;
  if (cmd.count("--K")) cfg.params.K = args.K;
  if (cmd.count("--r-a")) cfg.params.r.a = args.ra;
  if (cmd.count("--r-b")) cfg.params.r.b = args.rb;
  if (cmd.count("--r-c")) cfg.params.r.c = args.rc;
  if (cmd.count("--l")) {
    cfg.params.l = args.l;
    cfg.has_l = true;
  }
  if (cmd.count("--L")) {
    cfg.params.L = args.L;
    cfg.has_L = true;
  }
  if (cmd.count("--dx")) cfg.dx = args.dx;
  if (cmd.count("--dt")) cfg.dt = args.dt;
  if (cmd.count("--t-end")) cfg.t_end = args.t_end;
  if (!cfg.has_l) cfg.params.l = phi.domain_left();
  if (!cfg.has_L) cfg.params.L = phi.domain_right();
  return cfg;
}

std::vector<std::pair<double, double>> parse_inline_samples(const std::string& text) {
  std::vector<std::pair<double, double>> samples;
  for (const auto& part : split_csv_line(text)) {
    auto colon = part.find(':');
    if (colon == std::string::npos)
      throw input_error("inline samples must be x:value pairs, got '" + part + "'");
    samples.emplace_back(parse_double(trim(part.substr(0, colon)), "--samples"),
                         parse_double(trim(part.substr(colon + 1)), "--samples"));
  }
  return samples;
}

int run_predict(const PredictArgs& args, const CLI::App& cmd) {
  if (args.density_path.empty() == args.samples_inline.empty())
    throw input_error("predict needs exactly one of --density or --samples");
  std::vector<std::pair<double, double>> samples;
  if (!args.samples_inline.empty()) {
    samples = parse_inline_samples(args.samples_inline);
  } else {
    auto observed = load_density_csv(args.density_path);
    auto slice = density_slice_at(observed, args.train_t);  // input_error when column missing
    samples.assign(slice.begin(), slice.end());
  }
  auto phi = build_initial_density(samples);

  auto cfg = resolve_solver_config(args, phi, cmd);
  auto admissibility = check_lower_solution(phi, cfg.params);
  if (!admissibility.passed)
    std::cerr << "predict: warning: initial profile fails the lower-solution inequality "
                 "(min residual "
              << format_double(admissibility.min_residual)
              << "); the monotone-growth guarantee does not apply\n";

  auto solution = solve(cfg.params, phi, cfg.t_end, cfg.dx, cfg.dt);
  auto properties = verify_properties(solution, admissibility.passed);

  write_with(args.output, [&](std::ostream& os) { write_solution_csv(solution, os); });
  std::string report_path =
      args.report_output.empty() ? args.output + ".report.json" : args.report_output;
  nlohmann::json report{{"admissibility", admissibility.to_json()},
                        {"properties", properties.to_json()},
                        {"initial_density", phi.coefficients_json()},
                        {"params", params_to_json(cfg.params)},
                        {"dx", cfg.dx},
                        {"dt", solution.dt},
                        {"t_end", cfg.t_end},
                        {"train_t", args.train_t},
                        {"scheme", solution.scheme}};
  write_text_file(report_path, report.dump(2) + "\n");

  RunManifest m;
  m.subcommand = "predict";
  m.config = {{"train_t", args.train_t}, {"t_end", cfg.t_end}, {"dx", cfg.dx},
              {"dt", cfg.dt},            {"params", params_to_json(cfg.params)}};
  if (!args.density_path.empty()) m.add_input(args.density_path);
  if (!args.samples_inline.empty()) m.config["samples"] = args.samples_inline;
  if (!args.params_path.empty()) m.add_input(args.params_path);
  m.outputs = {args.output, report_path};
  m.write(args.output + ".manifest.json");

  std::cerr << "predict: solved to t = " << cfg.t_end << " on " << solution.nodes
            << " nodes -> " << args.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
  std::string density_path;
  int train_t = 1;
  int window_start = 2, window_end = -1;
  double dx = 0.05, dt = 0.01;
  int max_evals = 500, restarts = 3;
  std::uint64_t seed = 20250613;
  std::vector<double> d_bounds{1e-3, 0.2}, K_bounds{5.0, 100.0}, a_bounds{0.0, 3.0},
      b_bounds{0.0, 3.0}, c_bounds{0.01, 1.0};
  std::string output = "fitted_params.json";
  std::string diagnostics_output;
};

int run_fit(const FitArgs& args) {
  auto observed = load_density_csv(args.density_path);
  auto slice = density_slice_at(observed, args.train_t);
  std::vector<std::pair<double, double>> samples(slice.begin(), slice.end());
  auto phi = build_initial_density(samples);

  FitBounds bounds;
  auto iv = [](const std::vector<double>& v, const char* name) {
    if (v.size() != 2) throw input_error(std::string("bounds for ") + name + " need exactly 2 values");
    return Interval{v[0], v[1]};
  };
  bounds.d = iv(args.d_bounds, "d");
  bounds.K = iv(args.K_bounds, "K");
  bounds.a = iv(args.a_bounds, "a");
  bounds.b = iv(args.b_bounds, "b");
  bounds.c = iv(args.c_bounds, "c");

  int window_end = args.window_end > 0 ? args.window_end : observed.horizon;
  FitOptions options;
  options.max_evals = args.max_evals;
  options.restarts = args.restarts;
  options.seed = args.seed;
  options.dx = args.dx;
  options.dt = args.dt;

  auto result = fit(observed, phi, bounds, int_range(args.window_start, window_end), options);

  // fitted parameters in the same schema predict consumes
  nlohmann::json fitted = params_to_json(result.params);
  fitted["dx"] = args.dx;
  fitted["dt"] = args.dt;
  fitted["t_end"] = window_end;
  write_text_file(args.output, fitted.dump(2) + "\n");
  std::string diag_path =
      args.diagnostics_output.empty() ? args.output + ".diagnostics.json" : args.diagnostics_output;
  write_text_file(diag_path, result.to_json().dump(2) + "\n");

  RunManifest m;
  m.subcommand = "fit";
  m.config = {{"train_t", args.train_t},
              {"window", {args.window_start, window_end}},
              {"dx", args.dx},
              {"dt", args.dt},
              {"max_evals", args.max_evals},
              {"restarts", args.restarts},
              {"seed", args.seed}};
  m.add_input(args.density_path);
  m.outputs = {args.output, diag_path};
  m.write(args.output + ".manifest.json");

  std::cerr << "fit: sse " << format_double(result.sse) << " (rmse " << format_double(result.rmse)
            << ") after " << result.evaluations << " evaluations -> " << args.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string predicted_path;
  std::string observed_path;
  std::vector<int> distances;
  std::vector<int> times;
  std::string output = "report.csv";
  std::string json_output;
};

int run_evaluate(const EvaluateArgs& args) {
  auto predicted = load_density_csv(args.predicted_path);
  auto observed = load_density_csv(args.observed_path);

  std::vector<int> distances = args.distances;
  if (distances.empty()) {
    std::set<int> obs(observed.distances.begin(), observed.distances.end());
    for (int x : predicted.distances)
      if (obs.count(x)) distances.push_back(x);
  }
  std::vector<int> times = args.times;
  if (times.empty()) times = int_range(2, std::min(predicted.horizon, observed.horizon));

  auto report = evaluate(predicted, observed, distances, times);
  write_report_table(report, std::cout);
  write_with(args.output, [&](std::ostream& os) { write_report_csv(report, os); });
  std::string json_path = args.json_output.empty() ? args.output + ".json" : args.json_output;
  write_text_file(json_path, report.to_json().dump(2) + "\n");

  RunManifest m;
  m.subcommand = "evaluate";
  m.config = {{"distances", distances}, {"times", times}};
  m.add_input(args.predicted_path);
  m.add_input(args.observed_path);
  m.outputs = {args.output, json_path};
  m.write(args.output + ".manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffusive-logistic modeling of information spread in social networks"};
  app.require_subcommand(1);

  GenGraphArgs gg;
  auto* gen = app.add_subcommand("gen-graph", "generate a synthetic follow graph");
  gen->add_option("--kind", gg.kind, "chain | star | watts-strogatz | barabasi-albert");
  gen->add_option("--nodes", gg.nodes, "node count")->check(CLI::PositiveNumber);
  gen->add_option("--neighbors", gg.neighbors, "watts-strogatz ring neighbors (even)");
  gen->add_option("--rewire", gg.rewire, "watts-strogatz rewiring probability");
  gen->add_option("--attach", gg.attach, "barabasi-albert links per new node");
  gen->add_option("--seed", gg.seed, "rng seed");
  gen->add_option("-o,--output", gg.output, "output graph CSV");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run a seeded cascade on a follow graph");
  simulate->add_option("--graph", sim.graph_path, "graph CSV")->required();
  simulate->add_option("--initiator", sim.initiator, "initiating user id")->required();
  simulate->add_option("--story", sim.story, "story id for the emitted votes");
  simulate->add_option("--config", sim.config_path, "SimConfig JSON/TOML file");
  simulate->add_option("--p-follow", sim.p_follow, "per-exposure hourly vote probability");
  simulate->add_option("--q-random", sim.q_random, "post-promotion hourly vote probability");
  simulate->add_option("--t-promote", sim.t_promote, "promotion hour (negative = never)");
  simulate->add_option("--horizon", sim.horizon, "hours to simulate");
  simulate->add_option("--seed", sim.seed, "rng seed");
  simulate->add_option("-o,--output", sim.output, "output votes CSV");

  DensityArgs den;
  auto* density = app.add_subcommand("density", "empirical influenced-user density surface");
  density->add_option("--graph", den.graph_path, "graph CSV (hops metric)");
  density->add_option("--votes", den.votes_path, "votes CSV")->required();
  density->add_option("--story", den.story, "story id")->required();
  density->add_option("--metric", den.metric, "hops | interest");
  density->add_option("--max-distance", den.max_distance,
                      "max hop distance, or bucket count for the interest metric");
  density->add_option("--horizon", den.horizon, "hours to cover");
  density->add_option("-o,--output", den.output, "output density CSV");
  density->add_option("--sizes-out", den.sizes_output, "partition sizes CSV");

  PredictArgs pre;
  auto* predict = app.add_subcommand("predict", "solve the model from an observed first hour");
  predict->add_option("--density", pre.density_path, "observed density CSV");
  predict->add_option("--samples", pre.samples_inline,
                      "inline initial profile as x:value pairs, e.g. 1:2,2:3,3:5");
  predict->add_option("--params", pre.params_path, "parameter file (JSON or TOML)");
  predict->add_option("--train-t", pre.train_t, "hour whose slice builds the initial profile");
  predict->add_option("--t-end", pre.t_end, "final hour");
  predict->add_option("--dx", pre.dx, "grid spacing");
  predict->add_option("--dt", pre.dt, "time step");
  predict->add_option("--d", pre.d, "diffusion rate");
  predict->add_option("--K", pre.K, "carrying capacity");
  predict->add_option("--l", pre.l, "domain lower bound");
  predict->add_option("--L", pre.L, "domain upper bound");
  predict->add_option("--r-a", pre.ra, "growth rate a");
  predict->add_option("--r-b", pre.rb, "growth rate b");
  predict->add_option("--r-c", pre.rc, "growth rate c");
  predict->add_option("-o,--output", pre.output, "output solution CSV");
  predict->add_option("--report-out", pre.report_output, "admissibility/property report JSON");

  FitArgs fit_args;
  auto* fitc = app.add_subcommand("fit", "calibrate parameters against an observed surface");
  fitc->add_option("--density", fit_args.density_path, "observed density CSV")->required();
  fitc->add_option("--train-t", fit_args.train_t, "hour whose slice builds the initial profile");
  fitc->add_option("--window-start", fit_args.window_start, "first objective hour");
  fitc->add_option("--window-end", fit_args.window_end, "last objective hour");
  fitc->add_option("--dx", fit_args.dx, "grid spacing for candidate solves");
  fitc->add_option("--dt", fit_args.dt, "time step for candidate solves");
  fitc->add_option("--max-evals", fit_args.max_evals, "objective evaluation budget");
  fitc->add_option("--restarts", fit_args.restarts, "jittered simplex restarts");
  fitc->add_option("--seed", fit_args.seed, "rng seed for the jitter");
  fitc->add_option("--d-bounds", fit_args.d_bounds, "diffusion bounds lo hi")->expected(2);
  fitc->add_option("--K-bounds", fit_args.K_bounds, "capacity bounds lo hi")->expected(2);
  fitc->add_option("--a-bounds", fit_args.a_bounds, "growth a bounds lo hi")->expected(2);
  fitc->add_option("--b-bounds", fit_args.b_bounds, "growth b bounds lo hi")->expected(2);
  fitc->add_option("--c-bounds", fit_args.c_bounds, "growth c bounds lo hi")->expected(2);
  fitc->add_option("-o,--output", fit_args.output, "fitted parameter JSON");
  fitc->add_option("--diagnostics-out", fit_args.diagnostics_output, "fit diagnostics JSON");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against observations");
  evaluate_cmd->add_option("--predicted", ev.predicted_path, "predicted surface CSV")->required();
  evaluate_cmd->add_option("--observed", ev.observed_path, "observed surface CSV")->required();
  evaluate_cmd->add_option("--distances", ev.distances, "distance rows to score");
  evaluate_cmd->add_option("--times", ev.times, "time columns to score");
  evaluate_cmd->add_option("-o,--output", ev.output, "per-cell report CSV");
  evaluate_cmd->add_option("--json-out", ev.json_output, "report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen_graph(gg);
    if (simulate->parsed()) return run_simulate(sim, *simulate);
    if (density->parsed()) return run_density(den);
    if (predict->parsed()) return run_predict(pre, *predict);
    if (fitc->parsed()) return run_fit(fit_args);
    if (evaluate_cmd->parsed()) return run_evaluate(ev);
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const solver_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
