// ppm-sdp: command line front end for sampling, thresholds, SDP recovery,
// dual certificates and experiment sweeps.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_support.hpp"
#include "ppmsdp/error.hpp"
#include "ppmsdp/graph.hpp"
#include "ppmsdp/sdp.hpp"

namespace {

using namespace ppm;
using cli::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitRoundingFailure = 2;
constexpr int kExitNotConverged = 3;

struct ModelFlags {
  int n = 0;
  std::string pi;
  double p_tilde = 0.0;
  double q_tilde = 0.0;
  std::string model_file;

  void add(CLI::App* app) {
    app->add_option("--n", n, "Number of vertices");
    app->add_option("--pi", pi, "Community proportions, comma separated");
    app->add_option("--p-tilde", p_tilde, "Intra-community rate constant");
    app->add_option("--q-tilde", q_tilde, "Inter-community rate constant");
    app->add_option("--model", model_file, "Model JSON {n, r, pi, p_tilde, q_tilde}");
  }

  PlantedPartitionParams params() const {
    if (!model_file.empty()) return cli::params_from_json(cli::read_json_file(model_file));
    if (n <= 0 || pi.empty()) throw ParameterError("model: give --model or --n, --pi, --p-tilde, --q-tilde");
    PlantedPartitionParams p;
    p.n = n;
    p.pi = cli::parse_doubles(pi);
    p.r = static_cast<int>(p.pi.size());
    p.p_tilde = p_tilde;
    p.q_tilde = q_tilde;
    return p;
  }
};

struct ProgramFlags {
  std::string mode = "unknown";
  std::string sizes;
  double omega = -1.0;
  int r = 0;

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "known | unknown")->check(CLI::IsMember({"known", "unknown"}));
    app->add_option("--sizes", sizes, "Community sizes, comma separated (known mode)");
    app->add_option("--omega", omega, "Regularizer (unknown mode)");
    app->add_option("--r", r, "Number of communities (unknown mode)");
  }

  bool known() const { return mode == "known"; }

  void check() const {
    if (known() && sizes.empty()) throw ParameterError("--mode known needs --sizes");
    if (!known() && (omega < 0.0 || r < 2)) throw ParameterError("--mode unknown needs --omega and --r");
  }
};

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_matrix(const std::string& path, const Eigen::MatrixXd& x) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open " + path);
  char buf[32];
  for (Eigen::Index a = 0; a < x.rows(); ++a) {
    for (Eigen::Index b = 0; b < x.cols(); ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", x(a, b));
      out << (b ? " " : "") << buf;
    }
    out << '\n';
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open " + path);
  return out;
}

// ---------------------------------------------------------------------------

int cmd_sample(const ModelFlags& model, std::uint64_t seed, const std::string& graph_out,
               const std::string& labels_out) {
  const PlantedPartitionParams params = model.params();
  const PlantedSample s = sample_ppm(params, seed);
  if (graph_out.empty()) {
    write_graph(std::cout, s.graph);
  } else {
    write_graph(graph_out, s.graph);
  }
  if (!labels_out.empty()) write_labels(labels_out, s.truth);
  std::cerr << "sampled n=" << s.graph.num_vertices() << " m=" << s.graph.num_edges() << " seed=" << seed << '\n';
  return kExitOk;
}

int cmd_adversary(const std::string& graph_path, const std::string& labels_path, const std::string& spec_path,
                  std::optional<std::uint64_t> seed, const std::string& graph_out, const std::string& changes_out) {
  const Graph g = read_graph(graph_path);
  const PartitionLabels truth = read_labels(labels_path);
  const cli::AdversaryFile spec = cli::adversary_from_json(cli::read_json_file(spec_path));
  const AdversaryResult res = apply_adversary(g, truth, spec.spec, seed.value_or(spec.seed));
  if (graph_out.empty()) {
    write_graph(std::cout, res.graph);
  } else {
    write_graph(graph_out, res.graph);
  }
  if (!changes_out.empty()) {
    std::ofstream out = open_out(changes_out);
    out << "op,u,v\n";
    for (const EdgeChange& c : res.changes) {
      out << (c.op == EdgeChange::Op::kAdd ? "add" : "remove") << ',' << c.u << ',' << c.v << '\n';
    }
  }
  std::cerr << "applied " << res.changes.size() << " monotone changes\n";
  return kExitOk;
}

int cmd_threshold(const ModelFlags& model) {
  if (!model.model_file.empty()) {
    const json j = cli::read_json_file(model.model_file);
    if (j.contains("q_tilde_matrix")) {
      const auto rows = j.at("q_tilde_matrix").get<std::vector<std::vector<double>>>();
      const auto pi = j.at("pi").get<std::vector<double>>();
      Eigen::MatrixXd q(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t a = 0; a < rows.size(); ++a) {
        if (rows[a].size() != rows.size()) throw ParameterError("q_tilde_matrix must be square");
        for (std::size_t b = 0; b < rows.size(); ++b) {
          q(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = rows[a][b];
        }
      }
      json out = cli::to_json(feasibility_report(q, pi));
      json mono = json::array();
      for (std::size_t a = 0; a < pi.size(); ++a) {
        for (std::size_t b = a + 1; b < pi.size(); ++b) {
          mono.push_back({{"i", a}, {"j", b},
                          {"monotone_divergence", monotone_divergence(q, pi, static_cast<int>(a), static_cast<int>(b)).value}});
        }
      }
      out["monotone_pairs"] = mono;
      out["strongly_assortative"] = strongly_assortative(q);
      print_json(out);
      return kExitOk;
    }
  }
  const PlantedPartitionParams params = model.params();
  json out = cli::to_json(feasibility_report(params));
  try {
    out["regime"] = cli::to_json(regime_constants(params));
    out["p"] = params.p();
    out["q"] = params.q();
  } catch (const ParameterError& e) {
    out["regime_error"] = e.what();
  }
  print_json(out);
  return kExitOk;
}

int cmd_solve(const std::string& graph_path, const ProgramFlags& prog, const SolverOptions& opts,
              const RoundOptions& round, const std::string& labels_out, const std::string& matrix_out) {
  prog.check();
  const Graph g = read_graph(graph_path);
  const SdpProblem problem = prog.known() ? build_known_sizes(g, cli::parse_ints(prog.sizes))
                                          : build_unknown_sizes(g, prog.r, prog.omega);
  const SdpSolution sol = solve(problem, opts);
  const RoundResult rr = round_to_partition(sol.X, problem.r, round);
  json out = {{"converged", sol.converged},
              {"iterations", sol.iterations},
              {"objective", sol.objective},
              {"primal_residual", sol.primal_residual},
              {"dual_residual", sol.dual_residual},
              {"rounded", rr.ok()},
              {"max_deviation", rr.max_deviation},
              {"spectral_fallback", rr.used_spectral_fallback}};
  if (!rr.ok()) out["rounding_failure"] = rr.failure;
  if (rr.ok()) {
    out["community_sizes"] = rr.labels->sizes();
    if (!labels_out.empty()) write_labels(labels_out, *rr.labels);
  }
  if (!matrix_out.empty()) write_matrix(matrix_out, sol.X);
  print_json(out);
  if (!sol.converged) return kExitNotConverged;
  return rr.ok() ? kExitOk : kExitRoundingFailure;
}

int cmd_oracle(const std::string& graph_path, const ProgramFlags& prog, int max_n, const std::string& labels_out) {
  prog.check();
  const Graph g = read_graph(graph_path);
  OracleOptions opts;
  opts.max_n = max_n;
  opts.max_stored_ties = 100;
  const MleResult res = prog.known() ? mle_known_sizes(g, cli::parse_ints(prog.sizes), opts)
                                     : mle_unknown_sizes(g, prog.r, prog.omega, opts);
  if (!labels_out.empty()) write_labels(labels_out, res.best);
  print_json(cli::to_json(res));
  return kExitOk;
}

int cmd_certify(const std::string& graph_path, const std::string& labels_path, double p_tilde, double q_tilde,
                std::optional<double> omega, std::optional<double> p, std::optional<double> q,
                std::optional<double> c, bool identities) {
  const Graph g = read_graph(graph_path);
  const PartitionLabels truth = read_labels(labels_path);
  CertificateInputs in;
  if (omega) {
    if (!p || !q) throw ParameterError("--omega needs --p and --q");
    in = {*omega, *p, *q, std::nullopt};
  } else {
    PlantedPartitionParams params;
    params.n = g.num_vertices();
    params.r = truth.num_communities();
    for (int s : truth.sizes()) params.pi.push_back(static_cast<double>(s) / params.n);
    params.p_tilde = p_tilde;
    params.q_tilde = q_tilde;
    in = CertificateInputs::from_params(params);
  }
  in.c = c;
  const DualCertificate cert = build_certificate(g, truth, in);
  const CertificateReport rep = verify_certificate(g, truth, cert);
  json out = cli::to_json(rep);
  out["omega"] = cert.omega;
  out["c"] = cert.c;
  out["eps1"] = cert.eps1;
  out["eps2"] = cert.eps2;
  if (identities) {
    json ids = json::array();
    for (const IdentityCheck& chk : algebraic_identity_suite(cert, g, truth)) {
      ids.push_back({{"name", chk.name}, {"lhs", chk.lhs}, {"rhs", chk.rhs}, {"relative_error", chk.error},
                     {"pass", chk.pass}});
    }
    out["identities"] = ids;
  }
  print_json(out);
  return rep.verified ? kExitOk : kExitFailure;
}

struct SweepFlags {
  std::string config;
  std::vector<int> n;
  std::vector<std::string> pi;
  std::string p_tilde;
  std::string q_tilde;
  int trials = 10;
  std::uint64_t seed = 1;
  std::string algorithm = "solve-unknown";
  std::string adversary;
  bool no_certify = false;
  int jobs = 1;
  double tol = 1e-6;
  int max_iters = 20000;
  std::string out;
  std::string trials_out;

  void add(CLI::App* app) {
    app->add_option("--config", config, "Experiment JSON; flags below are ignored when given");
    app->add_option("--n", n, "Vertex counts")->delimiter(',');
    app->add_option("--pi", pi, "Proportions, comma separated; repeat for several");
    app->add_option("--p-tilde", p_tilde, "p_tilde values, comma separated");
    app->add_option("--q-tilde", q_tilde, "q_tilde values, comma separated");
    app->add_option("--trials", trials, "Trials per cell");
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--algorithm", algorithm, "solve-known | solve-unknown | certify-only");
    app->add_option("--adversary", adversary, "Adversary spec JSON file");
    app->add_flag("--no-certify", no_certify, "Skip certificate checks in solve modes");
    app->add_option("--jobs", jobs, "Concurrent trials");
    app->add_option("--tol", tol, "Solver tolerance");
    app->add_option("--max-iters", max_iters, "Solver iteration budget");
    app->add_option("--out", out, "Per-cell CSV (stdout when omitted)");
    app->add_option("--trials-out", trials_out, "Per-trial CSV");
  }

  ExperimentConfig config_value() const {
    ExperimentConfig cfg;
    if (!config.empty()) {
      cfg = cli::experiment_from_json(cli::read_json_file(config));
    } else {
      if (n.empty() || pi.empty() || p_tilde.empty() || q_tilde.empty()) {
        throw ParameterError("give --config or all of --n, --pi, --p-tilde, --q-tilde");
      }
      cfg.n_values = n;
      for (const std::string& s : pi) cfg.pi_values.push_back(cli::parse_doubles(s));
      cfg.p_tilde_values = cli::parse_doubles(p_tilde);
      cfg.q_tilde_values = cli::parse_doubles(q_tilde);
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.algorithm = algorithm_from_string(algorithm);
      cfg.certify = !no_certify;
      cfg.jobs = jobs;
      cfg.solver.tol = tol;
      cfg.solver.max_iters = max_iters;
    }
    if (!adversary.empty()) cfg.adversary = cli::adversary_from_json(cli::read_json_file(adversary)).spec;
    cfg.validate();
    return cfg;
  }
};

template <class Write>
void emit(const std::string& path, Write write) {
  if (path.empty()) {
    write(std::cout);
  } else {
    std::ofstream out = open_out(path);
    write(out);
  }
}

int cmd_phase(const SweepFlags& flags) {
  const ExperimentConfig cfg = flags.config_value();
  const PhaseDiagram pd = run_phase_diagram(cfg, &std::cerr);
  emit(flags.out, [&](std::ostream& o) { write_cells_csv(o, pd.cells); });
  if (!flags.trials_out.empty()) emit(flags.trials_out, [&](std::ostream& o) { write_trials_csv(o, pd.trials); });
  return kExitOk;
}

int cmd_robustness(const SweepFlags& flags) {
  const ExperimentConfig cfg = flags.config_value();
  const RobustnessReport rep = run_robustness_suite(cfg, &std::cerr);
  emit(flags.out, [&](std::ostream& o) { write_robustness_csv(o, rep.cells); });
  if (!flags.trials_out.empty()) {
    emit(flags.trials_out, [&](std::ostream& o) { write_paired_trials_csv(o, rep.trials); });
  }
  return kExitOk;
}

int cmd_tails(const ModelFlags& model, int i, int j, std::uint64_t samples, std::uint64_t seed) {
  print_json(cli::to_json(tail_exponent_demo(model.params(), i, j, samples, seed)));
  return kExitOk;
}

int cmd_omega_sweep(const std::string& graph_path, const std::string& labels_path, const std::string& r_values,
                    const std::string& omegas, const SolverOptions& opts, const std::string& out_path) {
  const Graph g = read_graph(graph_path);
  std::optional<PartitionLabels> truth;
  if (!labels_path.empty()) truth = read_labels(labels_path);
  const auto points = omega_sweep(g, cli::parse_ints(r_values), cli::parse_doubles(omegas), opts, {},
                                  truth ? &*truth : nullptr);
  emit(out_path, [&](std::ostream& o) { write_omega_sweep_csv(o, points); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planted partition recovery by semidefinite programming"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  std::uint64_t seed = 1;
  std::string graph_path, labels_path, graph_out, labels_out, matrix_out, out_path;

  auto* sample = app.add_subcommand("sample", "Sample a planted partition graph");
  ModelFlags sample_model;
  sample_model.add(sample);
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--out-graph", graph_out, "Graph file (stdout when omitted)");
  sample->add_option("--out-labels", labels_out, "Ground-truth labels file");
  sample->callback([&] { exit_code = cmd_sample(sample_model, seed, graph_out, labels_out); });

  auto* adversary = app.add_subcommand("adversary", "Apply a monotone adversary");
  std::string spec_path, changes_out;
  std::optional<std::uint64_t> adv_seed;
  adversary->add_option("--graph", graph_path, "Input graph")->required();
  adversary->add_option("--labels", labels_path, "Ground-truth labels")->required();
  adversary->add_option("--spec", spec_path, "Adversary JSON {kind, params, seed}")->required();
  adversary->add_option("--seed", adv_seed, "Overrides the spec seed");
  adversary->add_option("--out-graph", graph_out, "Output graph (stdout when omitted)");
  adversary->add_option("--out-changes", changes_out, "CSV of applied changes");
  adversary->callback(
      [&] { exit_code = cmd_adversary(graph_path, labels_path, spec_path, adv_seed, graph_out, changes_out); });

  auto* threshold = app.add_subcommand("threshold", "Divergence report for a model");
  ModelFlags threshold_model;
  threshold_model.add(threshold);
  threshold->callback([&] { exit_code = cmd_threshold(threshold_model); });

  SolverOptions solver;
  RoundOptions round;
  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", solver.tol, "Residual tolerance");
    sub->add_option("--max-iters", solver.max_iters, "Iteration budget");
  };

  auto* solve_cmd = app.add_subcommand("solve", "Solve the known- or unknown-sizes program");
  ProgramFlags solve_prog;
  solve_cmd->add_option("--graph", graph_path, "Input graph")->required();
  solve_prog.add(solve_cmd);
  add_solver_flags(solve_cmd);
  solve_cmd->add_option("--round-tol", round.round_tol, "Rounding tolerance");
  solve_cmd->add_option("--out-labels", labels_out, "Recovered labels");
  solve_cmd->add_option("--out-matrix", matrix_out, "Solution matrix, row-major text");
  solve_cmd->callback(
      [&] { exit_code = cmd_solve(graph_path, solve_prog, solver, round, labels_out, matrix_out); });

  auto* oracle = app.add_subcommand("oracle", "Brute-force maximum likelihood on a tiny graph");
  ProgramFlags oracle_prog;
  int max_n = 14;
  oracle->add_option("--graph", graph_path, "Input graph")->required();
  oracle_prog.add(oracle);
  oracle->add_option("--max-n", max_n, "Enumeration guard (raise at your own risk)");
  oracle->add_option("--out-labels", labels_out, "Best labels");
  oracle->callback([&] { exit_code = cmd_oracle(graph_path, oracle_prog, max_n, labels_out); });

  auto* certify = app.add_subcommand("certify", "Build and verify the dual certificate for given labels");
  double cert_p_tilde = 0.0, cert_q_tilde = 0.0;
  std::optional<double> cert_omega, cert_p, cert_q, cert_c;
  bool identities = false;
  certify->add_option("--graph", graph_path, "Input graph")->required();
  certify->add_option("--labels", labels_path, "Candidate labels")->required();
  certify->add_option("--p-tilde", cert_p_tilde, "Intra rate constant");
  certify->add_option("--q-tilde", cert_q_tilde, "Inter rate constant");
  certify->add_option("--omega", cert_omega, "Regularizer (with --p and --q)");
  certify->add_option("--p", cert_p, "Intra edge probability");
  certify->add_option("--q", cert_q, "Inter edge probability");
  certify->add_option("--c", cert_c, "Override the constant c");
  certify->add_flag("--identities", identities, "Also evaluate the algebraic identities");
  certify->callback([&] {
    exit_code = cmd_certify(graph_path, labels_path, cert_p_tilde, cert_q_tilde, cert_omega, cert_p, cert_q, cert_c,
                            identities);
  });

  auto* phase = app.add_subcommand("phase", "Recovery and certificate rates over a model grid");
  SweepFlags phase_flags;
  phase_flags.add(phase);
  phase->callback([&] { exit_code = cmd_phase(phase_flags); });

  auto* robustness = app.add_subcommand("robustness", "Paired clean/adversarial trials");
  SweepFlags robust_flags;
  robust_flags.add(robustness);
  robustness->callback([&] { exit_code = cmd_robustness(robust_flags); });

  auto* tails = app.add_subcommand("tails", "Monte-Carlo binomial tail exponent (demonstration)");
  ModelFlags tails_model;
  int tail_i = 0, tail_j = 1;
  std::uint64_t tail_samples = 100000;
  tails_model.add(tails);
  tails->add_option("--i", tail_i, "Community of the vertex");
  tails->add_option("--j", tail_j, "Competing community");
  tails->add_option("--samples", tail_samples, "Number of vertex samples");
  tails->add_option("--seed", seed, "Seed");
  tails->callback([&] { exit_code = cmd_tails(tails_model, tail_i, tail_j, tail_samples, seed); });

  auto* sweep = app.add_subcommand("omega-sweep", "Unknown-sizes program over a grid of (r, omega)");
  std::string r_values = "2", omegas;
  sweep->add_option("--graph", graph_path, "Input graph")->required();
  sweep->add_option("--labels", labels_path, "Ground truth, to flag matches");
  sweep->add_option("--r", r_values, "Community counts, comma separated");
  sweep->add_option("--omega", omegas, "Omega values, comma separated")->required();
  add_solver_flags(sweep);
  sweep->add_option("--out", out_path, "CSV output (stdout when omitted)");
  sweep->callback([&] { exit_code = cmd_omega_sweep(graph_path, labels_path, r_values, omegas, solver, out_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ppm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return exit_code;
}
