#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ppmsdp/graph.hpp"
#include "ppmsdp/model.hpp"
#include "ppmsdp/sdp.hpp"

namespace ppm {

enum class Algorithm { kSolveKnown, kSolveUnknown, kCertifyOnly };

std::string to_string(Algorithm a);
/// Accepts "solve-known", "solve-unknown", "certify-only".
Algorithm algorithm_from_string(const std::string& name);

/// One point of the model grid.
struct ModelCell {
  int n = 0;
  std::vector<double> pi;
  double p_tilde = 0.0;
  double q_tilde = 0.0;

  PlantedPartitionParams params() const;
};

struct ExperimentConfig {
  std::vector<int> n_values;
  std::vector<std::vector<double>> pi_values;
  std::vector<double> p_tilde_values;
  std::vector<double> q_tilde_values;
  int trials = 10;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::kSolveUnknown;
  std::optional<AdversarySpec> adversary;
  /// Certificate checks alongside the solver (always on for certify-only).
  bool certify = true;
  SolverOptions solver;
  RoundOptions rounding;
  int jobs = 1;

  /// Cartesian product in (n, pi, p_tilde, q_tilde) order, q_tilde fastest.
  std::vector<ModelCell> cells() const;
  /// Rough single-core seconds for the whole sweep.
  double estimated_seconds() const;
  /// Throws ParameterError on empty grids, trials < 1 or jobs < 1.
  void validate() const;
};

/// Trial seed: derive_seed(base, Stream::kTrial, cell, trial).
std::uint64_t trial_seed(std::uint64_t base, int cell, int trial);

struct TrialRecord {
  int cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  enum class Outcome { kSuccess, kFailure, kError } outcome = Outcome::kError;
  bool recovered = false;
  bool certified = false;
  bool converged = false;
  int iterations = 0;
  std::size_t adversary_changes = 0;
  double seconds = 0.0;
  std::string error;
};

struct CellResult {
  ModelCell cell;
  int r = 0;
  double min_divergence = 0.0;
  Algorithm algorithm = Algorithm::kSolveUnknown;
  int trials = 0;
  int successes = 0;
  int failures = 0;
  int errors = 0;
  double recovery_rate = 0.0;
  double certified_rate = 0.0;
  double mean_iterations = 0.0;
  double wall_seconds = 0.0;
};

struct PhaseDiagram {
  std::vector<CellResult> cells;
  std::vector<TrialRecord> trials;  // ordered by (cell, trial)
};

/// Samples every (cell, trial), applies the optional adversary, and runs the
/// selected algorithm. Per-trial exceptions are recorded, never propagated.
/// Trials run on up to cfg.jobs threads; results do not depend on jobs.
PhaseDiagram run_phase_diagram(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

/// Runs one trial on an explicit graph (no sampling).
TrialRecord evaluate_trial(const Graph& g, const PartitionLabels& truth,
                           const PlantedPartitionParams& params, const ExperimentConfig& cfg);

struct PairedTrial {
  int cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  TrialRecord clean;
  TrialRecord adversarial;
  /// Clean graph recovered but the adversarial one did not.
  bool violation = false;
};

struct RobustnessCell {
  CellResult clean;
  CellResult adversarial;
  double recovery_delta = 0.0;  // adversarial - clean
  int violations = 0;
};

struct RobustnessReport {
  std::vector<RobustnessCell> cells;
  std::vector<PairedTrial> trials;
};

/// Paired trials: the same sample with and without cfg.adversary.
/// Throws ParameterError when no adversary is configured.
RobustnessReport run_robustness_suite(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

// CSV output. Timing columns come last so they can be dropped when comparing runs.
void write_cells_csv(std::ostream& out, const std::vector<CellResult>& cells);
void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials);
void write_robustness_csv(std::ostream& out, const std::vector<RobustnessCell>& cells);
void write_paired_trials_csv(std::ostream& out, const std::vector<PairedTrial>& trials);

/// Monte-Carlo frequency of E(v,i) - E(v,j) <= tau (pi_i - pi_j) log n for a
/// vertex v of community i, with E(v,i) ~ Bin(s_i - 1, p), E(v,j) ~ Bin(s_j, q)
/// drawn independently. A demonstration: the o(1) term in the exponent is
/// material at desk scale.
struct TailDemo {
  int i = 0;
  int j = 0;
  double threshold = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t events = 0;
  double frequency = 0.0;
  /// -log(frequency) / log n; with zero events this is the lower bound
  /// log(samples) / log n and `one_sided` is set.
  double exponent = 0.0;
  bool one_sided = false;
  double exact_probability = 0.0;
  double exact_exponent = 0.0;
  double divergence = 0.0;
};

TailDemo tail_exponent_demo(const PlantedPartitionParams& params, int i, int j, std::uint64_t samples,
                            std::uint64_t seed);

struct OmegaPoint {
  int r = 0;
  double omega = 0.0;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  /// Set when the solution rounds to a partition matrix.
  std::optional<PartitionLabels> labels;
  double max_deviation = 0.0;
  /// Set when a truth was supplied and labels were found.
  std::optional<bool> matches_truth;
};

/// Solves the unknown-sizes program for each (r, omega) and records which
/// points return partition matrices.
std::vector<OmegaPoint> omega_sweep(const Graph& g, const std::vector<int>& r_values,
                                    const std::vector<double>& omegas, const SolverOptions& solver = {},
                                    const RoundOptions& rounding = {},
                                    const PartitionLabels* truth = nullptr);

void write_omega_sweep_csv(std::ostream& out, const std::vector<OmegaPoint>& points);

}  // namespace ppm
