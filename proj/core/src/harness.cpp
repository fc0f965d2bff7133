#include "ppmsdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "ppmsdp/certificate.hpp"
#include "ppmsdp/error.hpp"
#include "ppmsdp/rng.hpp"
#include "ppmsdp/thresholds.hpp"

namespace ppm {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kSolveKnown: return "solve-known";
    case Algorithm::kSolveUnknown: return "solve-unknown";
    case Algorithm::kCertifyOnly: return "certify-only";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "solve-known") return Algorithm::kSolveKnown;
  if (name == "solve-unknown") return Algorithm::kSolveUnknown;
  if (name == "certify-only") return Algorithm::kCertifyOnly;
  throw ParameterError("unknown algorithm '" + name + "'");
}

PlantedPartitionParams ModelCell::params() const {
  return {n, static_cast<int>(pi.size()), pi, p_tilde, q_tilde};
}

std::vector<ModelCell> ExperimentConfig::cells() const {
  std::vector<ModelCell> out;
  for (int n : n_values) {
    for (const auto& pi : pi_values) {
      for (double pt : p_tilde_values) {
        for (double qt : q_tilde_values) out.push_back({n, pi, pt, qt});
      }
    }
  }
  return out;
}

double ExperimentConfig::estimated_seconds() const {
  double per_unit = 0.0;
  switch (algorithm) {
    case Algorithm::kSolveKnown: per_unit = 1.5; break;
    case Algorithm::kSolveUnknown: per_unit = 4.0; break;
    case Algorithm::kCertifyOnly: per_unit = 0.0; break;
  }
  if (certify || algorithm == Algorithm::kCertifyOnly) per_unit += 0.1;
  double total = 0.0;
  for (const ModelCell& c : cells()) total += trials * per_unit * std::pow(c.n / 300.0, 3.0);
  return total;
}

void ExperimentConfig::validate() const {
  if (n_values.empty() || pi_values.empty() || p_tilde_values.empty() || q_tilde_values.empty()) {
    throw ParameterError("experiment: every grid axis needs at least one value");
  }
  if (trials < 1) throw ParameterError("experiment: trials must be at least 1");
  if (jobs < 1) throw ParameterError("experiment: jobs must be at least 1");
}

std::uint64_t trial_seed(std::uint64_t base, int cell, int trial) {
  return derive_seed(base, static_cast<std::uint64_t>(Stream::kTrial), static_cast<std::uint64_t>(cell),
                     static_cast<std::uint64_t>(trial));
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
void parallel_for(int count, int jobs, F&& body) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) body(k);
    });
  }
  for (auto& th : pool) th.join();
}

std::uint64_t adversary_seed(std::uint64_t seed) {
  return derive_seed(seed, static_cast<std::uint64_t>(Stream::kAdversaryChoice));
}

// Samples the trial graph, optionally applies the adversary, and evaluates.
TrialRecord run_sampled(const ExperimentConfig& cfg, const ModelCell& cell, int cell_index, int trial,
                        bool with_adversary) {
  const std::uint64_t seed = trial_seed(cfg.seed, cell_index, trial);
  TrialRecord rec;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const PlantedPartitionParams params = cell.params();
    PlantedSample sample = sample_ppm(params, seed);
    std::size_t changes = 0;
    if (with_adversary && cfg.adversary) {
      AdversaryResult adv = apply_adversary(sample.graph, sample.truth, *cfg.adversary, adversary_seed(seed));
      sample.graph = std::move(adv.graph);
      changes = adv.changes.size();
    }
    rec = evaluate_trial(sample.graph, sample.truth, params, cfg);
    rec.adversary_changes = changes;
  } catch (const std::exception& e) {
    rec.outcome = TrialRecord::Outcome::kError;
    rec.error = e.what();
  }
  rec.cell = cell_index;
  rec.trial = trial;
  rec.seed = seed;
  rec.seconds = seconds_since(t0);
  return rec;
}

CellResult aggregate(const ModelCell& cell, Algorithm algorithm, const TrialRecord* first, int count) {
  CellResult res;
  res.cell = cell;
  res.r = static_cast<int>(cell.pi.size());
  res.algorithm = algorithm;
  try {
    res.min_divergence = feasibility_report(cell.params()).min_value;
  } catch (const std::exception&) {
    res.min_divergence = std::nan("");
  }
  res.trials = count;
  double iterations = 0.0;
  int recovered = 0;
  int certified = 0;
  for (int k = 0; k < count; ++k) {
    const TrialRecord& t = first[k];
    switch (t.outcome) {
      case TrialRecord::Outcome::kSuccess: ++res.successes; break;
      case TrialRecord::Outcome::kFailure: ++res.failures; break;
      case TrialRecord::Outcome::kError: ++res.errors; break;
    }
    recovered += t.recovered ? 1 : 0;
    certified += t.certified ? 1 : 0;
    iterations += t.iterations;
    res.wall_seconds += t.seconds;
  }
  if (count > 0) {
    res.recovery_rate = static_cast<double>(recovered) / count;
    res.certified_rate = static_cast<double>(certified) / count;
    res.mean_iterations = iterations / count;
  }
  return res;
}

void announce(std::ostream* progress, const ExperimentConfig& cfg, std::size_t cells, double factor) {
  if (progress == nullptr) return;
  char buf[160];
  std::snprintf(buf, sizeof buf, "cells: %zu, trials per cell: %d, total trials: %zu, estimated time: %.0f s\n",
                cells, cfg.trials, cells * static_cast<std::size_t>(cfg.trials) * static_cast<std::size_t>(factor),
                cfg.estimated_seconds() * factor / std::max(1, cfg.jobs));
  *progress << buf << std::flush;
}

}  // namespace

TrialRecord evaluate_trial(const Graph& g, const PartitionLabels& truth, const PlantedPartitionParams& params,
                           const ExperimentConfig& cfg) {
  TrialRecord rec;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const int r = truth.num_communities();
    if (cfg.algorithm != Algorithm::kCertifyOnly) {
      const SdpProblem prob = cfg.algorithm == Algorithm::kSolveKnown
                                  ? build_known_sizes(g, truth.sizes())
                                  : build_unknown_sizes(g, r, regime_constants(params).omega);
      const SdpSolution sol = solve(prob, cfg.solver);
      const RoundResult rr = round_to_partition(sol.X, r, cfg.rounding);
      rec.converged = sol.converged;
      rec.iterations = sol.iterations;
      rec.recovered = sol.converged && rr.ok() && same_partition(*rr.labels, truth);
    }
    if (cfg.certify || cfg.algorithm == Algorithm::kCertifyOnly) {
      const DualCertificate cert = build_certificate(g, truth, params);
      rec.certified = verify_certificate(g, truth, cert).verified;
    }
    const bool ok = cfg.algorithm == Algorithm::kCertifyOnly ? rec.certified : rec.recovered;
    rec.outcome = ok ? TrialRecord::Outcome::kSuccess : TrialRecord::Outcome::kFailure;
  } catch (const std::exception& e) {
    rec.outcome = TrialRecord::Outcome::kError;
    rec.error = e.what();
  }
  rec.seconds = seconds_since(t0);
  return rec;
}

PhaseDiagram run_phase_diagram(const ExperimentConfig& cfg, std::ostream* progress) {
  cfg.validate();
  const std::vector<ModelCell> cells = cfg.cells();
  announce(progress, cfg, cells.size(), 1.0);
  const int total = static_cast<int>(cells.size()) * cfg.trials;
  PhaseDiagram out;
  out.trials.resize(static_cast<std::size_t>(total));
  parallel_for(total, cfg.jobs, [&](int k) {
    const int c = k / cfg.trials;
    out.trials[static_cast<std::size_t>(k)] =
        run_sampled(cfg, cells[static_cast<std::size_t>(c)], c, k % cfg.trials, true);
  });
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out.cells.push_back(aggregate(cells[c], cfg.algorithm, &out.trials[c * static_cast<std::size_t>(cfg.trials)],
                                  cfg.trials));
  }
  return out;
}

RobustnessReport run_robustness_suite(const ExperimentConfig& cfg, std::ostream* progress) {
  cfg.validate();
  if (!cfg.adversary) throw ParameterError("robustness: an adversary spec is required");
  const std::vector<ModelCell> cells = cfg.cells();
  announce(progress, cfg, cells.size(), 2.0);
  const int total = static_cast<int>(cells.size()) * cfg.trials;
  std::vector<TrialRecord> clean(static_cast<std::size_t>(total));
  std::vector<TrialRecord> adv(static_cast<std::size_t>(total));
  parallel_for(2 * total, cfg.jobs, [&](int k) {
    const int idx = k / 2;
    const int c = idx / cfg.trials;
    auto& slot = (k % 2 == 0 ? clean : adv)[static_cast<std::size_t>(idx)];
    slot = run_sampled(cfg, cells[static_cast<std::size_t>(c)], c, idx % cfg.trials, k % 2 == 1);
  });
  RobustnessReport rep;
  for (int idx = 0; idx < total; ++idx) {
    PairedTrial pt;
    pt.cell = idx / cfg.trials;
    pt.trial = idx % cfg.trials;
    pt.clean = clean[static_cast<std::size_t>(idx)];
    pt.adversarial = adv[static_cast<std::size_t>(idx)];
    pt.seed = pt.clean.seed;
    pt.violation = pt.clean.recovered && !pt.adversarial.recovered;
    rep.trials.push_back(std::move(pt));
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::size_t off = c * static_cast<std::size_t>(cfg.trials);
    RobustnessCell rc;
    rc.clean = aggregate(cells[c], cfg.algorithm, &clean[off], cfg.trials);
    rc.adversarial = aggregate(cells[c], cfg.algorithm, &adv[off], cfg.trials);
    rc.recovery_delta = rc.adversarial.recovery_rate - rc.clean.recovery_rate;
    for (int t = 0; t < cfg.trials; ++t) rc.violations += rep.trials[off + static_cast<std::size_t>(t)].violation ? 1 : 0;
    rep.cells.push_back(rc);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string join_pi(const std::vector<double>& pi) {
  std::string s;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    if (k) s += ';';
    s += num(pi[k]);
  }
  return s;
}

std::string outcome_name(TrialRecord::Outcome o) {
  switch (o) {
    case TrialRecord::Outcome::kSuccess: return "success";
    case TrialRecord::Outcome::kFailure: return "failure";
    case TrialRecord::Outcome::kError: return "error";
  }
  return "error";
}

// Errors may contain commas or quotes.
std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

void cell_columns(std::ostream& out, const CellResult& c) {
  out << c.cell.n << ',' << c.r << ',' << join_pi(c.cell.pi) << ',' << num(c.cell.p_tilde) << ','
      << num(c.cell.q_tilde) << ',' << num(c.min_divergence) << ',' << to_string(c.algorithm);
}

}  // namespace

void write_cells_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "cell,n,r,pi,p_tilde,q_tilde,min_divergence,algorithm,trials,successes,failures,errors,"
         "recovery_rate,certified_rate,mean_iterations,wall_seconds\n";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const CellResult& c = cells[k];
    out << k << ',';
    cell_columns(out, c);
    out << ',' << c.trials << ',' << c.successes << ',' << c.failures << ',' << c.errors << ','
        << num(c.recovery_rate) << ',' << num(c.certified_rate) << ',' << num(c.mean_iterations) << ','
        << num(c.wall_seconds) << '\n';
  }
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
  out << "cell,trial,seed,outcome,recovered,certified,converged,iterations,adversary_changes,error,seconds\n";
  for (const TrialRecord& t : trials) {
    out << t.cell << ',' << t.trial << ',' << t.seed << ',' << outcome_name(t.outcome) << ',' << t.recovered << ','
        << t.certified << ',' << t.converged << ',' << t.iterations << ',' << t.adversary_changes << ','
        << quoted(t.error) << ',' << num(t.seconds) << '\n';
  }
}

void write_robustness_csv(std::ostream& out, const std::vector<RobustnessCell>& cells) {
  out << "cell,n,r,pi,p_tilde,q_tilde,min_divergence,algorithm,trials,clean_recovery_rate,"
         "adversarial_recovery_rate,recovery_delta,violations,clean_certified_rate,adversarial_certified_rate,"
         "clean_errors,adversarial_errors,wall_seconds\n";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const RobustnessCell& c = cells[k];
    out << k << ',';
    cell_columns(out, c.clean);
    out << ',' << c.clean.trials << ',' << num(c.clean.recovery_rate) << ',' << num(c.adversarial.recovery_rate)
        << ',' << num(c.recovery_delta) << ',' << c.violations << ',' << num(c.clean.certified_rate) << ','
        << num(c.adversarial.certified_rate) << ',' << c.clean.errors << ',' << c.adversarial.errors << ','
        << num(c.clean.wall_seconds + c.adversarial.wall_seconds) << '\n';
  }
}

void write_paired_trials_csv(std::ostream& out, const std::vector<PairedTrial>& trials) {
  out << "cell,trial,seed,clean_recovered,adversarial_recovered,violation,adversary_changes,clean_error,"
         "adversarial_error\n";
  for (const PairedTrial& t : trials) {
    out << t.cell << ',' << t.trial << ',' << t.seed << ',' << t.clean.recovered << ',' << t.adversarial.recovered
        << ',' << t.violation << ',' << t.adversarial.adversary_changes << ',' << quoted(t.clean.error) << ','
        << quoted(t.adversarial.error) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Tail demonstration

namespace {

std::vector<double> binomial_pmf(int trials, double prob) {
  std::vector<double> pmf(static_cast<std::size_t>(trials) + 1);
  const double lp = std::log(prob);
  const double lq = std::log1p(-prob);
  for (int k = 0; k <= trials; ++k) {
    pmf[static_cast<std::size_t>(k)] =
        std::exp(std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) + k * lp +
                 (trials - k) * lq);
  }
  return pmf;
}

std::vector<double> cumulative(const std::vector<double>& pmf) {
  std::vector<double> cdf(pmf.size());
  double s = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) cdf[k] = s += pmf[k];
  return cdf;
}

int draw(const std::vector<double>& cdf, double u) {
  const double scaled = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), scaled);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace

TailDemo tail_exponent_demo(const PlantedPartitionParams& params, int i, int j, std::uint64_t samples,
                            std::uint64_t seed) {
  params.validate();
  const int r = params.r;
  if (i < 0 || j < 0 || i >= r || j >= r || i == j) throw ParameterError("tails: need distinct communities in range");
  if (samples == 0) throw ParameterError("tails: need at least one sample");
  const std::vector<int> sizes = params.community_sizes();
  const double n = params.n;
  const double log_n = std::log(n);
  const double pi_i = params.pi[static_cast<std::size_t>(i)];
  const double pi_j = params.pi[static_cast<std::size_t>(j)];

  TailDemo demo;
  demo.i = i;
  demo.j = j;
  demo.samples = samples;
  demo.threshold = compute_tau(params.p_tilde, params.q_tilde) * (pi_i - pi_j) * log_n;
  demo.divergence = ch_divergence_closed_form(params, i, j);

  const std::vector<double> pmf_a = binomial_pmf(sizes[static_cast<std::size_t>(i)] - 1, params.p());
  const std::vector<double> pmf_b = binomial_pmf(sizes[static_cast<std::size_t>(j)], params.q());
  const std::vector<double> cdf_a = cumulative(pmf_a);
  const std::vector<double> cdf_b = cumulative(pmf_b);

  // P(b >= k) by suffix sums, then sum over a.
  std::vector<double> tail_b(pmf_b.size() + 1, 0.0);
  for (std::size_t k = pmf_b.size(); k-- > 0;) tail_b[k] = tail_b[k + 1] + pmf_b[k];
  double exact = 0.0;
  for (std::size_t a = 0; a < pmf_a.size(); ++a) {
    const double need = std::ceil(static_cast<double>(a) - demo.threshold - 1e-12);
    const auto k = static_cast<std::size_t>(std::clamp(need, 0.0, static_cast<double>(pmf_b.size())));
    exact += pmf_a[a] * tail_b[k];
  }
  demo.exact_probability = exact;
  demo.exact_exponent = exact > 0.0 ? -std::log(exact) / log_n : std::numeric_limits<double>::infinity();

  SplitMix64 rng(seed, Stream::kTails);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const int a = draw(cdf_a, rng.uniform01());
    const int b = draw(cdf_b, rng.uniform01());
    if (a - b <= demo.threshold) ++demo.events;
  }
  demo.frequency = static_cast<double>(demo.events) / static_cast<double>(samples);
  if (demo.events == 0) {
    demo.one_sided = true;
    demo.exponent = std::log(static_cast<double>(samples)) / log_n;
  } else {
    demo.exponent = -std::log(demo.frequency) / log_n;
  }
  return demo;
}

// ---------------------------------------------------------------------------
// Omega sweep

std::vector<OmegaPoint> omega_sweep(const Graph& g, const std::vector<int>& r_values, const std::vector<double>& omegas,
                                    const SolverOptions& solver, const RoundOptions& rounding,
                                    const PartitionLabels* truth) {
  std::vector<OmegaPoint> out;
  for (int r : r_values) {
    for (double w : omegas) {
      OmegaPoint pt;
      pt.r = r;
      pt.omega = w;
      const SdpSolution sol = solve(build_unknown_sizes(g, r, w), solver);
      pt.converged = sol.converged;
      pt.iterations = sol.iterations;
      pt.objective = sol.objective;
      RoundResult rr = round_to_partition(sol.X, r, rounding);
      pt.max_deviation = rr.max_deviation;
      if (rr.ok()) {
        pt.labels = std::move(rr.labels);
        if (truth != nullptr) pt.matches_truth = same_partition(*pt.labels, *truth);
      }
      out.push_back(std::move(pt));
    }
  }
  return out;
}

void write_omega_sweep_csv(std::ostream& out, const std::vector<OmegaPoint>& points) {
  out << "r,omega,converged,iterations,objective,partition,max_deviation,community_sizes,matches_truth\n";
  for (const OmegaPoint& p : points) {
    std::string sizes;
    if (p.labels) {
      for (std::size_t k = 0; k < p.labels->sizes().size(); ++k) {
        if (k) sizes += ';';
        sizes += std::to_string(p.labels->sizes()[k]);
      }
    }
    out << p.r << ',' << num(p.omega) << ',' << p.converged << ',' << p.iterations << ',' << num(p.objective) << ','
        << (p.labels ? 1 : 0) << ',' << num(p.max_deviation) << ',' << sizes << ','
        << (p.matches_truth ? (*p.matches_truth ? "1" : "0") : "") << '\n';
  }
}

}  // namespace ppm
