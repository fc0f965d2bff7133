#include "cli_support.hpp"

#include <fstream>
#include <sstream>

#include "ppmsdp/error.hpp"

namespace ppm::cli {

namespace {

template <class T>
std::vector<T> scalar_or_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ParameterError(where + ": unknown key '" + it.key() + "'");
  }
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const auto r = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(a)].size()) != r) {
      throw ParameterError("rate matrix must be square");
    }
    for (Eigen::Index b = 0; b < r; ++b) m(a, b) = rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < m.cols(); ++b) row.push_back(m(a, b));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

AdversaryFile adversary_from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("adversary spec must be a JSON object");
  reject_unknown(j, {"kind", "params", "seed"}, "adversary spec");
  AdversaryFile out;
  out.spec.kind = adversary_kind_from_string(j.at("kind").get<std::string>());
  out.seed = j.value("seed", std::uint64_t{0});
  const json params = j.value("params", json::object());
  reject_unknown(params,
                 {"add_prob", "remove_prob", "community", "plant_size", "plant_density", "hub_count", "hub_degree",
                  "target_rates", "base_p_tilde", "base_q_tilde", "script"},
                 "adversary params");
  AdversarySpec& s = out.spec;
  s.add_prob = params.value("add_prob", s.add_prob);
  s.remove_prob = params.value("remove_prob", s.remove_prob);
  s.community = params.value("community", s.community);
  s.plant_size = params.value("plant_size", s.plant_size);
  s.plant_density = params.value("plant_density", s.plant_density);
  s.hub_count = params.value("hub_count", s.hub_count);
  s.hub_degree = params.value("hub_degree", s.hub_degree);
  s.base_p_tilde = params.value("base_p_tilde", s.base_p_tilde);
  s.base_q_tilde = params.value("base_q_tilde", s.base_q_tilde);
  if (params.contains("target_rates")) s.target_rates = matrix_from_json(params.at("target_rates"));
  if (params.contains("script")) {
    for (const json& c : params.at("script")) {
      const std::string op = c.at("op").get<std::string>();
      if (op != "add" && op != "remove") throw ParameterError("script op must be 'add' or 'remove'");
      s.script.push_back({op == "add" ? EdgeChange::Op::kAdd : EdgeChange::Op::kRemove, c.at("u").get<int>(),
                          c.at("v").get<int>()});
    }
  }
  return out;
}

json adversary_to_json(const AdversarySpec& spec, std::uint64_t seed) {
  json params;
  switch (spec.kind) {
    case AdversaryKind::kNone: params = json::object(); break;
    case AdversaryKind::kRandomMonotone:
      params = {{"add_prob", spec.add_prob}, {"remove_prob", spec.remove_prob}};
      break;
    case AdversaryKind::kSubcommunityPlant:
      params = {{"community", spec.community}, {"plant_size", spec.plant_size}, {"plant_density", spec.plant_density}};
      break;
    case AdversaryKind::kHubPlant:
      params = {{"hub_count", spec.hub_count}, {"hub_degree", spec.hub_degree}};
      break;
    case AdversaryKind::kSbmDominate:
      params = {{"target_rates", matrix_to_json(spec.target_rates)},
                {"base_p_tilde", spec.base_p_tilde},
                {"base_q_tilde", spec.base_q_tilde}};
      break;
    case AdversaryKind::kScripted: {
      json script = json::array();
      for (const EdgeChange& c : spec.script) {
        script.push_back({{"op", c.op == EdgeChange::Op::kAdd ? "add" : "remove"}, {"u", c.u}, {"v", c.v}});
      }
      params = {{"script", script}};
      break;
    }
  }
  return {{"kind", to_string(spec.kind)}, {"params", params}, {"seed", seed}};
}

PlantedPartitionParams params_from_json(const json& j) {
  reject_unknown(j, {"n", "r", "pi", "p_tilde", "q_tilde"}, "model");
  PlantedPartitionParams p;
  p.n = j.at("n").get<int>();
  p.pi = j.at("pi").get<std::vector<double>>();
  p.r = j.value("r", static_cast<int>(p.pi.size()));
  p.p_tilde = j.at("p_tilde").get<double>();
  p.q_tilde = j.at("q_tilde").get<double>();
  return p;
}

json to_json(const DivergenceReport& rep) {
  json pairs = json::array();
  for (const PairDivergence& pd : rep.pairs) {
    pairs.push_back({{"i", pd.i}, {"j", pd.j}, {"divergence", pd.value}, {"t_star", pd.t_star}});
  }
  json out = {{"pairs", pairs},
              {"min_pair", {rep.min_pair.first, rep.min_pair.second}},
              {"min_divergence", rep.min_value},
              {"feasible", rep.feasible}};
  if (rep.predicted_min_pair) {
    out["predicted_min_pair"] = {rep.predicted_min_pair->first, rep.predicted_min_pair->second};
  }
  return out;
}

json to_json(const RegimeConstants& rc) {
  return {{"alpha", rc.alpha}, {"beta", rc.beta}, {"omega", rc.omega}, {"tau", rc.tau}};
}

json to_json(const CertificateReport& rep) {
  return {
      {"verified", rep.verified},
      {"construction_ok", rep.construction_ok},
      {"construction_failure", rep.construction_failure},
      {"intervals_nonempty", rep.intervals_nonempty},
      {"interval_margin", rep.interval_margin},
      {"nu_min", rep.nu_min},
      {"nu_reference", rep.nu_reference},
      {"lambda_consistent", rep.lambda_consistent},
      {"lambda_residual", rep.lambda_residual},
      {"R_positive", rep.R_positive},
      {"R_min", rep.R_min},
      {"gamma_symmetric", rep.gamma_symmetric},
      {"gamma_diagonal_blocks_zero", rep.gamma_diagonal_blocks_zero},
      {"gamma_off_blocks_positive", rep.gamma_off_blocks_positive},
      {"gamma_off_block_min", rep.gamma_off_block_min},
      {"kernel_residual", rep.kernel_residual},
      {"kernel_tolerance", rep.kernel_tolerance},
      {"kernel_ok", rep.kernel_ok},
      {"lambda_norm", rep.lambda_norm},
      {"psd_margin", rep.psd_margin},
      {"psd_tolerance", rep.psd_tolerance},
      {"psd_ok", rep.psd_ok},
      {"primal_objective", rep.primal_objective},
      {"dual_objective", rep.dual_objective},
      {"slackness_gap", rep.slackness_gap},
      {"slackness_tolerance", rep.slackness_tolerance},
      {"slackness_ok", rep.slackness_ok},
  };
}

json to_json(const MleResult& res) {
  return {{"labels", res.best_rgs},
          {"blocks", res.blocks},
          {"objective", res.objective},
          {"is_unique", res.is_unique},
          {"tie_count", res.tie_count},
          {"argmax", res.argmax},
          {"candidates", res.candidates}};
}

json to_json(const TailDemo& d) {
  return {{"note", "demonstration: the o(1) term in the exponent is material at desk scale"},
          {"i", d.i},
          {"j", d.j},
          {"threshold", d.threshold},
          {"samples", d.samples},
          {"events", d.events},
          {"frequency", d.frequency},
          {"exponent", d.exponent},
          {"one_sided", d.one_sided},
          {"exact_probability", d.exact_probability},
          {"exact_exponent", d.exact_exponent},
          {"divergence", d.divergence}};
}

ExperimentConfig experiment_from_json(const json& j) {
  reject_unknown(j,
                 {"n", "pi", "p_tilde", "q_tilde", "trials", "seed", "algorithm", "adversary", "certify", "tol",
                  "max_iters", "round_tol", "jobs"},
                 "experiment");
  ExperimentConfig cfg;
  cfg.n_values = scalar_or_list<int>(j.at("n"));
  const json& pi = j.at("pi");
  if (pi.is_array() && !pi.empty() && pi.front().is_array()) {
    cfg.pi_values = pi.get<std::vector<std::vector<double>>>();
  } else {
    cfg.pi_values = {pi.get<std::vector<double>>()};
  }
  cfg.p_tilde_values = scalar_or_list<double>(j.at("p_tilde"));
  cfg.q_tilde_values = scalar_or_list<double>(j.at("q_tilde"));
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("algorithm")) cfg.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  if (j.contains("adversary")) cfg.adversary = adversary_from_json(j.at("adversary")).spec;
  cfg.certify = j.value("certify", cfg.certify);
  cfg.solver.tol = j.value("tol", cfg.solver.tol);
  cfg.solver.max_iters = j.value("max_iters", cfg.solver.max_iters);
  cfg.rounding.round_tol = j.value("round_tol", cfg.rounding.round_tol);
  cfg.jobs = j.value("jobs", cfg.jobs);
  cfg.validate();
  return cfg;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError(path + ": " + e.what());
  }
}

namespace {

template <class T, class Conv>
std::vector<T> parse_list(const std::string& csv, Conv conv) {
  std::vector<T> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ParameterError("empty entry in list '" + csv + "'");
    std::size_t used = 0;
    T value{};
    try {
      value = conv(item, &used);
    } catch (const std::exception&) {
      throw ParameterError("cannot parse '" + item + "'");
    }
    if (used != item.size()) throw ParameterError("cannot parse '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw ParameterError("empty list");
  return out;
}

}  // namespace

std::vector<double> parse_doubles(const std::string& csv) {
  return parse_list<double>(csv, [](const std::string& s, std::size_t* k) { return std::stod(s, k); });
}

std::vector<int> parse_ints(const std::string& csv) {
  return parse_list<int>(csv, [](const std::string& s, std::size_t* k) { return std::stoi(s, k); });
}

}  // namespace ppm::cli
