#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppmsdp/certificate.hpp"
#include "ppmsdp/harness.hpp"
#include "ppmsdp/model.hpp"
#include "ppmsdp/oracle.hpp"
#include "ppmsdp/thresholds.hpp"

namespace ppm::cli {

using nlohmann::json;

/// {"kind": "...", "params": {...}, "seed": N}. Missing seed reads as 0.
struct AdversaryFile {
  AdversarySpec spec;
  std::uint64_t seed = 0;
};
AdversaryFile adversary_from_json(const json& j);
json adversary_to_json(const AdversarySpec& spec, std::uint64_t seed);

/// {"n", "r", "pi", "p_tilde", "q_tilde"}; r defaults to |pi|.
PlantedPartitionParams params_from_json(const json& j);

json to_json(const DivergenceReport& rep);
json to_json(const RegimeConstants& rc);
json to_json(const CertificateReport& rep);
json to_json(const MleResult& res);
json to_json(const TailDemo& demo);

/// Phase or robustness sweep description; see README for the keys.
ExperimentConfig experiment_from_json(const json& j);

json read_json_file(const std::string& path);
std::vector<double> parse_doubles(const std::string& csv);
std::vector<int> parse_ints(const std::string& csv);

}  // namespace ppm::cli
