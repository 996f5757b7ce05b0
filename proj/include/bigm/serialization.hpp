#ifndef BIGM_SERIALIZATION_HPP
#define BIGM_SERIALIZATION_HPP

#include <string>

#include <json.hpp>

#include "bigm/calibrator.hpp"
#include "bigm/degeneracy.hpp"
#include "bigm/problem.hpp"
#include "bigm/solvers.hpp"
#include "bigm/spectral.hpp"

namespace bigm {

using Json = nlohmann::json;

Json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const Json& j);

Json degeneracy_to_json(const DegeneracyTable& table);
DegeneracyTable degeneracy_from_json(const Json& j);

Json spectral_to_json(const SpectralWeights& weights);
SpectralWeights spectral_from_json(const Json& j);

Json calibration_to_json(const CalibrationConfig& cfg, const CalibrationResult& result);

Json report_to_json(const SolveReport& report, bool include_samples = false);

/// Formats a numeric CSV field with 12 significant digits.
std::string csv_number(double value);

void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

} // namespace bigm

#endif // BIGM_SERIALIZATION_HPP
