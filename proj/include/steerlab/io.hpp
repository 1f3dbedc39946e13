#pragma once

// JSON and CSV serialization of matrices, maps and spectra.
//
// Matrix JSON: {"dim": M, "re": [...], "im": [...]} with M*M row-major entries.
// Map JSON:    {"variant": "...", "e": <matrix>, "sigma_s": <matrix>, "sigma_a": <matrix>}.
// The "e" matrix is a general complex matrix; the sigmas must be Hermitian.

#include <string>

#include "json.hpp"

#include "steerlab/adaptation.hpp"
#include "steerlab/beamforming.hpp"
#include "steerlab/linalg.hpp"

namespace steerlab {

nlohmann::json matrix_to_json(const CMatrix& m);
/// InvalidInput on a malformed document.
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json map_to_json(const AdaptationMap& map);
AdaptationMap map_from_json(const nlohmann::json& j);

void write_json(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json(const std::string& path);

/// Two columns: theta_deg, power_db.
void write_spectrum_csv(const Spectrum& spectrum, const std::string& path);

}  // namespace steerlab
