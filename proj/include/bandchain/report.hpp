#pragma once

#include <nlohmann/json.hpp>

#include "bandchain/oracle.hpp"
#include "bandchain/spectral.hpp"
#include "bandchain/truncation.hpp"

namespace bandchain {

nlohmann::json to_json(const StructureDiagnostics& diag);
nlohmann::json to_json(const StationaryDistribution& pi, bool include_prefix = false);
nlohmann::json to_json(const SpectralReport& rep);
nlohmann::json to_json(const TruncationResult& r, bool include_spectrum = false);
nlohmann::json to_json(const RateEstimate& est);
nlohmann::json to_json(const oracle::DecayFit& fit);
nlohmann::json to_json(const oracle::Lemma1Report& rep);

} // namespace bandchain
