#include "bandchain/report.hpp"

namespace bandchain {

using nlohmann::json;

json to_json(const StructureDiagnostics& diag) {
    return json{{"k", diag.k},
                {"irreducible", diag.irreducible},
                {"aperiodic", diag.aperiodic},
                {"band_violations", diag.band_violations},
                {"note", diag.note}};
}

json to_json(const StationaryDistribution& pi, bool include_prefix) {
    json j{{"k", pi.k},
           {"tau_hat", pi.tau_hat},
           {"tau_zero_flagged", pi.tau_zero_flagged},
           {"residual", pi.residual}};
    if (include_prefix) j["prefix"] = pi.prefix;
    return j;
}

json to_json(const SpectralReport& rep) {
    return json{{"tau", rep.tau},
                {"tau_zero", rep.tau_zero},
                {"alpha0_closed", rep.alpha0_closed},
                {"alpha0_empirical",
                 {{"value", rep.alpha0_empirical.value},
                  {"ell", rep.alpha0_empirical.ell},
                  {"horizon", rep.alpha0_empirical.horizon}}},
                {"mean_increment", rep.mean_increment},
                {"drift",
                 {{"gamma", rep.drift.gamma},
                  {"alpha", rep.drift.alpha},
                  {"L", rep.drift.L},
                  {"delta", rep.drift.delta},
                  {"horizon", rep.drift.horizon}}},
                {"ess_radius_bound", rep.ess_radius_bound}};
}

json to_json(const TruncationResult& r, bool include_spectrum) {
    json j{{"k", r.k},
           {"rho_k", r.rho_k},
           {"unit_count", r.unit_count},
           {"periodicity_suspected", r.periodicity_suspected},
           {"backward_error", r.backward_error},
           {"wall_ms", r.wall_ms},
           {"ok", r.ok}};
    if (!r.ok) j["error"] = r.error;
    if (include_spectrum) {
        json spec = json::array();
        for (const auto& z : r.spectrum)
            spec.push_back(json{{"re", z.real()}, {"im", z.imag()}});
        j["spectrum"] = spec;
    }
    return j;
}

json to_json(const RateEstimate& est) {
    json j{{"case", to_string(est.rate_case)},
           {"rho2", est.rho2},
           {"rho_limit", est.rho_limit},
           {"cauchy_gap", est.cauchy_gap},
           {"fitted_C", est.fitted_C}};
    if (est.rhoV_is_bound)
        j["rhoV"] = json{{"bound", est.rhoV}};
    else
        j["rhoV"] = est.rhoV;
    return j;
}

json to_json(const oracle::DecayFit& fit) {
    return json{{"rate", fit.rate},
                {"prefactor", fit.prefactor},
                {"window", {fit.window_lo, fit.window_hi}},
                {"r_squared", fit.r_squared}};
}

json to_json(const oracle::Lemma1Report& rep) {
    return json{{"max_violation", rep.max_violation},
                {"min_feasible_L", rep.min_feasible_L},
                {"sample_count", rep.sample_count},
                {"seed", rep.seed},
                {"violations", rep.violations}};
}

} // namespace bandchain
