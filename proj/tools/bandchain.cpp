#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bandchain/kernel.hpp"
#include "bandchain/oracle.hpp"
#include "bandchain/report.hpp"
#include "bandchain/spectral.hpp"
#include "bandchain/stationary.hpp"
#include "bandchain/truncation.hpp"

namespace {

using namespace bandchain;
using nlohmann::json;

struct AnalysisConfig {
    std::string spec_path;
    std::vector<Index> k_grid{25, 50, 100, 200};
    double unit_tol = 1e-9;
    double decision_margin = 0.01;
    Index horizon = 200;
    Index ell = 10;
    std::uint64_t seed = 0x5eed5eedULL;
    std::string out_dir;

    void validate() const {
        if (!std::is_sorted(k_grid.begin(), k_grid.end()) ||
            std::adjacent_find(k_grid.begin(), k_grid.end()) != k_grid.end())
            throw Error("k-grid must be strictly increasing");
        if (unit_tol <= 0.0 || decision_margin <= 0.0)
            throw Error("tolerances must be positive");
    }
};

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name);
    out << content;
}

// Stationary level big enough for the empirical horizon, the adjoint band
// margin, and the largest sweep truncation.
Index stationary_level(const AnalysisConfig& cfg, const BandKernel& kernel) {
    const int N = kernel.half_bandwidth();
    Index k = cfg.horizon + 3 * N + 10;
    if (!cfg.k_grid.empty()) k = std::max(k, cfg.k_grid.back() + 3 * N + 10);
    return k;
}

int cmd_analyze(const AnalysisConfig& cfg) {
    cfg.validate();
    const BandKernel kernel = load_chain_spec(cfg.spec_path);
    const Index k_pi = stationary_level(cfg, kernel);

    json report;
    report["config"] = {{"spec", cfg.spec_path},
                        {"k_grid", cfg.k_grid},
                        {"unit_tol", cfg.unit_tol},
                        {"decision_margin", cfg.decision_margin},
                        {"horizon", cfg.horizon},
                        {"ell", cfg.ell},
                        {"seed", cfg.seed}};
    report["augmentation"] = "last_column";

    const StructureDiagnostics diag = validate_structure(kernel, cfg.k_grid.back());
    report["structure"] = to_json(diag);
    if (!diag.ok()) {
        std::cerr << "structure validation failed at k = " << diag.k << "\n";
        std::cout << report.dump(2) << "\n";
        return 1;
    }

    const StationaryDistribution pi = stationary_prefix(kernel, k_pi);
    report["stationary"] = to_json(pi);

    const Index ell = std::max(cfg.ell, kernel.i0());
    const SpectralReport spectral = analyze_spectral(kernel, pi, ell, cfg.horizon);
    report["spectral"] = to_json(spectral);

    const Index k_rev = std::min<Index>(k_pi - kernel.half_bandwidth() - 1, 100);
    report["reversible"] = is_reversible(kernel, pi, k_rev);

    const auto results = sweep(kernel, cfg.k_grid, cfg.unit_tol);
    json sweep_json = json::array();
    for (const auto& r : results) sweep_json.push_back(to_json(r));
    report["sweep"] = sweep_json;

    RateEstimate est = classify(results, spectral.alpha0_closed, cfg.decision_margin);

    // Oracle cross-checks; the decay fit also supplies the informational C.
    json oracle_json;
    {
        const Index k_small = std::min<Index>(
            7, std::max(kernel.i0() + kernel.half_bandwidth(), Index{2}));
        const Eigen::MatrixXd P_small = truncate_augment(kernel, k_small);
        const auto qr_spec = spectrum(P_small).eigenvalues;
        auto cp_spec = oracle::charpoly_spectrum(P_small);
        double worst = 0.0;
        for (const auto& z : qr_spec) {
            double best = 1e300;
            for (const auto& w : cp_spec) best = std::min(best, std::abs(z - w));
            worst = std::max(worst, best);
        }
        oracle_json["charpoly_max_mismatch"] = worst;
        oracle_json["charpoly_order"] = k_small + 1;

        const auto* last_ok = &results.back();
        for (auto it = results.rbegin(); it != results.rend(); ++it)
            if (it->ok) { last_ok = &*it; break; }
        const Eigen::MatrixXd Pk = truncate_augment(kernel, last_ok->k);
        const StationaryDistribution pi_k = stationary_prefix(kernel, last_ok->k);
        std::vector<double> f(static_cast<std::size_t>(last_ok->k) + 1, 0.0);
        f[0] = 1.0;
        const auto fit = oracle::power_decay_rate(Pk, pi_k.prefix, f, 30, 200);
        oracle_json["decay_fit"] = to_json(fit);
        est.fitted_C = fit.prefactor;

        const double alpha = spectral.alpha0_closed + 0.02;
        if (alpha < 1.0) {
            const double L =
                oracle::grid_search_L(Pk, pi_k.prefix, alpha, 200, cfg.seed + 1);
            oracle_json["lemma1"] =
                to_json(oracle::lemma1_check(Pk, pi_k.prefix, alpha, L, 1000, cfg.seed));
            oracle_json["lemma1"]["alpha"] = alpha;
            oracle_json["lemma1"]["L"] = L;
        }
    }
    report["oracle"] = oracle_json;
    report["rate_estimate"] = to_json(est);

    if (!cfg.out_dir.empty()) {
        write_file(cfg.out_dir, "report.json", report.dump(2) + "\n");
        write_file(cfg.out_dir, "stationary.csv", stationary_csv(pi));
        write_file(cfg.out_dir, "sweep.csv", sweep_csv(results));
    }
    std::cout << report.dump(2) << "\n";
    return est.rate_case == RateCase::Indeterminate ? 2 : 0;
}

int cmd_sweep(const AnalysisConfig& cfg) {
    cfg.validate();
    const BandKernel kernel = load_chain_spec(cfg.spec_path);
    const auto results = sweep(kernel, cfg.k_grid, cfg.unit_tol);
    const std::string csv = sweep_csv(results);
    if (!cfg.out_dir.empty())
        write_file(cfg.out_dir, "sweep.csv", csv);
    else
        std::cout << csv;
    return 0;
}

int cmd_verify(const AnalysisConfig& cfg) {
    cfg.validate();
    const BandKernel kernel = load_chain_spec(cfg.spec_path);
    bool all_ok = true;
    json report;

    // 1. Characteristic-polynomial cross-check at small order.
    const Index k_small =
        std::min<Index>(7, std::max(kernel.i0() + kernel.half_bandwidth(), Index{2}));
    const Eigen::MatrixXd P_small = truncate_augment(kernel, k_small);
    const auto qr_spec = spectrum(P_small).eigenvalues;
    const auto cp_spec = oracle::charpoly_spectrum(P_small);
    double worst = 0.0;
    for (const auto& z : qr_spec) {
        double best = 1e300;
        for (const auto& w : cp_spec) best = std::min(best, std::abs(z - w));
        worst = std::max(worst, best);
    }
    report["charpoly_max_mismatch"] = worst;
    if (worst > 1e-8) all_ok = false;

    // 2. Decay-rate fits at two truncation levels against rho_k.
    const auto rho_results = sweep(kernel, {50, 100}, cfg.unit_tol);
    for (const auto& r : rho_results) {
        if (!r.ok) {
            all_ok = false;
            report["decay"].push_back(json{{"k", r.k}, {"error", r.error}});
            continue;
        }
        const Eigen::MatrixXd Pk = truncate_augment(kernel, r.k);
        const StationaryDistribution pi_k = stationary_prefix(kernel, r.k);
        std::vector<double> f(static_cast<std::size_t>(r.k) + 1, 0.0);
        f[0] = 1.0;
        const auto fit = oracle::power_decay_rate(Pk, pi_k.prefix, f, 30, 200);
        json entry = to_json(fit);
        entry["k"] = r.k;
        entry["rho_k"] = r.rho_k;
        const bool ok = fit.rate <= r.rho_k + 1e-2;
        entry["consistent"] = ok;
        if (!ok) all_ok = false;
        report["decay"].push_back(entry);
    }

    // 3. Lemma 1 norm inequality at the largest configured truncation.
    {
        const Index k = cfg.k_grid.empty() ? 200 : cfg.k_grid.back();
        const Eigen::MatrixXd Pk = truncate_augment(kernel, k);
        const StationaryDistribution pi_k = stationary_prefix(kernel, k);
        const Increments& law = kernel.limit_increments();
        const double tau = tau_is_zero(law) ? 0.0 : solve_tau(law);
        const double alpha = alpha0_closed_form(law, tau) + 0.02;
        if (alpha < 1.0) {
            const double L =
                oracle::grid_search_L(Pk, pi_k.prefix, alpha, 200, cfg.seed + 1);
            const auto rep =
                oracle::lemma1_check(Pk, pi_k.prefix, alpha, L, 1000, cfg.seed);
            report["lemma1"] = to_json(rep);
            report["lemma1"]["alpha"] = alpha;
            report["lemma1"]["L"] = L;
            if (rep.violations > 0) all_ok = false;
        } else {
            report["lemma1"] = "skipped: alpha0 + 0.02 >= 1";
        }
    }

    report["all_ok"] = all_ok;
    std::cout << report.dump(2) << "\n";
    return all_ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convergence-rate certificates for band Markov chains"};
    app.require_subcommand(1);

    AnalysisConfig cfg;
    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--spec", cfg.spec_path, "chain spec JSON")->required();
        sub->add_option("--k-grid", cfg.k_grid, "truncation levels")->delimiter(',');
        sub->add_option("--unit-tol", cfg.unit_tol, "unit eigenvalue cutoff");
        sub->add_option("--margin", cfg.decision_margin, "dichotomy decision margin");
        sub->add_option("--horizon", cfg.horizon, "empirical bound horizon");
        sub->add_option("--ell", cfg.ell, "empirical bound cutoff");
        sub->add_option("--seed", cfg.seed, "oracle sample seed");
        sub->add_option("--out", cfg.out_dir, "output directory");
    };
    CLI::App* analyze = app.add_subcommand("analyze", "full certificate pipeline");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "rho_k sweep CSV");
    CLI::App* verify = app.add_subcommand("verify", "independent oracle checks");
    add_common(analyze);
    add_common(sweep_cmd);
    add_common(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(cfg);
        if (app.got_subcommand(sweep_cmd)) return cmd_sweep(cfg);
        if (app.got_subcommand(verify)) return cmd_verify(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
