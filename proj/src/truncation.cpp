#include "bandchain/truncation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bandchain/stationary.hpp"

namespace bandchain {

Eigen::MatrixXd truncate_augment(const BandKernel& kernel, Index k) {
    if (k < kernel.i0() + kernel.half_bandwidth())
        throw Error("truncation level k must be >= i0 + N");
    const Index n = k + 1;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    // Fold the mass that leaves [0, k) into the last column. Summing the
    // folded entries themselves (rather than 1 - kept) keeps rows with no
    // out-of-range mass free of spurious eps-size entries in column k, which
    // would otherwise contaminate the tiny tail of pi_k.
    for (Index i = 0; i <= k; ++i) {
        for (const auto& [j, p] : kernel.row(i))
            P(i, std::min(j, k)) += p;
    }
    return P;
}

namespace {

// Core dense nonsymmetric eigensolve (Hessenberg + shifted QR via Eigen)
// with an explicit residual bound; no stochasticity assumption.
SpectrumResult eigen_core(const Eigen::MatrixXd& matrix) {
    const Index n = matrix.rows();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw EigNonConvergence("QR iteration failed to converge");

    SpectrumResult out;
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    out.eigenvalues.assign(vals.data(), vals.data() + n);

    const double scale = matrix.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::MatrixXcd A = matrix.cast<std::complex<double>>();
    double worst = 0.0;
    for (Index j = 0; j < n; ++j) {
        const Eigen::VectorXcd v = vecs.col(j);
        const double res = (A * v - vals(j) * v).norm() / v.norm();
        worst = std::max(worst, res);
    }
    out.backward_error = worst / scale;
    return out;
}

} // namespace

SpectrumResult spectrum(const Eigen::MatrixXd& matrix) {
    const Index n = matrix.rows();
    if (matrix.cols() != n) throw Error("spectrum: matrix must be square");
    for (Index i = 0; i < n; ++i)
        if (std::abs(matrix.row(i).sum() - 1.0) > 1e-9)
            throw Error("spectrum: row " + std::to_string(i) +
                        " is not stochastic within 1e-9");
    return eigen_core(matrix);
}

RhoResult rho_from_spectrum(const std::vector<std::complex<double>>& eigenvalues,
                            double unit_tol) {
    if (eigenvalues.empty()) throw Error("rho_from_spectrum: empty spectrum");
    RhoResult out;
    double best = -1.0;
    for (const auto& lambda : eigenvalues) {
        const double mod = std::abs(lambda);
        if (mod >= 1.0 - unit_tol)
            ++out.unit_count;
        else
            best = std::max(best, mod);
    }
    if (best < 0.0)
        throw NoSubunitEigenvalue("all eigenvalues lie at unit modulus");
    out.rho_k = best;
    out.periodicity_suspected = out.unit_count > 1;
    return out;
}

namespace {

TruncationResult run_one(const BandKernel& kernel, Index k, double unit_tol) {
    TruncationResult r;
    r.k = k;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Eigen::MatrixXd P = truncate_augment(kernel, k);
        // The raw truncation is severely nonnormal (eigenvector scaling grows
        // like tau^{-k/2}); conjugating by diag(sqrt(pi_k)) preserves the
        // spectrum and keeps the QR iteration's forward error in check.
        bool scaled = false;
        try {
            const StationaryDistribution pi_k = stationary_prefix(kernel, k);
            Eigen::VectorXd s(k + 1);
            bool positive = true;
            for (Index i = 0; i <= k; ++i) {
                const double p = pi_k.at(i);
                if (!(p > 0.0)) { positive = false; break; }
                s(i) = std::sqrt(p);
            }
            if (positive) {
                P = s.asDiagonal() * P * s.cwiseInverse().asDiagonal();
                scaled = true;
            }
        } catch (const Error&) {
            // fall through to the unscaled solve
        }
        SpectrumResult spec = scaled ? eigen_core(P) : spectrum(P);
        r.spectrum = std::move(spec.eigenvalues);
        r.backward_error = spec.backward_error;
        RhoResult rho = rho_from_spectrum(r.spectrum, unit_tol);
        r.rho_k = rho.rho_k;
        r.unit_count = rho.unit_count;
        r.periodicity_suspected = rho.periodicity_suspected;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    return r;
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BANDCHAIN_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace

std::vector<TruncationResult> sweep(const BandKernel& kernel,
                                    const std::vector<Index>& k_grid,
                                    double unit_tol, unsigned threads) {
    std::vector<TruncationResult> results(k_grid.size());
    const unsigned workers =
        std::min<unsigned>(resolve_threads(threads),
                           std::max<std::size_t>(k_grid.size(), 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < k_grid.size(); ++i)
            results[i] = run_one(kernel, k_grid[i], unit_tol);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < k_grid.size();
                 i = next.fetch_add(1))
                results[i] = run_one(kernel, k_grid[i], unit_tol);
        });
    for (auto& t : pool) t.join();
    return results;
}

std::string to_string(RateCase c) {
    switch (c) {
        case RateCase::CaseA_bound: return "CaseA_bound";
        case RateCase::CaseB_value: return "CaseB_value";
        case RateCase::Indeterminate: return "Indeterminate";
    }
    return "?";
}

RateEstimate classify(const std::vector<TruncationResult>& sweep_results,
                      double alpha0, double decision_margin, double stall_tol) {
    std::vector<const TruncationResult*> ok;
    for (const auto& r : sweep_results)
        if (r.ok) ok.push_back(&r);
    if (ok.size() < 4 || ok.back()->k < 100)
        throw InsufficientSweep("need >= 4 successful truncations with max k >= 100");

    const std::size_t tail_start = ok.size() / 2;
    bool tail_below = true;
    for (std::size_t i = tail_start; i < ok.size(); ++i)
        if (ok[i]->rho_k > alpha0 + decision_margin) tail_below = false;

    RateEstimate est;
    est.rho_limit = ok.back()->rho_k;
    est.cauchy_gap = std::abs(ok.back()->rho_k - ok[ok.size() - 2]->rho_k);
    const bool stabilized = est.cauchy_gap < stall_tol;

    if (stabilized && est.rho_limit > alpha0 + decision_margin) {
        est.rate_case = RateCase::CaseB_value;
        est.rho2 = est.rho_limit;
        est.rhoV = est.rho_limit;
        est.rhoV_is_bound = false;
    } else if (tail_below) {
        est.rate_case = RateCase::CaseA_bound;
        est.rho2 = alpha0;
        est.rhoV = alpha0;
        est.rhoV_is_bound = true;
    } else {
        est.rate_case = RateCase::Indeterminate;
        est.rho2 = std::max(est.rho_limit, alpha0);
        est.rhoV = est.rho2;
        est.rhoV_is_bound = true;
    }
    return est;
}

std::string sweep_csv(const std::vector<TruncationResult>& results) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "k,rho_k,unit_count,backward_error,wall_ms\n";
    for (const auto& r : results) {
        out << r.k << ',';
        if (r.ok)
            out << r.rho_k << ',' << r.unit_count << ',' << r.backward_error << ','
                << r.wall_ms << '\n';
        else
            out << ',' << r.unit_count << ',' << r.backward_error << ',' << r.wall_ms
                << ",\"" << r.error << "\"\n";
    }
    return out.str();
}

} // namespace bandchain
