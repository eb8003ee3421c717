#include "bandchain/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bandchain {

double psi_eval(const Increments& law, double t) {
    double sum = 0.0;
    for (const auto& [m, a] : law.a) sum += a * std::pow(t, -m);
    return sum;
}

double psi_prime(const Increments& law, double t) {
    double sum = 0.0;
    for (const auto& [m, a] : law.a)
        sum += a * static_cast<double>(-m) * std::pow(t, -m - 1);
    return sum;
}

double mean_increment(const Increments& law) {
    double sum = 0.0;
    for (const auto& [m, a] : law.a) sum += static_cast<double>(m) * a;
    return sum;
}

bool tau_is_zero(const Increments& law) {
    for (const auto& [m, a] : law.a)
        if (m > 0 && a > 0.0) return false;
    return true;
}

double solve_tau(const Increments& law) {
    // psi is convex with psi(1) = 1; a subunit root exists iff psi'(1) > 0,
    // i.e. the mean increment is negative.
    if (mean_increment(law) >= 0.0)
        throw NoSubunitRoot("mean increment " + std::to_string(mean_increment(law)) +
                            " >= 0: tau = 1 is the only root at or below 1");
    if (tau_is_zero(law))
        throw Error("law has no upward increments: take the tau = 0 branch");

    double lo = 1e-12, hi = 1.0 - 1e-12;
    // psi(lo) > 1 (blows up near 0 since some a_m with m > 0 is positive),
    // psi(hi) < 1. Bisect to width 1e-8.
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (psi_eval(law, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    // Newton polish.
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const double r = psi_eval(law, t) - 1.0;
        if (std::abs(r) <= 1e-13) break;
        const double dp = psi_prime(law, t);
        if (dp == 0.0) break;
        t -= r / dp;
        t = std::clamp(t, lo - 1e-8, hi + 1e-8);
    }
    if (std::abs(psi_eval(law, t) - 1.0) > 1e-12)
        throw NoSubunitRoot("root polish failed to reach residual 1e-12");
    return t;
}

double alpha0_closed_form(const Increments& law, double tau) {
    if (tau == 0.0) return law.at(0);
    return psi_eval(law, std::sqrt(tau));
}

double beta(const BandKernel& kernel, const StationaryDistribution& pi,
            Index i, int m) {
    const double pii = pi.at(i);
    const double pim = pi.at(i + m);
    if (pii <= 0.0 || pim <= 0.0)
        throw ZeroMass("beta: zero stationary mass near index " + std::to_string(i));
    SparseRow row = kernel.row(i);
    auto it = row.find(i + m);
    const double p = it == row.end() ? 0.0 : it->second;
    return p * std::sqrt(pii / pim);
}

EmpiricalAlpha alpha0_empirical(const BandKernel& kernel,
                                const StationaryDistribution& pi,
                                Index ell, Index horizon) {
    const int N = kernel.half_bandwidth();
    if (ell < kernel.i0()) throw Error("alpha0_empirical: ell must be >= i0");
    if (horizon < ell + 10 * N)
        throw Error("alpha0_empirical: horizon must be >= ell + 10N");
    if (pi.size() < horizon + N + 1)
        throw Error("alpha0_empirical: pi prefix too short for horizon");

    double total = 0.0;
    for (int m = -N; m <= N; ++m) {
        double sup = 0.0;
        for (Index i = ell; i <= horizon; ++i)
            if (i + m >= 0) sup = std::max(sup, beta(kernel, pi, i, m));
        total += sup;
    }
    return {total, ell, horizon};
}

double drift_ratio(const BandKernel& kernel, double gamma, Index i) {
    // (PV)(i)/V(i) = sum_m P(i,i+m) gamma^m with V(n) = gamma^n.
    double sum = 0.0;
    for (const auto& [j, p] : kernel.row(i))
        sum += p * std::pow(gamma, static_cast<double>(j - i));
    return sum;
}

DriftCertificate drift_constants(const BandKernel& kernel, double tau,
                                 double alpha, Index horizon) {
    const double alpha0 = alpha0_closed_form(kernel.limit_increments(), tau);
    if (alpha <= alpha0)
        throw AlphaTooSmall("alpha = " + std::to_string(alpha) +
                            " is not above alpha0 = " + std::to_string(alpha0));

    DriftCertificate cert;
    cert.gamma = tau > 0.0 ? 1.0 / std::sqrt(tau) : 1.0;
    cert.alpha = alpha;
    cert.delta = alpha;
    cert.horizon = horizon;

    // Homogeneous tail rows satisfy (PV)(i)/V(i) = psi(sqrt(tau)) = alpha0
    // exactly, so only rows below i0 (plus the varying-tail window up to the
    // horizon) can force L above zero.
    const Index scan_end = kernel.homogeneous_tail()
                               ? std::min(horizon, kernel.i0() - 1)
                               : horizon;
    double L = 0.0;
    for (Index i = 0; i <= scan_end; ++i) {
        const double ratio = drift_ratio(kernel, cert.gamma, i);
        if (ratio > alpha)
            L = std::max(L, (ratio - alpha) * std::pow(cert.gamma,
                                                       static_cast<double>(i)));
    }
    cert.L = L;
    return cert;
}

SpectralReport analyze_spectral(const BandKernel& kernel,
                                const StationaryDistribution& pi,
                                Index ell, Index horizon) {
    const Increments& law = kernel.limit_increments();
    SpectralReport rep;
    rep.mean_increment = mean_increment(law);
    if (tau_is_zero(law)) {
        rep.tau = 0.0;
        rep.tau_zero = true;
    } else {
        rep.tau = solve_tau(law);
    }
    rep.alpha0_closed = alpha0_closed_form(law, rep.tau);
    rep.ess_radius_bound = rep.alpha0_closed;
    rep.alpha0_empirical = alpha0_empirical(kernel, pi, ell, horizon);
    const double alpha = rep.alpha0_closed + (1.0 - rep.alpha0_closed) / 100.0;
    rep.drift = drift_constants(kernel, rep.tau, alpha, horizon);
    return rep;
}

} // namespace bandchain
