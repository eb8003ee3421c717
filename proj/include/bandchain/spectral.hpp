#pragma once

#include "bandchain/kernel.hpp"
#include "bandchain/stationary.hpp"

namespace bandchain {

/// psi(t) = sum_m a_m t^(-m), the increment generating function.
double psi_eval(const Increments& law, double t);
double psi_prime(const Increments& law, double t);

/// sum_m m a_m; the chain is positive recurrent with geometric tail when
/// this is negative.
double mean_increment(const Increments& law);

/// True when the law has no upward jumps at all (the tau = 0 degenerate
/// case, detected structurally).
bool tau_is_zero(const Increments& law);

/// Unique root of psi(t) = 1 in (0,1). psi is convex with psi(1) = 1 and
/// psi'(1) > 0 under a negative mean increment, so bisection brackets the
/// root; a Newton polish drives |psi(tau) - 1| below 1e-12.
/// Throws NoSubunitRoot when the mean increment is >= 0.
double solve_tau(const Increments& law);

/// alpha0 = psi(sqrt(tau)) for tau in (0,1), a_0 for tau = 0.
double alpha0_closed_form(const Increments& law, double tau);

/// beta_m(i) = sqrt(P(i,i+m) P*(i+m,i)) = P(i,i+m) sqrt(pi(i)/pi(i+m)).
double beta(const BandKernel& kernel, const StationaryDistribution& pi,
            Index i, int m);

struct EmpiricalAlpha {
    double value = 0.0;
    Index ell = 0;      // cutoff
    Index horizon = 0;  // sup window end
};

/// Finite-horizon surrogate of the limsup sum:
/// sum_m sup_{ell <= i <= horizon} beta_m(i).
EmpiricalAlpha alpha0_empirical(const BandKernel& kernel,
                                const StationaryDistribution& pi,
                                Index ell, Index horizon);

/// Drift certificate PV <= alpha V + L for V(n) = gamma^n, gamma = tau^(-1/2).
struct DriftCertificate {
    double gamma = 0.0;
    double alpha = 0.0;
    double L = 0.0;
    double delta = 0.0;   // the general-drift delta; equal to alpha here
    Index horizon = 0;
};

/// (PV)(i)/V(i) computed shift-invariantly from row i's offsets; equals
/// psi(sqrt(tau)) exactly on homogeneous tail rows and never overflows.
double drift_ratio(const BandKernel& kernel, double gamma, Index i);

/// L = max_{i <= horizon} ((PV)(i) - alpha V(i))^+. Tail rows with
/// drift ratio <= alpha contribute nothing, so the horizon only needs to
/// cover the boundary. Throws AlphaTooSmall when alpha <= alpha0.
DriftCertificate drift_constants(const BandKernel& kernel, double tau,
                                 double alpha, Index horizon);

struct SpectralReport {
    double tau = 0.0;
    bool tau_zero = false;
    double alpha0_closed = 0.0;
    EmpiricalAlpha alpha0_empirical;
    double mean_increment = 0.0;
    DriftCertificate drift;
    double ess_radius_bound = 0.0;   // = alpha0_closed
};

/// Runs the full closed-form + empirical bound pipeline. The drift alpha
/// defaults to alpha0 + (1 - alpha0)/100.
SpectralReport analyze_spectral(const BandKernel& kernel,
                                const StationaryDistribution& pi,
                                Index ell, Index horizon);

} // namespace bandchain
