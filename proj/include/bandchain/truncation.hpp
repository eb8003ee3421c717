#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bandchain/kernel.hpp"

namespace bandchain {

/// Last-column augmented truncation: the (k+1)x(k+1) northwest corner of P
/// with each row's lost mass added to column k.
Eigen::MatrixXd truncate_augment(const BandKernel& kernel, Index k);

struct SpectrumResult {
    std::vector<std::complex<double>> eigenvalues;
    double backward_error = 0.0;   // max_j ||A v_j - lambda_j v_j||_2 / ||A||_inf
};

/// Full spectrum of a dense row-stochastic matrix. Throws EigNonConvergence.
SpectrumResult spectrum(const Eigen::MatrixXd& matrix);

struct RhoResult {
    double rho_k = 0.0;
    int unit_count = 0;                  // eigenvalues with |lambda| >= 1 - unit_tol
    bool periodicity_suspected = false;  // unit_count > 1
};

/// rho_k = max{|lambda| : |lambda| < 1 - unit_tol}. Throws NoSubunitEigenvalue
/// when nothing remains below the unit cutoff.
RhoResult rho_from_spectrum(const std::vector<std::complex<double>>& eigenvalues,
                            double unit_tol);

struct TruncationResult {
    Index k = 0;
    std::vector<std::complex<double>> spectrum;
    double rho_k = 0.0;
    int unit_count = 0;
    bool periodicity_suspected = false;
    double backward_error = 0.0;
    double wall_ms = 0.0;
    bool ok = true;
    std::string error;   // per-k failure record; the sweep never aborts
};

/// One TruncationResult per k, ordered by k. threads = 0 reads
/// BANDCHAIN_THREADS (default: hardware concurrency).
std::vector<TruncationResult> sweep(const BandKernel& kernel,
                                    const std::vector<Index>& k_grid,
                                    double unit_tol, unsigned threads = 0);

enum class RateCase { CaseA_bound, CaseB_value, Indeterminate };

std::string to_string(RateCase c);

struct RateEstimate {
    RateCase rate_case = RateCase::Indeterminate;
    double rho2 = 0.0;          // bound (case a) or value (case b)
    double rhoV = 0.0;
    bool rhoV_is_bound = false; // case a reports "<= alpha0" only
    double rho_limit = 0.0;     // last sweep value
    double cauchy_gap = 0.0;    // |rho_last - rho_prev|, the uncertainty
    double fitted_C = 0.0;      // informational SG2 prefactor, not certified
};

/// Dichotomy decision: CaseB when the tail stabilizes above alpha0 + margin,
/// CaseA when the whole tail stays below alpha0 + margin, Indeterminate
/// otherwise. Requires >= 4 sweep points with the largest k >= 100.
RateEstimate classify(const std::vector<TruncationResult>& sweep_results,
                      double alpha0, double decision_margin,
                      double stall_tol = 1e-3);

/// Sweep CSV with header `k,rho_k,unit_count,backward_error,wall_ms`;
/// failed entries carry an empty rho_k and an error column.
std::string sweep_csv(const std::vector<TruncationResult>& results);

} // namespace bandchain
