#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "bandchain/kernel.hpp"

namespace bandchain {
namespace oracle {

struct DecayFit {
    double rate = 0.0;       // fitted geometric rate
    double prefactor = 0.0;  // fitted C
    int window_lo = 0;
    int window_hi = 0;
    double r_squared = 0.0;
};

/// Iterates g <- P_k g from g = f - pi_k(f) 1 and fits log ||g_n||_2(pi_k)
/// against n by least squares over [n_lo, n_hi].
DecayFit power_decay_rate(const Eigen::MatrixXd& Pk,
                          const std::vector<double>& pi_k,
                          const std::vector<double>& f,
                          int n_lo, int n_hi);

/// Brute-force spectrum for order <= 8: characteristic polynomial by the
/// Leverrier trace recursion, roots by Durand-Kerner with Newton polish.
/// Shares no code path with the QR eigensolver.
std::vector<std::complex<double>> charpoly_spectrum(const Eigen::MatrixXd& matrix);

struct Lemma1Report {
    double max_violation = 0.0;   // max ||Pf||_2 - alpha ||f||_2 - L ||f||_1
    double min_feasible_L = 0.0;  // smallest L valid over the sample
    int sample_count = 0;
    std::uint64_t seed = 0;
    int violations = 0;
};

/// Samples standard-normal test vectors (fixed seed) and checks the norm
/// inequality ||Pf||_2 <= alpha ||f||_2 + L ||f||_1 in pi_k-weighted norms.
Lemma1Report lemma1_check(const Eigen::MatrixXd& Pk,
                          const std::vector<double>& pi_k,
                          double alpha, double L,
                          int sample_count, std::uint64_t seed);

/// Smallest L on a doubling grid from `base` with zero violations over a
/// pilot sample drawn with `seed`.
double grid_search_L(const Eigen::MatrixXd& Pk, const std::vector<double>& pi_k,
                     double alpha, int pilot_samples, std::uint64_t seed,
                     double base = 1.0 / 1024.0);

/// Checks one explicit vector against the inequality; returns the violation
/// ||Pf||_2 - alpha ||f||_2 - L ||f||_1.
double lemma1_violation(const Eigen::MatrixXd& Pk,
                        const std::vector<double>& pi_k,
                        const std::vector<double>& f,
                        double alpha, double L);

} // namespace oracle
} // namespace bandchain
