#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bandchain/kernel.hpp"

namespace bandchain {

/// Prefix of the stationary distribution obtained from the last-column
/// augmented truncation P_k, with the estimated tail ratio tau.
struct StationaryDistribution {
    std::vector<double> prefix;   // pi(0..k)
    Index k = 0;
    double tau_hat = 0.0;         // mean successive ratio over a default window
    bool tau_zero_flagged = false;
    double residual = 0.0;        // ||pi P_k - pi||_1

    double at(Index i) const { return prefix[static_cast<std::size_t>(i)]; }
    Index size() const { return static_cast<Index>(prefix.size()); }
};

/// Unique probability left fixed vector of the augmented truncation P_k.
/// Dense solve for k <= 500, accelerated power iteration above.
StationaryDistribution stationary_prefix(const BandKernel& kernel, Index k);

struct TailRatioEstimate {
    double tau = 0.0;            // mean of successive ratios over the window
    double max_deviation = 0.0;  // max |ratio - tau| over the window
};

/// Mean of pi(i+1)/pi(i) over [window_lo, window_hi]; the window must stay
/// clear of the boundary (i >= i0 + N) and the truncation edge (i <= k - 2N).
TailRatioEstimate tail_ratio(const StationaryDistribution& pi,
                             Index window_lo, Index window_hi,
                             Index i0, int half_bandwidth);

/// (l1(pi), l2(pi)) norms of f over the prefix.
std::pair<double, double> weighted_norms(std::span<const double> f,
                                         const StationaryDistribution& pi);

/// Writes (i, pi(i), ratio) CSV rows, 17 significant digits.
std::string stationary_csv(const StationaryDistribution& pi);

} // namespace bandchain
