#include "bandchain/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Dense>

#include "bandchain/truncation.hpp"

namespace bandchain {

namespace {

constexpr Index kDenseSolveLimit = 500;
constexpr double kResidualTol = 1e-10;

// Sparse row access to P_k including the last-column augmentation.
std::vector<SparseRow> augmented_rows(const BandKernel& kernel, Index k) {
    std::vector<SparseRow> rows(static_cast<std::size_t>(k + 1));
    for (Index i = 0; i <= k; ++i) {
        SparseRow& out = rows[static_cast<std::size_t>(i)];
        for (const auto& [j, p] : kernel.row(i))
            out[std::min(j, k)] += p;
    }
    return rows;
}

std::vector<double> left_multiply(const std::vector<SparseRow>& rows,
                                  const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [j, p] : rows[i])
            out[static_cast<std::size_t>(j)] += v[i] * p;
    return out;
}

double invariance_defect(const std::vector<SparseRow>& rows,
                         const std::vector<double>& v) {
    std::vector<double> w = left_multiply(rows, v);
    double defect = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) defect += std::abs(w[i] - v[i]);
    return defect;
}

// GTH state reduction: subtraction-free Gaussian elimination on P_k, so
// every entry of pi comes out with componentwise relative accuracy. Tail
// entries far below machine epsilon in absolute size stay usable for the
// ratio estimates.
std::vector<double> solve_dense(const BandKernel& kernel, Index k) {
    Eigen::MatrixXd A = truncate_augment(kernel, k);
    const Index n = k + 1;

    for (Index s = n - 1; s >= 1; --s) {
        const double scale = A.row(s).head(s).sum();
        if (!(scale > 0.0))
            throw SingularSystem("GTH pivot vanished at state " + std::to_string(s) +
                                 " (reducible truncation?)");
        A.col(s).head(s) /= scale;
        for (Index i = 0; i < s; ++i)
            A.row(i).head(s) += A(i, s) * A.row(s).head(s);
    }

    std::vector<double> pi(static_cast<std::size_t>(n), 0.0);
    pi[0] = 1.0;
    double sum = 1.0;
    for (Index j = 1; j < n; ++j) {
        double v = 0.0;
        for (Index i = 0; i < j; ++i) v += pi[static_cast<std::size_t>(i)] * A(i, j);
        pi[static_cast<std::size_t>(j)] = v;
        sum += v;
    }
    for (double& x : pi) x /= sum;
    return pi;
}

std::vector<double> solve_power(const BandKernel& kernel, Index k) {
    const auto rows = augmented_rows(kernel, k);
    const std::size_t n = static_cast<std::size_t>(k + 1);
    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> prev = v, prev2 = v;

    const int max_iter = 500000;
    for (int it = 1; it <= max_iter; ++it) {
        prev2 = std::move(prev);
        prev = v;
        v = left_multiply(rows, prev);
        double sum = 0.0;
        for (double x : v) sum += x;
        for (double& x : v) x /= sum;

        // Componentwise Aitken extrapolation every 50 steps.
        if (it % 50 == 0) {
            std::vector<double> acc(n);
            bool usable = true;
            for (std::size_t i = 0; i < n; ++i) {
                const double denom = v[i] - 2.0 * prev[i] + prev2[i];
                if (std::abs(denom) < 1e-300) { usable = false; break; }
                acc[i] = v[i] - (v[i] - prev[i]) * (v[i] - prev[i]) / denom;
                if (!(acc[i] >= 0.0) || !std::isfinite(acc[i])) { usable = false; break; }
            }
            if (usable) {
                double sum2 = 0.0;
                for (double x : acc) sum2 += x;
                if (sum2 > 0.0 && invariance_defect(rows, acc) / sum2 <
                                      invariance_defect(rows, v)) {
                    for (double& x : acc) x /= sum2;
                    v = std::move(acc);
                }
            }
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta += std::abs(v[i] - prev[i]);
        if (delta < 1e-15) break;
        if (it == max_iter)
            throw NonConvergence("power iteration did not reach tolerance at k = " +
                                 std::to_string(k));
    }
    return v;
}

} // namespace

StationaryDistribution stationary_prefix(const BandKernel& kernel, Index k) {
    std::vector<double> pi =
        (k <= kDenseSolveLimit) ? solve_dense(kernel, k) : solve_power(kernel, k);

    // Clip solver noise and renormalize.
    double min_entry = 0.0;
    for (double x : pi) min_entry = std::min(min_entry, x);
    if (min_entry < -1e-9)
        throw SingularSystem("fixed vector has a significantly negative entry");
    double sum = 0.0;
    for (double& x : pi) {
        if (x < 0.0) x = 0.0;
        sum += x;
    }
    for (double& x : pi) x /= sum;

    StationaryDistribution out;
    out.prefix = std::move(pi);
    out.k = k;
    out.residual = invariance_defect(augmented_rows(kernel, k), out.prefix);
    if (out.residual > kResidualTol)
        throw NonConvergence("invariance defect " + std::to_string(out.residual) +
                             " above 1e-10 at k = " + std::to_string(k));

    // Default tau window: middle third, clear of boundary and edge.
    const int N = kernel.half_bandwidth();
    Index lo = std::max<Index>(kernel.i0() + N, k / 3);
    Index hi = std::min<Index>(k - 2 * N, 2 * k / 3);
    if (lo < hi) {
        double ratio_floor = 1.0;
        double mean = 0.0;
        Index count = 0;
        bool zero_mass = false;
        for (Index i = lo; i < hi; ++i) {
            const double pi_i = out.at(i);
            if (pi_i <= 0.0) { zero_mass = true; break; }
            const double r = out.at(i + 1) / pi_i;
            ratio_floor = std::min(ratio_floor, r);
            mean += r;
            ++count;
        }
        if (!zero_mass && count > 0) {
            out.tau_hat = mean / static_cast<double>(count);
            if (out.tau_hat < 1e-6 || ratio_floor < 1e-12) {
                out.tau_hat = 0.0;
                out.tau_zero_flagged = true;
            }
        }
    }
    return out;
}

TailRatioEstimate tail_ratio(const StationaryDistribution& pi,
                             Index window_lo, Index window_hi,
                             Index i0, int half_bandwidth) {
    if (window_lo < i0 + half_bandwidth || window_hi > pi.k - 2 * half_bandwidth ||
        window_lo >= window_hi)
        throw WindowTooWide("window [" + std::to_string(window_lo) + "," +
                            std::to_string(window_hi) +
                            "] must lie in [i0+N, k-2N]");
    double mean = 0.0;
    Index count = 0;
    std::vector<double> ratios;
    for (Index i = window_lo; i < window_hi; ++i) {
        const double p = pi.at(i);
        if (p <= 0.0) throw ZeroMass("pi(" + std::to_string(i) + ") = 0 in window");
        ratios.push_back(pi.at(i + 1) / p);
        mean += ratios.back();
        ++count;
    }
    TailRatioEstimate est;
    est.tau = mean / static_cast<double>(count);
    for (double r : ratios)
        est.max_deviation = std::max(est.max_deviation, std::abs(r - est.tau));
    return est;
}

std::pair<double, double> weighted_norms(std::span<const double> f,
                                         const StationaryDistribution& pi) {
    if (static_cast<Index>(f.size()) != pi.size())
        throw Error("weighted_norms: f and pi prefix lengths differ");
    double l1 = 0.0, l2sq = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = pi.prefix[i];
        l1 += std::abs(f[i]) * w;
        l2sq += f[i] * f[i] * w;
    }
    return {l1, std::sqrt(l2sq)};
}

std::string stationary_csv(const StationaryDistribution& pi) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "i,pi,ratio\n";
    for (Index i = 0; i < pi.size(); ++i) {
        out << i << ',' << pi.at(i) << ',';
        if (i + 1 < pi.size() && pi.at(i) > 0.0) out << pi.at(i + 1) / pi.at(i);
        out << '\n';
    }
    return out.str();
}

} // namespace bandchain
