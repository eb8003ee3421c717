#include "bandchain/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace bandchain {
namespace oracle {

namespace {

double weighted_l1(const Eigen::VectorXd& f, const std::vector<double>& w) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) s += std::abs(f(i)) * w[i];
    return s;
}

double weighted_l2(const Eigen::VectorXd& f, const std::vector<double>& w) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) s += f(i) * f(i) * w[i];
    return std::sqrt(s);
}

} // namespace

DecayFit power_decay_rate(const Eigen::MatrixXd& Pk,
                          const std::vector<double>& pi_k,
                          const std::vector<double>& f,
                          int n_lo, int n_hi) {
    const Eigen::Index n = Pk.rows();
    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(f.data(), n);

    // Center: g <- f - pi_k(f) 1.
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += g(i) * pi_k[i];
    g.array() -= mean;
    if (weighted_l2(g, pi_k) < 1e-14)
        throw DegenerateTestVector("test vector is proportional to 1");

    std::vector<double> log_norms;
    log_norms.push_back(std::log(weighted_l2(g, pi_k)));
    for (int it = 1; it <= n_hi; ++it) {
        g = Pk * g;
        const double nrm = weighted_l2(g, pi_k);
        if (nrm < 1e-300 && it < n_hi)
            throw UnderflowBeforeWindow("norms underflowed at iteration " +
                                        std::to_string(it));
        log_norms.push_back(std::log(nrm));
    }

    // Least-squares line log||g_n|| = log C + n log rate over [n_lo, n_hi].
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int count = n_hi - n_lo + 1;
    for (int it = n_lo; it <= n_hi; ++it) {
        sx += it;
        sy += log_norms[static_cast<std::size_t>(it)];
        sxx += static_cast<double>(it) * it;
        sxy += it * log_norms[static_cast<std::size_t>(it)];
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / count;

    double ss_res = 0.0, ss_tot = 0.0;
    const double ymean = sy / count;
    for (int it = n_lo; it <= n_hi; ++it) {
        const double y = log_norms[static_cast<std::size_t>(it)];
        ss_res += (y - slope * it - intercept) * (y - slope * it - intercept);
        ss_tot += (y - ymean) * (y - ymean);
    }

    DecayFit fit;
    fit.rate = std::exp(slope);
    fit.prefactor = std::exp(intercept);
    fit.window_lo = n_lo;
    fit.window_hi = n_hi;
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

std::vector<std::complex<double>> charpoly_spectrum(const Eigen::MatrixXd& matrix) {
    const int n = static_cast<int>(matrix.rows());
    if (n > 8) throw OrderTooLarge("charpoly oracle capped at order 8");
    if (n == 0) return {};

    // Leverrier trace recursion for p(x) = x^n + c[1] x^{n-1} + ... + c[n].
    // Traces of powers computed with plain loops; no shared path with the
    // QR solver.
    std::vector<double> tr(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<std::vector<double>> powm(
        static_cast<std::size_t>(n) + 1,
        std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
    for (int i = 0; i < n; ++i) powm[0][static_cast<std::size_t>(i) * n + i] = 1.0;
    for (int p = 1; p <= n; ++p) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += powm[p - 1][static_cast<std::size_t>(i) * n + l] * matrix(l, j);
                powm[p][static_cast<std::size_t>(i) * n + j] = s;
            }
        for (int i = 0; i < n; ++i)
            tr[p] += powm[p][static_cast<std::size_t>(i) * n + i];
    }
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int j = 1; j <= m; ++j) s += c[m - j] * tr[j];
        c[m] = -s / m;
    }

    using C = std::complex<double>;
    auto poly = [&](C x) {
        C v = 0.0;
        for (int j = 0; j <= n; ++j) v = v * x + c[j];
        return v;
    };
    auto poly_deriv = [&](C x) {
        C v = 0.0;
        for (int j = 0; j < n; ++j) v = v * x + c[j] * static_cast<double>(n - j);
        return v;
    };

    // Durand-Kerner from staggered complex seeds.
    std::vector<C> roots(static_cast<std::size_t>(n));
    const C seed(0.4, 0.9);
    C acc = 1.0;
    for (int i = 0; i < n; ++i) {
        acc *= seed;
        roots[static_cast<std::size_t>(i)] = acc;
    }
    for (int it = 0; it < 1000; ++it) {
        double move = 0.0;
        for (int i = 0; i < n; ++i) {
            C denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i)
                    denom *= roots[static_cast<std::size_t>(i)] -
                             roots[static_cast<std::size_t>(j)];
            if (denom == C(0.0)) denom = C(1e-30, 0.0);
            const C delta = poly(roots[static_cast<std::size_t>(i)]) / denom;
            roots[static_cast<std::size_t>(i)] -= delta;
            move = std::max(move, std::abs(delta));
        }
        if (move < 1e-14) break;
    }
    // Newton polish (helps simple roots; harmless near multiple ones).
    for (auto& r : roots)
        for (int it = 0; it < 5; ++it) {
            const C d = poly_deriv(r);
            if (std::abs(d) < 1e-12) break;
            const C step = poly(r) / d;
            if (std::abs(step) > 1e-3) break;
            r -= step;
        }
    return roots;
}

double grid_search_L(const Eigen::MatrixXd& Pk, const std::vector<double>& pi_k,
                     double alpha, int pilot_samples, std::uint64_t seed,
                     double base) {
    for (double L = base; L < 1e12; L *= 2.0) {
        const Lemma1Report pilot =
            lemma1_check(Pk, pi_k, alpha, L, pilot_samples, seed);
        // One extra grid level absorbs the sample-to-sample spread between
        // the pilot and whatever sample the caller checks against.
        if (pilot.violations == 0) return 2.0 * L;
    }
    throw Error("grid_search_L: no feasible L below 1e12");
}

double lemma1_violation(const Eigen::MatrixXd& Pk,
                        const std::vector<double>& pi_k,
                        const std::vector<double>& f,
                        double alpha, double L) {
    const Eigen::Index n = Pk.rows();
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(f.data(), n);
    const Eigen::VectorXd pv = Pk * v;
    return weighted_l2(pv, pi_k) - alpha * weighted_l2(v, pi_k) -
           L * weighted_l1(v, pi_k);
}

Lemma1Report lemma1_check(const Eigen::MatrixXd& Pk,
                          const std::vector<double>& pi_k,
                          double alpha, double L,
                          int sample_count, std::uint64_t seed) {
    const Eigen::Index n = Pk.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Lemma1Report rep;
    rep.sample_count = sample_count;
    rep.seed = seed;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    rep.min_feasible_L = 0.0;

    Eigen::VectorXd f(n);
    for (int s = 0; s < sample_count; ++s) {
        for (Eigen::Index i = 0; i < n; ++i) f(i) = normal(rng);
        const Eigen::VectorXd pf = Pk * f;
        const double l1 = weighted_l1(f, pi_k);
        const double l2 = weighted_l2(f, pi_k);
        const double lhs = weighted_l2(pf, pi_k);
        const double violation = lhs - alpha * l2 - L * l1;
        rep.max_violation = std::max(rep.max_violation, violation);
        if (violation > 0.0) ++rep.violations;
        if (l1 > 0.0)
            rep.min_feasible_L = std::max(rep.min_feasible_L, (lhs - alpha * l2) / l1);
    }
    return rep;
}

} // namespace oracle
} // namespace bandchain
