#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "bandchain/oracle.hpp"
#include "bandchain/stationary.hpp"
#include "bandchain/truncation.hpp"
#include "chains.hpp"

using namespace bandchain;

namespace {

double min_distance(const std::vector<std::complex<double>>& spec,
                    std::complex<double> target) {
    double best = 1e300;
    for (const auto& z : spec) best = std::min(best, std::abs(z - target));
    return best;
}

} // namespace

TEST_CASE("charpoly oracle on fixed matrices") {
    const Eigen::MatrixXd P2 = truncate_augment(make_e1(), 2);
    const auto spec = oracle::charpoly_spectrum(P2);
    REQUIRE(spec.size() == 3);
    CHECK(min_distance(spec, {1.0, 0.0}) <= 1e-10);
    CHECK(min_distance(spec, {kSubunitP2, 0.0}) <= 1e-10);
    CHECK(min_distance(spec, {-kSubunitP2, 0.0}) <= 1e-10);

    Eigen::MatrixXd one(1, 1);
    one << 1.0;
    const auto s1 = oracle::charpoly_spectrum(one);
    REQUIRE(s1.size() == 1);
    CHECK(std::abs(s1[0] - 1.0) <= 1e-12);

    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
    diag(0, 0) = 0.2;
    diag(1, 1) = 0.5;
    const auto sd = oracle::charpoly_spectrum(diag);
    CHECK(min_distance(sd, {0.2, 0.0}) <= 1e-10);
    CHECK(min_distance(sd, {0.5, 0.0}) <= 1e-10);

    CHECK_THROWS_AS(oracle::charpoly_spectrum(Eigen::MatrixXd::Zero(9, 9)),
                    OrderTooLarge);
}

TEST_CASE("charpoly oracle agrees with QR on random stochastic matrices") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);   // orders 2..8
        Eigen::MatrixXd M(n, n);
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                M(i, j) = u(rng);
                sum += M(i, j);
            }
            M.row(i) /= sum;
        }
        const auto qr = spectrum(M).eigenvalues;
        const auto cp = oracle::charpoly_spectrum(M);
        for (const auto& z : qr) CHECK(min_distance(cp, z) <= 1e-8);
    }
}

TEST_CASE("power decay rate on P_2 of E1") {
    const Eigen::MatrixXd P2 = truncate_augment(make_e1(), 2);
    const StationaryDistribution pi = stationary_prefix(make_e1(), 2);
    const auto fit =
        oracle::power_decay_rate(P2, pi.prefix, {1.0, 0.0, 0.0}, 5, 40);
    CHECK(std::abs(fit.rate - kSubunitP2) <= 1e-3);
    CHECK(fit.r_squared >= 0.99);
}

TEST_CASE("power decay rejects the constant vector") {
    const Eigen::MatrixXd P2 = truncate_augment(make_e1(), 2);
    const StationaryDistribution pi = stationary_prefix(make_e1(), 2);
    CHECK_THROWS_AS(
        oracle::power_decay_rate(P2, pi.prefix, {1.0, 1.0, 1.0}, 5, 40),
        DegenerateTestVector);
}

TEST_CASE("decay rates are bounded by rho_k on P_100 of E1") {
    const Index k = 100;
    const Eigen::MatrixXd Pk = truncate_augment(make_e1(), k);
    const StationaryDistribution pi = stationary_prefix(make_e1(), k);
    const auto results = sweep(make_e1(), {k}, 1e-9);
    REQUIRE(results[0].ok);
    const double rho = results[0].rho_k;

    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal;
    bool one_close = false;
    for (int dir = 0; dir < 5; ++dir) {
        std::vector<double> f(static_cast<std::size_t>(k) + 1);
        for (double& x : f) x = normal(rng);
        const auto fit = oracle::power_decay_rate(Pk, pi.prefix, f, 30, 200);
        CHECK(fit.rate <= rho + 1e-2);
        if (std::abs(fit.rate - rho) <= 1e-2) one_close = true;
    }
    CHECK(one_close);
}

TEST_CASE("lemma1 inequality holds above alpha0 with a grid-searched L") {
    for (const BandKernel& kernel : {make_e1(), make_e2()}) {
        const Index k = 200;
        const Eigen::MatrixXd Pk = truncate_augment(kernel, k);
        const StationaryDistribution pi = stationary_prefix(kernel, k);
        const double alpha0 =
            kernel.half_bandwidth() == 1 ? kAlpha0E1 : kAlpha0E2;
        const double alpha = alpha0 + 0.02;
        const double L = oracle::grid_search_L(Pk, pi.prefix, alpha, 200, 99);
        const auto rep = oracle::lemma1_check(Pk, pi.prefix, alpha, L, 1000, 7);
        CHECK(rep.violations == 0);
        CHECK(rep.max_violation <= 0.0);
        CHECK(rep.min_feasible_L <= L);
    }
}

TEST_CASE("alpha below alpha0 is violated by tail indicators") {
    const Index k = 200;
    const Eigen::MatrixXd Pk = truncate_augment(make_e1(), k);
    const StationaryDistribution pi = stationary_prefix(make_e1(), k);
    // ||P e_i||_2 / ||e_i||_2 tends to alpha0 along tail indicators while
    // ||e_i||_1 / ||e_i||_2 vanishes, so any fixed L eventually fails.
    std::vector<double> f(static_cast<std::size_t>(k) + 1, 0.0);
    f[150] = 1.0;
    CHECK(oracle::lemma1_violation(Pk, pi.prefix, f, 0.2, 10.0) > 0.0);
}

TEST_CASE("minimal feasible L is nonincreasing in alpha") {
    const Index k = 100;
    const Eigen::MatrixXd Pk = truncate_augment(make_e2(), k);
    const StationaryDistribution pi = stationary_prefix(make_e2(), k);
    double prev = 1e300;
    for (double alpha : {0.5, 0.7, 0.9, 0.99}) {
        const auto rep = oracle::lemma1_check(Pk, pi.prefix, alpha, 0.0, 300, 31);
        CHECK(rep.min_feasible_L <= prev + 1e-12);
        prev = rep.min_feasible_L;
    }
}

TEST_CASE("lemma1 holds with equality for the zero vector") {
    const Eigen::MatrixXd P2 = truncate_augment(make_e1(), 2);
    const StationaryDistribution pi = stationary_prefix(make_e1(), 2);
    CHECK(oracle::lemma1_violation(P2, pi.prefix, {0.0, 0.0, 0.0}, 0.9, 1.0) ==
          0.0);
}
