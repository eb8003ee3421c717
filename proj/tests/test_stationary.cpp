#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bandchain/stationary.hpp"
#include "chains.hpp"

using namespace bandchain;

TEST_CASE("E1 stationary prefix matches the geometric closed form") {
    const StationaryDistribution pi = stationary_prefix(make_e1(), 60);
    CHECK(pi.residual <= 1e-10);

    double sum = 0.0;
    for (double x : pi.prefix) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(pi.at(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    for (Index n = 0; n <= 40; ++n) {
        const double exact = (1.0 - kTauE1) * std::pow(kTauE1, static_cast<double>(n));
        CHECK(std::abs(pi.at(n) - exact) <= 1e-10);
    }
}

TEST_CASE("tail ratio of E1 and E2") {
    const StationaryDistribution pi1 = stationary_prefix(make_e1(), 60);
    const TailRatioEstimate r1 = tail_ratio(pi1, 20, 40, 1, 1);
    CHECK(std::abs(r1.tau - kTauE1) <= 1e-8);

    const StationaryDistribution pi2 = stationary_prefix(make_e2(), 120);
    const TailRatioEstimate r2 = tail_ratio(pi2, 30, 50, 1, 2);
    CHECK(std::abs(r2.tau - kTauE2) <= 1e-4);
}

TEST_CASE("tail ratio of an exactly geometric prefix is exact") {
    StationaryDistribution pi;
    pi.k = 60;
    const double tau = 0.42;
    for (Index n = 0; n <= 60; ++n)
        pi.prefix.push_back((1.0 - tau) * std::pow(tau, static_cast<double>(n)));
    const TailRatioEstimate est = tail_ratio(pi, 10, 40, 1, 1);
    CHECK(est.tau == doctest::Approx(tau).epsilon(1e-14));
    CHECK(est.max_deviation <= 1e-14);
}

TEST_CASE("tail ratio window bounds are enforced") {
    const StationaryDistribution pi = stationary_prefix(make_e1(), 60);
    CHECK_THROWS_AS(tail_ratio(pi, 0, 40, 1, 1), WindowTooWide);
    CHECK_THROWS_AS(tail_ratio(pi, 20, 59, 1, 1), WindowTooWide);
    CHECK_THROWS_AS(tail_ratio(pi, 30, 30, 1, 1), WindowTooWide);
}

TEST_CASE("pi ratios converge geometrically toward tau") {
    // |pi(i+1)/pi(i) - tau| shrinks along the valid window for E2.
    // The ratio error decays like 0.34^i and reaches the noise floor near
    // i = 30, so only the early window is compared.
    const StationaryDistribution pi = stationary_prefix(make_e2(), 150);
    double prev = std::abs(pi.at(11) / pi.at(10) - kTauE2);
    for (Index i = 15; i <= 25; i += 5) {
        const double dev = std::abs(pi.at(i + 1) / pi.at(i) - kTauE2);
        CHECK(dev <= prev + 1e-14);
        prev = dev;
    }
}

TEST_CASE("weighted norms") {
    const StationaryDistribution pi = stationary_prefix(make_e1(), 60);
    std::vector<double> ones(static_cast<std::size_t>(pi.size()), 1.0);
    auto [l1, l2] = weighted_norms(ones, pi);
    CHECK(l1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(l2 == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> ind(static_cast<std::size_t>(pi.size()), 0.0);
    ind[0] = 1.0;
    auto [i1, i2] = weighted_norms(ind, pi);
    CHECK(i1 == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(i2 == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-6));

    std::vector<double> zero(static_cast<std::size_t>(pi.size()), 0.0);
    auto [z1, z2] = weighted_norms(zero, pi);
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);
}

TEST_CASE("l1(pi) <= l2(pi) on random vectors") {
    const StationaryDistribution pi = stationary_prefix(make_e2(), 80);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> f(static_cast<std::size_t>(pi.size()));
        for (double& x : f) x = normal(rng);
        auto [l1, l2] = weighted_norms(f, pi);
        CHECK(l1 <= l2 + 1e-12);
    }
}

TEST_CASE("truncation stability of the prefix") {
    const BandKernel e2 = make_e2();
    const StationaryDistribution a = stationary_prefix(e2, 100);
    const StationaryDistribution b = stationary_prefix(e2, 120);
    for (Index i = 0; i <= 100 - 2 * e2.half_bandwidth(); ++i)
        CHECK(std::abs(a.at(i) - b.at(i)) <= 1e-9);
}

TEST_CASE("power-iteration path agrees with the GTH path") {
    // k = 520 exercises the large-k branch; compare head entries against the
    // exact geometric law.
    const StationaryDistribution pi = stationary_prefix(make_e1(), 520);
    CHECK(pi.residual <= 1e-10);
    for (Index n = 0; n <= 20; ++n) {
        const double exact = (1.0 - kTauE1) * std::pow(kTauE1, static_cast<double>(n));
        CHECK(pi.at(n) == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("stationary CSV shape") {
    const StationaryDistribution pi = stationary_prefix(make_e1(), 30);
    std::istringstream in(stationary_csv(pi));
    std::string header;
    std::getline(in, header);
    CHECK(header == "i,pi,ratio");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 31);
}

TEST_CASE("tau_hat is populated by stationary_prefix") {
    const StationaryDistribution pi = stationary_prefix(make_e1(), 90);
    CHECK(pi.tau_hat == doctest::Approx(kTauE1).epsilon(1e-8));
    CHECK_FALSE(pi.tau_zero_flagged);
}
