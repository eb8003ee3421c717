#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Dense>

#include "bandchain/oracle.hpp"
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

TEST_CASE("truncate_augment of E1 at k = 2") {
    const Eigen::MatrixXd P = truncate_augment(make_e1(), 2);
    REQUIRE(P.rows() == 3);
    CHECK(P(0, 0) == doctest::Approx(0.75));
    CHECK(P(0, 1) == doctest::Approx(0.25));
    CHECK(P(0, 2) == doctest::Approx(0.0));
    CHECK(P(1, 0) == doctest::Approx(0.75));
    CHECK(P(1, 1) == doctest::Approx(0.0));
    CHECK(P(1, 2) == doctest::Approx(0.25));
    CHECK(P(2, 0) == doctest::Approx(0.0));
    CHECK(P(2, 1) == doctest::Approx(0.75));
    CHECK(P(2, 2) == doctest::Approx(0.25));   // P(2,3) folded into column 2
}

TEST_CASE("truncate_augment rows sum to 1 and keep the band") {
    for (Index k : {Index{5}, Index{12}, Index{40}}) {
        const Eigen::MatrixXd P = truncate_augment(make_e2(), k);
        for (Index i = 0; i <= k; ++i)
            CHECK(std::abs(P.row(i).sum() - 1.0) <= 1e-15);
    }
    const Eigen::MatrixXd P5 = truncate_augment(make_e1(), 5);
    for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 5; ++j)
            if (std::llabs(i - j) > 1) CHECK(P5(i, j) == 0.0);
}

TEST_CASE("spectrum of P_2 of E1") {
    const SpectrumResult spec = spectrum(truncate_augment(make_e1(), 2));
    REQUIRE(spec.eigenvalues.size() == 3);
    CHECK(min_distance(spec.eigenvalues, {1.0, 0.0}) <= 1e-10);
    CHECK(min_distance(spec.eigenvalues, {kSubunitP2, 0.0}) <= 1e-8);
    CHECK(min_distance(spec.eigenvalues, {-kSubunitP2, 0.0}) <= 1e-8);
    CHECK(spec.backward_error <= 1e-10);
}

TEST_CASE("spectrum of small fixed matrices") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const auto spec_id = spectrum(id).eigenvalues;
    for (const auto& z : spec_id) CHECK(std::abs(z - 1.0) <= 1e-12);

    Eigen::MatrixXd swap(2, 2);
    swap << 0, 1, 1, 0;
    const auto spec_swap = spectrum(swap).eigenvalues;
    CHECK(min_distance(spec_swap, {1.0, 0.0}) <= 1e-12);
    CHECK(min_distance(spec_swap, {-1.0, 0.0}) <= 1e-12);

    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.1, 0.3, 0.7;
    CHECK_THROWS_AS(spectrum(bad), Error);
}

TEST_CASE("spectrum sanity: unit disk, trace and determinant") {
    for (Index k : {Index{10}, Index{30}}) {
        const Eigen::MatrixXd P = truncate_augment(make_e2(), k);
        const auto spec = spectrum(P).eigenvalues;
        CHECK(min_distance(spec, {1.0, 0.0}) <= 1e-10);
        std::complex<double> sum = 0.0, prod = 1.0;
        for (const auto& z : spec) {
            CHECK(std::abs(z) <= 1.0 + 1e-9);
            sum += z;
            prod *= z;
        }
        CHECK(std::abs(sum - P.trace()) <= 1e-8);
        CHECK(std::abs(prod - P.determinant()) <= 1e-8);
    }
}

TEST_CASE("spectrum matches the charpoly oracle up to order 8") {
    for (Index k : {Index{2}, Index{4}, Index{7}}) {
        for (const BandKernel& kernel : {make_e1(), make_e2()}) {
            if (k < kernel.i0() + kernel.half_bandwidth()) continue;
            const Eigen::MatrixXd P = truncate_augment(kernel, k);
            const auto qr = spectrum(P).eigenvalues;
            const auto cp = oracle::charpoly_spectrum(P);
            for (const auto& z : qr) CHECK(min_distance(cp, z) <= 1e-8);
        }
    }
}

TEST_CASE("rho_from_spectrum") {
    using C = std::complex<double>;
    const RhoResult r =
        rho_from_spectrum({C{1.0}, C{kSubunitP2}, C{-kSubunitP2}}, 1e-9);
    CHECK(r.rho_k == doctest::Approx(kSubunitP2));
    CHECK(r.unit_count == 1);
    CHECK_FALSE(r.periodicity_suspected);

    CHECK_THROWS_AS(rho_from_spectrum({C{1.0}}, 1e-9), NoSubunitEigenvalue);

    const RhoResult p2 = rho_from_spectrum({C{1.0}, C{-1.0}, C{0.5}}, 1e-9);
    CHECK(p2.rho_k == doctest::Approx(0.5));
    CHECK(p2.unit_count == 2);
    CHECK(p2.periodicity_suspected);
}

TEST_CASE("sweep on E1 stays below alpha0 and is Cauchy") {
    const auto results = sweep(make_e1(), {25, 50, 100, 200}, 1e-9);
    REQUIRE(results.size() == 4);
    for (const auto& r : results) {
        REQUIRE(r.ok);
        CHECK(r.unit_count == 1);
        CHECK(r.rho_k <= kAlpha0E1 + 0.01);
        CHECK(static_cast<Index>(r.spectrum.size()) == r.k + 1);
    }
    CHECK(std::abs(results[3].rho_k - results[2].rho_k) <= 1e-2);

    SUBCASE("classify returns the case (a) bound") {
        const RateEstimate est = classify(results, kAlpha0E1, 0.01);
        CHECK(est.rate_case == RateCase::CaseA_bound);
        CHECK(est.rho2 == doctest::Approx(kAlpha0E1));
        CHECK(est.rhoV_is_bound);
    }
}

TEST_CASE("empty sweep and per-k failure records") {
    CHECK(sweep(make_e1(), {}, 1e-9).empty());

    // k = 1 is below i0 + N and must fail as a record, not an exception.
    const auto results = sweep(make_e1(), {1, 25}, 1e-9);
    REQUIRE(results.size() == 2);
    CHECK_FALSE(results[0].ok);
    CHECK_FALSE(results[0].error.empty());
    CHECK(results[1].ok);
}

TEST_CASE("classify decision rules on synthetic sweeps") {
    auto synth = [](std::vector<double> rhos) {
        std::vector<TruncationResult> out;
        Index k = 25;
        for (double r : rhos) {
            TruncationResult t;
            t.k = k;
            t.rho_k = r;
            out.push_back(t);
            k *= 2;
        }
        return out;
    };
    const double alpha0 = 0.866;

    const RateEstimate b = classify(synth({0.93, 0.948, 0.9499, 0.95}), alpha0, 0.01);
    CHECK(b.rate_case == RateCase::CaseB_value);
    CHECK(b.rho2 == doctest::Approx(0.95));
    CHECK_FALSE(b.rhoV_is_bound);

    const RateEstimate a = classify(synth({0.85, 0.86, 0.8665, 0.867}), alpha0, 0.01);
    CHECK(a.rate_case == RateCase::CaseA_bound);
    CHECK(a.rho2 == doctest::Approx(alpha0));

    // Tail exceeds alpha0 + margin but has not stabilized: no case applies.
    const RateEstimate ind =
        classify(synth({0.80, 0.85, 0.88, 0.90}), alpha0, 0.01);
    CHECK(ind.rate_case == RateCase::Indeterminate);

    CHECK_THROWS_AS(classify(synth({0.8, 0.8, 0.8}), alpha0, 0.01),
                    InsufficientSweep);
}

TEST_CASE("sweep CSV format") {
    const auto results = sweep(make_e1(), {25, 50}, 1e-9);
    std::istringstream in(sweep_csv(results));
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,rho_k,unit_count,backward_error,wall_ms");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("period-2 truncation carries the periodicity warning") {
    // Deterministic descent with a 0 <-> 1 bounce: the truncation keeps all
    // of its mass, so P_k genuinely has eigenvalues {1, -1} (period 2). The
    // augmented +/-1 random walk would not do: folding P(k, k+1) into the
    // last column adds a self-loop at k and destroys the periodicity.
    const BandKernel walk = BandKernel::varying(
        1, 1, {{0.0, 1.0}},
        [](Index i) { return SparseRow{{i - 1, 1.0}}; },
        Increments{1, 1, {{-1, 1.0}}});
    const auto results = sweep(walk, {20}, 1e-9);
    REQUIRE(results.size() == 1);
    REQUIRE(results[0].ok);
    CHECK(results[0].periodicity_suspected);
    CHECK(results[0].unit_count > 1);
}
