#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "coxspec/perturbation.hpp"
#include "coxspec/spectrum.hpp"
#include "support/random_models.hpp"

using namespace coxspec;

namespace {

// distance between a predicted root and its nearest exact solution
double nearest_exact(const PerturbedRoot& r, const SpectrumResult& exact) {
    double best = 1e300;
    for (const SpectralPoint& p : exact.points) {
        double d = 0.0;
        for (size_t j = 0; j < p.momenta.k.size(); ++j)
            d = std::max(d, std::abs(p.momenta.k[j] - r.momenta.k[j]));
        best = std::min(best, d);
    }
    return best;
}

} // namespace

TEST_CASE("decoupled roots for two uncoupled channels") {
    ChannelModel m;
    m.n_channels = 2;
    m.thresholds = {0.0, 1.0};
    m.alpha = {1.0, 2.0};
    m.factorization_energy = -9.0;

    const std::vector<PerturbedRoot> roots = decoupled_roots(m);
    REQUIRE(roots.size() == 4);
    // level 1: k1 = -i, k2 = +/- i sqrt(2); level 2: k2 = -2i, k1 = +/- i sqrt(3)
    int l1 = 0, l2 = 0;
    for (const PerturbedRoot& r : roots) {
        if (r.level == 0) {
            ++l1;
            REQUIRE(std::abs(r.momenta.k[0] - cplx(0.0, -1.0)) < 1e-14);
            REQUIRE(std::abs(std::abs(r.momenta.k[1].imag()) - std::sqrt(2.0)) < 1e-14);
            REQUIRE(std::abs(r.momenta.k[1].real()) < 1e-14);
        } else {
            ++l2;
            REQUIRE(std::abs(r.momenta.k[1] - cplx(0.0, -2.0)) < 1e-14);
            REQUIRE(std::abs(std::abs(r.momenta.k[0].imag()) - std::sqrt(3.0)) < 1e-14);
        }
    }
    REQUIRE(l1 == 2);
    REQUIRE(l2 == 2);
}

TEST_CASE("decoupled level above threshold is flagged as a zero-width resonance") {
    ChannelModel m;
    m.n_channels = 2;
    m.thresholds = {0.0, 1.0};
    m.alpha = {1.0, 0.5};  // E2 = -0.25 + 1 = 0.75 > 0
    m.factorization_energy = -9.0;
    for (const PerturbedRoot& r : decoupled_roots(m)) {
        if (r.level == 1) REQUIRE(r.zero_width_resonance);
        else REQUIRE_FALSE(r.zero_width_resonance);
    }
}

TEST_CASE("zero-width resonance count matches the sheet combinatorics") {
    // all levels n >= 2 above the first threshold: (N-1) 2^(N-2) pairs
    ChannelModel m;
    m.n_channels = 3;
    m.thresholds = {0.0, 6.0, 11.0};
    m.alpha = {1.0, 1.2, 1.5};
    m.factorization_energy = -25.0;
    int flagged = 0;
    for (const PerturbedRoot& r : decoupled_roots(m)) flagged += r.zero_width_resonance ? 1 : 0;
    REQUIRE(flagged == 2 * 4);  // (N-1) 2^(N-1) zeros, i.e. (N-1) 2^(N-2) pairs
}

TEST_CASE("decoupled_roots rejects coupled models") {
    ChannelModel m;
    m.n_channels = 2;
    m.thresholds = {0.0, 1.0};
    m.alpha = {1.0, 2.0};
    m.beta = {{1, 0, 0.3}};
    m.factorization_energy = -9.0;
    REQUIRE_THROWS_AS(decoupled_roots(m), ValidationError);
}

TEST_CASE("zero coupling shape reproduces the decoupled roots") {
    ChannelModel m;
    m.n_channels = 3;
    m.thresholds = {0.0, 4.0, 9.0};
    m.alpha = {-1.0, 2.2, -1.5};
    m.factorization_energy = -25.0;
    CouplingSplit split;
    split.beta = 0.1;
    split.b = RMat(3);
    const std::vector<PerturbedRoot> a = perturbed_roots(m, split);
    const std::vector<PerturbedRoot> b = decoupled_roots(m);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].momenta.k.size(); ++j)
            REQUIRE(std::abs(a[i].momenta.k[j] - b[i].momenta.k[j]) < 1e-14);
}

TEST_CASE("second-order correction against the exact solver, two channels") {
    // alpha = (1, 2), Delta = (0, 5), b12 = 1:
    // level-1 sheet-+ root is k1 = -i + i beta^2 / (2 + sqrt(6))
    const double beta = 0.05;
    ChannelModel m;
    m.n_channels = 2;
    m.thresholds = {0.0, 5.0};
    m.alpha = {1.0, 2.0};
    m.beta = {{1, 0, beta}};
    m.factorization_energy = -16.0;

    CouplingSplit split = CouplingSplit::from_model(m);
    REQUIRE(split.beta == Catch::Approx(beta));
    const std::vector<PerturbedRoot> roots = perturbed_roots(m, split);
    REQUIRE(roots.size() == 4);

    const cplx predicted = cplx(0.0, -1.0) + cplx(0.0, 1.0) * beta * beta / (2.0 + std::sqrt(6.0));
    bool found = false;
    for (const PerturbedRoot& r : roots)
        if (r.level == 0 && r.sheet.signs[1] == +1) {
            REQUIRE(std::abs(r.momenta.k[0] - predicted) < 1e-14);
            found = true;
        }
    REQUIRE(found);

    const SpectrumResult exact = solve_spectrum(m);
    for (const PerturbedRoot& r : roots)
        REQUIRE(nearest_exact(r, exact) < beta * beta * beta);
}

TEST_CASE("zero-width resonances acquire width of the predicted sign and size") {
    // alpha2^2 < Delta2: the level-2 zero moves off the axis; the real part of
    // k2 is +/- beta^2 sqrt(Delta2 - alpha2^2) / (alpha1^2 - alpha2^2 + Delta2)
    const double beta = 0.02;
    ChannelModel m;
    m.n_channels = 2;
    m.thresholds = {0.0, 2.0};
    m.alpha = {1.2, 0.8};
    m.beta = {{1, 0, beta}};
    m.factorization_energy = -16.0;

    const double expected_re = beta * beta * std::sqrt(2.0 - 0.64) / (1.44 - 0.64 + 2.0);

    const std::vector<PerturbedRoot> roots = perturbed_roots(m, CouplingSplit::from_model(m));
    const SpectrumResult exact = solve_spectrum(m);
    int checked = 0;
    for (const PerturbedRoot& r : roots) {
        if (r.level != 1) continue;
        REQUIRE(r.zero_width_resonance);
        const double re = r.momenta.k[1].real();
        REQUIRE(std::abs(std::abs(re) - expected_re) < 0.05 * expected_re + 1e-12);
        // the exact solver confirms a complex zero with the matching sign
        double best = 1e300;
        cplx exact_k2;
        for (const SpectralPoint& p : exact.points) {
            const double d = std::abs(p.momenta.k[1] - r.momenta.k[1]);
            if (d < best) { best = d; exact_k2 = p.momenta.k[1]; }
        }
        REQUIRE(exact_k2.real() * re > 0.0);
        ++checked;
    }
    REQUIRE(checked == 2);
}

TEST_CASE("near-degenerate correction denominators are reported") {
    ChannelModel m;
    m.n_channels = 2;
    m.thresholds = {0.0, 3.0};
    // level 1 (alpha_1 = -2): denominator alpha_2 - sqrt(alpha_1^2 + Delta_2)
    // vanishes when alpha_2 = sqrt(7)
    m.alpha = {-2.0, std::sqrt(7.0) + 1e-9};
    m.factorization_energy = -16.0;
    CouplingSplit split;
    split.beta = 0.05;
    split.b = RMat(2);
    split.b(0, 1) = split.b(1, 0) = 1.0;
    REQUIRE_THROWS_AS(perturbed_roots(m, split), NumericError);
}

TEST_CASE("perturbed roots are in bijection with the exact spectrum at small coupling") {
    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + trial % 3;
        const testing::PerturbationFamily fam = testing::random_perturbation_family(rng, n);
        const double beta = 0.02;
        const ChannelModel m = fam.coupled(beta);
        CouplingSplit split;
        split.beta = beta;
        split.b = fam.b;
        const std::vector<PerturbedRoot> approx = perturbed_roots(m, split);
        const int expected = n * (1 << (n - 1));
        REQUIRE(static_cast<int>(approx.size()) == expected);

        const SpectrumResult exact = solve_spectrum(m);
        REQUIRE(static_cast<int>(exact.points.size()) == expected);

        // greedy nearest matching must be a bijection with small distances
        std::vector<bool> used(exact.points.size(), false);
        for (const PerturbedRoot& r : approx) {
            double best = 1e300;
            size_t best_i = 0;
            for (size_t i = 0; i < exact.points.size(); ++i) {
                if (used[i]) continue;
                double d = 0.0;
                for (size_t j = 0; j < r.momenta.k.size(); ++j)
                    d = std::max(d, std::abs(exact.points[i].momenta.k[j] - r.momenta.k[j]));
                if (d < best) { best = d; best_i = i; }
            }
            used[best_i] = true;
            REQUIRE(best < 0.05);
        }
    }
}

TEST_CASE("degenerate levels split under generic coupling") {
    std::mt19937_64 rng(61);
    const testing::PerturbationFamily fam = testing::random_perturbation_family(rng, 3);
    CouplingSplit split;
    split.beta = 0.1;
    split.b = fam.b;
    const std::vector<PerturbedRoot> roots = perturbed_roots(fam.coupled(split.beta), split);
    // within each level, the 2^(N-1) sheet roots must now be pairwise distinct
    for (int level = 0; level < 3; ++level) {
        std::vector<cplx> ks;
        for (const PerturbedRoot& r : roots)
            if (r.level == level) ks.push_back(r.momenta.k[static_cast<size_t>(level)]);
        REQUIRE(ks.size() == 4);
        for (size_t a = 0; a < ks.size(); ++a)
            for (size_t b = a + 1; b < ks.size(); ++b) REQUIRE(std::abs(ks[a] - ks[b]) > 1e-10);
    }
}

TEST_CASE("normalized error decreases with the coupling on a random family") {
    std::mt19937_64 rng(4242);
    const testing::PerturbationFamily fam = testing::random_perturbation_family(rng, 3);
    const std::vector<double> betas = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> normalized;
    for (double beta : betas) {
        CouplingSplit split;
        split.beta = beta;
        split.b = fam.b;
        const ChannelModel m = fam.coupled(beta);
        const std::vector<PerturbedRoot> approx = perturbed_roots(m, split);
        const SpectrumResult exact = solve_spectrum(m);
        double worst = 0.0;
        for (const PerturbedRoot& r : approx) worst = std::max(worst, nearest_exact(r, exact));
        normalized.push_back(worst / (beta * beta));
    }
    for (size_t i = 1; i < normalized.size(); ++i) REQUIRE(normalized[i] < normalized[i - 1]);
}

TEST_CASE("channel-1 re-anchored sheets agree with the exact solver labels") {
    std::mt19937_64 rng(93);
    const testing::PerturbationFamily fam = testing::random_perturbation_family(rng, 2);
    const double beta = 0.02;
    CouplingSplit split;
    split.beta = beta;
    split.b = fam.b;
    const ChannelModel m = fam.coupled(beta);
    const std::vector<PerturbedRoot> approx = perturbed_roots(m, split);
    const SpectrumResult exact = solve_spectrum(m);
    for (const PerturbedRoot& r : approx) {
        double best = 1e300;
        const SpectralPoint* match = nullptr;
        for (const SpectralPoint& p : exact.points) {
            double d = 0.0;
            for (size_t j = 0; j < r.momenta.k.size(); ++j)
                d = std::max(d, std::abs(p.momenta.k[j] - r.momenta.k[j]));
            if (d < best) { best = d; match = &p; }
        }
        REQUIRE(match != nullptr);
        REQUIRE(r.sheet_channel1.str() == match->sheet.str());
    }
}
