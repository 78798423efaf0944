#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "coxspec/polynomial.hpp"

using namespace coxspec;

namespace {

Poly from_roots(const std::vector<cplx>& roots) {
    Poly p({cplx(1.0, 0.0)});
    for (const cplx& r : roots) p = p * Poly({-r, 1.0});
    return p;
}

// greedy multiset match: every expected root found once within tol
double match_roots(std::vector<cplx> found, const std::vector<cplx>& expected) {
    double worst = 0.0;
    for (const cplx& e : expected) {
        size_t best = 0;
        double bd = 1e300;
        for (size_t i = 0; i < found.size(); ++i) {
            const double d = std::abs(found[i] - e);
            if (d < bd) { bd = d; best = i; }
        }
        REQUIRE(!found.empty());
        worst = std::max(worst, bd);
        found.erase(found.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return worst;
}

} // namespace

TEST_CASE("aberth recovers prescribed roots") {
    const std::vector<cplx> roots = {{2.0, 0.0}, {-1.5, 0.3}, {0.0, -2.0}, {0.7, 0.7}, {-0.2, -0.1}};
    const std::vector<cplx> found = aberth_roots(from_roots(roots));
    REQUIRE(found.size() == roots.size());
    REQUIRE(match_roots(found, roots) < 1e-10);
}

TEST_CASE("aberth handles close root pairs") {
    const std::vector<cplx> roots = {{1.0, 0.0}, {1.0 + 5e-4, 0.0}, {-2.0, 1.0}, {3.0, -1.0}};
    const std::vector<cplx> found = aberth_roots(from_roots(roots));
    REQUIRE(found.size() == roots.size());
    REQUIRE(match_roots(found, roots) < 1e-6);
}

TEST_CASE("aberth strips exact zero roots") {
    Poly p = from_roots({{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}});
    const std::vector<cplx> found = aberth_roots(p);
    REQUIRE(found.size() == 3);
    int zeros = 0;
    for (const cplx& r : found) zeros += std::abs(r) < 1e-12 ? 1 : 0;
    REQUIRE(zeros == 2);
}

TEST_CASE("aberth rejects a vanishing polynomial") {
    REQUIRE_THROWS_AS(aberth_roots(Poly({cplx{}, cplx{}})), NumericError);
}

TEST_CASE("root radius bound dominates all roots") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<cplx> roots;
        const int deg = 2 + trial % 7;
        for (int i = 0; i < deg; ++i) roots.emplace_back(d(rng), d(rng));
        const Poly p = from_roots(roots);
        const double bound = root_radius_bound(p);
        for (const cplx& r : roots) REQUIRE(std::abs(r) <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("eval2 derivative matches finite differences") {
    const Poly p({cplx(1.0, -1.0), cplx(0.0, 2.0), cplx(-3.0, 0.5), cplx(1.0, 1.0)});
    const cplx x(0.3, -0.7);
    cplx v, dv;
    p.eval2(x, v, dv);
    REQUIRE(std::abs(v - p.eval(x)) < 1e-14);
    const double h = 1e-6;
    const cplx fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
    REQUIRE(std::abs(dv - fd) < 1e-7);
}
