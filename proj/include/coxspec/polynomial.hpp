// Dense univariate polynomials with complex coefficients, plus an
// Aberth-Ehrlich simultaneous root finder.
//
// Coefficients are stored ascending: c[0] + c[1] x + ... + c[deg] x^deg.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "coxspec/errors.hpp"
#include "coxspec/linalg.hpp"

namespace coxspec {

struct Poly {
    std::vector<cplx> c;

    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : c(std::move(coeffs)) {}
    static Poly constant(cplx v) { return Poly({v}); }

    bool empty() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& v : c) m = std::max(m, std::abs(v));
        return m;
    }

    void trim(double tol = 0.0) {
        while (!c.empty() && std::abs(c.back()) <= tol) c.pop_back();
    }

    cplx eval(cplx x) const {
        cplx v = 0.0;
        for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
        return v;
    }

    // Value and derivative in one Horner pass.
    void eval2(cplx x, cplx& p, cplx& dp) const {
        p = 0.0;
        dp = 0.0;
        for (size_t i = c.size(); i-- > 0;) {
            dp = dp * x + p;
            p = p * x + c[i];
        }
    }

    Poly& operator+=(const Poly& rhs) {
        if (rhs.c.size() > c.size()) c.resize(rhs.c.size(), cplx{});
        for (size_t i = 0; i < rhs.c.size(); ++i) c[i] += rhs.c[i];
        return *this;
    }

    Poly& operator-=(const Poly& rhs) {
        if (rhs.c.size() > c.size()) c.resize(rhs.c.size(), cplx{});
        for (size_t i = 0; i < rhs.c.size(); ++i) c[i] -= rhs.c[i];
        return *this;
    }

    Poly operator*(const Poly& rhs) const {
        if (c.empty() || rhs.c.empty()) return Poly{};
        Poly out;
        out.c.assign(c.size() + rhs.c.size() - 1, cplx{});
        for (size_t i = 0; i < c.size(); ++i) {
            if (c[i] == cplx{}) continue;
            for (size_t j = 0; j < rhs.c.size(); ++j) out.c[i + j] += c[i] * rhs.c[j];
        }
        return out;
    }

    Poly& scale(cplx f) {
        for (cplx& v : c) v *= f;
        return *this;
    }
};

struct AberthOptions {
    int max_iterations = 500;
    double rel_tolerance = 1e-13;
};

// Upper bound on root magnitudes from coefficient magnitudes: the smaller of
// the Cauchy bound 1 + max|c_i/c_n| and the Fujiwara bound
// 2 max_i |c_{n-i}/c_n|^{1/i}. Both are valid; the Fujiwara one stays sane
// when the polynomial is normalized by its largest coefficient.
inline double root_radius_bound(const Poly& p) {
    const int n = p.degree();
    const double lead = std::abs(p.c[static_cast<size_t>(n)]);
    double cauchy = 0.0, fuji = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ratio = std::abs(p.c[static_cast<size_t>(i)]) / lead;
        cauchy = std::max(cauchy, ratio);
        if (ratio > 0.0) fuji = std::max(fuji, std::pow(ratio, 1.0 / (n - i)));
    }
    return std::min(1.0 + cauchy, 2.0 * fuji + 1e-12);
}

// All complex roots of p by Aberth-Ehrlich simultaneous iteration with
// deterministic initial guesses on a circle. Exact zero roots (vanishing
// trailing coefficients) are stripped first; a vanishing polynomial or a
// leading coefficient at underflow level is reported as degenerate.
inline std::vector<cplx> aberth_roots(Poly p, const AberthOptions& opts = {}) {
    const double mag = p.max_abs();
    if (mag <= 0.0) throw NumericError("degenerate-leading-form", "aberth_roots: zero polynomial");
    p.scale(1.0 / mag);
    p.trim(1e-200);
    if (p.degree() < 0) throw NumericError("degenerate-leading-form", "aberth_roots: polynomial vanished");

    std::vector<cplx> roots;
    size_t lead_zeros = 0;
    while (lead_zeros < p.c.size() && std::abs(p.c[lead_zeros]) == 0.0) ++lead_zeros;
    for (size_t i = 0; i < lead_zeros; ++i) roots.push_back(cplx{0.0, 0.0});
    if (lead_zeros > 0) p.c.erase(p.c.begin(), p.c.begin() + static_cast<std::ptrdiff_t>(lead_zeros));

    const int n = p.degree();
    if (n <= 0) return roots;
    if (n == 1) {
        roots.push_back(-p.c[0] / p.c[1]);
        return roots;
    }

    const double radius = root_radius_bound(p);
    std::vector<cplx> z(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        // irrational angle offset avoids symmetric stalls
        const double angle = 2.0 * std::numbers::pi * i / n + 0.376;
        z[static_cast<size_t>(i)] = 0.9 * radius * cplx(std::cos(angle), std::sin(angle));
    }

    for (int it = 0; it < opts.max_iterations; ++it) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx pv, dpv;
            p.eval2(z[static_cast<size_t>(i)], pv, dpv);
            if (pv == cplx{}) continue;
            if (dpv == cplx{}) dpv = cplx(1e-300, 0.0);
            const cplx w = pv / dpv;
            cplx sum = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                cplx d = z[static_cast<size_t>(i)] - z[static_cast<size_t>(j)];
                if (std::abs(d) < 1e-300) d = cplx(1e-300, 0.0);
                sum += 1.0 / d;
            }
            const cplx denom = 1.0 - w * sum;
            const cplx step = (std::abs(denom) < 1e-300) ? w : w / denom;
            z[static_cast<size_t>(i)] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[static_cast<size_t>(i)])));
        }
        if (worst < opts.rel_tolerance) break;
    }

    roots.insert(roots.end(), z.begin(), z.end());
    return roots;
}

} // namespace coxspec
