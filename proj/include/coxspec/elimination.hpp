// Reduction of det B(k) = 0 plus the threshold conditions to a single
// univariate polynomial P_N(k1) of degree N 2^(N-1), with the
// back-substitution chain that recovers k_2..k_N from a root k1.
//
// det B is multilinear in the momenta, so it is stored as a map from
// square-free monomials over {k_2..k_N} (bitmask, bit j-2 <-> channel j,
// 1-based) to univariate polynomials in k1. Eliminating k_m squares the
// split k_m P = Q and replaces every k_j^2 by k1^2 - Delta_j, which keeps
// the representation multilinear by construction.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "coxspec/errors.hpp"
#include "coxspec/model.hpp"
#include "coxspec/polynomial.hpp"

namespace coxspec {

struct MultilinearPoly {
    int n_channels = 0;
    std::map<unsigned, Poly> terms;         // bitmask over channels 2..N -> coeff(k1)

    void add_term(unsigned mask, const Poly& p) {
        auto [it, inserted] = terms.emplace(mask, p);
        if (!inserted) it->second += p;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& [mask, p] : terms) m = std::max(m, p.max_abs());
        return m;
    }

    void rescale(double f) {
        for (auto& [mask, p] : terms) p.scale(f);
    }

    void prune(double tol) {
        for (auto it = terms.begin(); it != terms.end();) {
            it->second.trim(tol);
            if (it->second.empty()) it = terms.erase(it);
            else ++it;
        }
    }

    // Evaluate at a full momenta vector (k[0] = k1, ...). Also returns the
    // sum of absolute term contributions, the natural scale for deciding
    // whether a value is "numerically zero" here.
    cplx eval(const std::vector<cplx>& k, double* abs_scale = nullptr) const {
        cplx total = 0.0;
        double scale = 0.0;
        for (const auto& [mask, p] : terms) {
            cplx v = p.eval(k[0]);
            unsigned bits = mask;
            int j = 1;
            while (bits) {
                if (bits & 1u) v *= k[static_cast<size_t>(j)];
                bits >>= 1;
                ++j;
            }
            total += v;
            scale += std::abs(v);
        }
        if (abs_scale) *abs_scale = scale;
        return total;
    }
};

// Product of two multilinear polynomials with immediate reduction of every
// squared momentum: common mask bits contribute (k1^2 - Delta_j) factors.
inline MultilinearPoly multilinear_product(const MultilinearPoly& a, const MultilinearPoly& b,
                                           const ChannelModel& m) {
    MultilinearPoly out;
    out.n_channels = a.n_channels;
    for (const auto& [m1, c1] : a.terms)
        for (const auto& [m2, c2] : b.terms) {
            Poly c = c1 * c2;
            unsigned common = m1 & m2;
            int j = 1;
            while (common) {
                if (common & 1u) {
                    Poly f({-m.thresholds[static_cast<size_t>(j)], 0.0, 1.0});
                    c = c * f;
                }
                common >>= 1;
                ++j;
            }
            out.add_term(m1 ^ m2, c);
        }
    return out;
}

// Expansion of det(U0 - i diag(k)) over principal minors:
//   det B = sum over subsets S of (-i)^|S| (prod_{j in S} k_j) det U0[S^c].
// The leading monomial k1 k2 ... kN carries (-i)^N and the constant term is
// det U0.
inline MultilinearPoly build_detb_poly(const ChannelModel& m) {
    const int n = m.n_channels;
    const RMat u0 = m.u0();
    MultilinearPoly out;
    out.n_channels = n;
    const cplx minus_i(0.0, -1.0);
    for (unsigned subset = 0; subset < (1u << n); ++subset) {
        cplx coeff = principal_minor_det(u0, subset);
        for (int b = 0; b < __builtin_popcount(subset); ++b) coeff *= minus_i;
        const int k1_power = (subset & 1u) ? 1 : 0;
        Poly p;
        p.c.assign(static_cast<size_t>(k1_power) + 1, cplx{});
        p.c[static_cast<size_t>(k1_power)] = coeff;
        out.add_term(subset >> 1, p);
    }
    out.prune(0.0);
    return out;
}

struct SubstitutionChain {
    struct Step {
        int channel = 0;                    // 0-based channel eliminated at this step
        MultilinearPoly p;                  // k_channel * p = q at every root
        MultilinearPoly q;
    };
    std::vector<Step> steps;                // in elimination order: k_N, k_{N-1}, ..., k_2
    Poly p_final;                           // univariate P_N(k1)
};

// The elimination loop: split off the highest remaining momentum, square,
// reduce squares through the thresholds, renormalize, repeat. Generic models
// end with deg P_N = N 2^(N-1); an identically vanishing P_N signals exact
// parameter degeneracy and is reported, not patched.
inline SubstitutionChain eliminate(const MultilinearPoly& poly, const ChannelModel& m) {
    SubstitutionChain chain;
    MultilinearPoly cur = poly;
    for (int channel = m.n_channels - 1; channel >= 1; --channel) {
        const unsigned bit = 1u << (channel - 1);
        MultilinearPoly p, q;
        p.n_channels = q.n_channels = cur.n_channels;
        for (const auto& [mask, c] : cur.terms) {
            if (mask & bit) {
                p.add_term(mask & ~bit, c);
            } else {
                Poly neg = c;
                neg.scale(-1.0);
                q.add_term(mask, neg);      // k_channel * P = Q  <=>  poly = k_channel P - Q
            }
        }
        chain.steps.push_back({channel, p, q});

        MultilinearPoly pp = multilinear_product(p, p, m);
        Poly f({-m.thresholds[static_cast<size_t>(channel)], 0.0, 1.0});
        for (auto& [mask, c] : pp.terms) c = c * f;
        MultilinearPoly qq = multilinear_product(q, q, m);
        MultilinearPoly next = pp;
        for (const auto& [mask, c] : qq.terms) {
            Poly neg = c;
            neg.scale(-1.0);
            next.add_term(mask, neg);
        }
        const double scale = next.max_abs();
        if (scale > 0.0) next.rescale(1.0 / scale);
        next.prune(0.0);
        cur = next;
    }

    if (cur.terms.size() > 1 || (cur.terms.size() == 1 && cur.terms.begin()->first != 0u))
        throw NumericError("elimination-incomplete", "eliminate: non-univariate remainder");
    chain.p_final = cur.terms.empty() ? Poly{} : cur.terms.begin()->second;
    chain.p_final.trim(0.0);
    if (chain.p_final.empty() || chain.p_final.max_abs() < 1e-200)
        throw NumericError("degenerate-leading-form", "eliminate: P_N vanishes identically");
    return chain;
}

// Recovers k_2..k_N for a root k1 of P_N by walking the chain backwards
// (k_2 first). Throws "chain-breakdown" when a divisor P_m is numerically
// zero at the evaluation point; callers fall back to a per-sheet scan.
inline Momenta back_substitute(cplx k1, const SubstitutionChain& chain, const ChannelModel& m) {
    Momenta mom;
    mom.energy = k1 * k1;
    mom.k.assign(static_cast<size_t>(m.n_channels), cplx{});
    mom.k[0] = k1;
    for (auto it = chain.steps.rbegin(); it != chain.steps.rend(); ++it) {
        double scale_p = 0.0;
        const cplx pv = it->p.eval(mom.k, &scale_p);
        const cplx qv = it->q.eval(mom.k);
        if (std::abs(pv) <= 1e-10 * (scale_p + 1e-300))
            throw NumericError("chain-breakdown",
                               "back_substitute: P vanishes at evaluation point (channel " +
                                   std::to_string(it->channel + 1) + ")");
        mom.k[static_cast<size_t>(it->channel)] = qv / pv;
    }
    return mom;
}

} // namespace coxspec
