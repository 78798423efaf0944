// Two-channel closed forms: the inverse problem (two prescribed det-B zeros
// -> alpha_1, alpha_2 at fixed beta, Delta), completion to the remaining two
// zeros, the resonance parametrization, and the coupling constraints.
//
// Notation: the two prescribed zeros are (k1_i, k2_i), i = 1,2, with
// R1 = k1_2 - k1_1, R2 = k2_2 - k2_1. alpha_1 solves
//   alpha_1^2 - i (k1_1 + k1_2) alpha_1 - k1_1 k1_2 + beta^2 R1/R2 = 0,
// and alpha_2 then follows linearly from the difference of the two zero
// conditions, which fixes the branch pairing without any sign bookkeeping.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "coxspec/errors.hpp"
#include "coxspec/model.hpp"

namespace coxspec {

enum class Branch { upper, lower };

inline const char* to_string(Branch b) { return b == Branch::upper ? "upper" : "lower"; }

inline Branch parse_branch(const std::string& s) {
    if (s == "upper") return Branch::upper;
    if (s == "lower") return Branch::lower;
    throw ValidationError("bad-branch", "branch must be 'upper' or 'lower'");
}

struct TwoChannelSpec {
    double delta = 0.0;                     // Delta_2 > 0
    double beta = 0.0;
    std::array<cplx, 2> k1{};               // prescribed first-channel momenta
    std::array<cplx, 2> k2{};               // matching second-channel momenta
    Branch branch = Branch::upper;

    void check() const {
        if (!(delta > 0.0)) throw ValidationError("bad-delta", "two-channel spec requires delta > 0");
        for (int i = 0; i < 2; ++i) {
            const cplx res = k1[static_cast<size_t>(i)] * k1[static_cast<size_t>(i)] -
                             k2[static_cast<size_t>(i)] * k2[static_cast<size_t>(i)] - delta;
            if (std::abs(res) > 1e-9 * (1.0 + std::abs(k1[static_cast<size_t>(i)] * k1[static_cast<size_t>(i)])))
                throw ValidationError("bad-zeros", "prescribed zeros violate k1^2 - k2^2 = delta");
        }
        if (std::abs(k1[1] - k1[0]) < 1e-12 || std::abs(k2[1] - k2[0]) < 1e-12)
            throw ValidationError("bad-zeros", "prescribed zeros must be distinct in both channels");
    }
};

// First-channel momenta of a resonance pair with complex energies
// E_r +/- i E_i, and the threshold-matched second-channel momenta:
//   k1 = +/- k_r + i k_i,  k2 = +/- p_r + i p_i,
// with k_r > 0, p_r < 0 and sign(k_i) = -sign(p_i) (opposite quadrants).
// `sign` selects the sign of k_i (upper: k_i > 0).
inline TwoChannelSpec resonance_momenta(double e_r, double e_i, double delta, Branch sign,
                                        double beta = 0.0, Branch alpha_branch = Branch::upper) {
    if (!(e_i > 0.0)) throw ValidationError("bad-resonance", "resonance width requires E_i > 0");
    if (!(delta > 0.0)) throw ValidationError("bad-delta", "resonance_momenta requires delta > 0");
    // sqrt(x^2 + y^2) - x evaluated without cancellation for x > 0
    const auto hyp_minus = [](double x, double y) {
        return x > 0.0 ? y * y / (std::hypot(x, y) + x) : std::hypot(x, y) - x;
    };
    const double u = hyp_minus(e_r, e_i);
    const double k_r = e_i / std::sqrt(2.0 * u);
    const double k_i = (sign == Branch::upper ? 1.0 : -1.0) * std::sqrt(0.5 * u);
    const double v = hyp_minus(delta - e_r, e_i);
    const double p_r = -std::sqrt(0.5 * v);
    const double p_i = (sign == Branch::upper ? -1.0 : 1.0) * e_i / std::sqrt(2.0 * v);

    TwoChannelSpec spec;
    spec.delta = delta;
    spec.beta = beta;
    spec.branch = alpha_branch;
    spec.k1 = {cplx(k_r, k_i), cplx(-k_r, k_i)};
    spec.k2 = {cplx(p_r, p_i), cplx(-p_r, p_i)};
    return spec;
}

// Minimal coupling able to realize a resonance with the given parameters:
// beta >= sqrt(-k_r p_r).
inline double beta_lower_bound(double e_r, double e_i, double delta) {
    const TwoChannelSpec s = resonance_momenta(e_r, e_i, delta, Branch::lower);
    const double k_r = s.k1[0].real();
    const double p_r = s.k2[0].real();
    return std::sqrt(-k_r * p_r);
}

// A resonance can show up in the open-channel cross section only as a
// Feshbach resonance below the second threshold and narrower than its
// position: 0 < E_r < Delta and E_i < E_r.
inline bool visible_feshbach(double e_r, double e_i, double delta) {
    return 0.0 < e_r && e_r < delta && e_i < e_r;
}

struct InversionResult {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

namespace cox2_detail {

// signed square root realized by alpha_1 = (s1 + w1)/2 on the chosen branch
inline cplx alpha1_sqrt(const TwoChannelSpec& spec) {
    const cplx r1 = spec.k1[1] - spec.k1[0];
    const cplx r2 = spec.k2[1] - spec.k2[0];
    const cplx rad = -r1 * r1 - 4.0 * spec.beta * spec.beta * r1 / r2;
    return std::sqrt(rad);
}

} // namespace cox2_detail

// Solves for (alpha_1, alpha_2) given two prescribed zeros. The result must
// come out real; an imaginary remainder beyond tolerance means the zeros are
// not realizable with this beta/delta/branch.
inline InversionResult invert_two_roots(const TwoChannelSpec& spec, double reality_tol = 1e-10) {
    spec.check();
    const cplx r1 = spec.k1[1] - spec.k1[0];
    const cplx r2 = spec.k2[1] - spec.k2[0];
    const cplx s1 = cplx(0.0, 1.0) * (spec.k1[0] + spec.k1[1]);
    const cplx w1 = cox2_detail::alpha1_sqrt(spec);
    const cplx a1 = 0.5 * (s1 + (spec.branch == Branch::upper ? w1 : -w1));
    const cplx a2 = (spec.k1[0] * spec.k2[0] - spec.k1[1] * spec.k2[1] - cplx(0.0, 1.0) * a1 * r2) /
                    (cplx(0.0, 1.0) * r1);

    const double scale = 1.0 + std::abs(a1) + std::abs(a2);
    if (std::abs(a1.imag()) > reality_tol * scale || std::abs(a2.imag()) > reality_tol * scale)
        throw NumericError("non-real-alpha",
                           "invert_two_roots: prescribed zeros not realizable (alpha acquires an imaginary part)");

    // forward identities (k1 + i a1)(k2 + i a2) + beta^2 = 0 for both zeros
    for (int i = 0; i < 2; ++i) {
        const cplx res = (spec.k1[static_cast<size_t>(i)] + cplx(0.0, 1.0) * a1.real()) *
                             (spec.k2[static_cast<size_t>(i)] + cplx(0.0, 1.0) * a2.real()) +
                         spec.beta * spec.beta;
        if (std::abs(res) > 1e-10 * (1.0 + std::abs(spec.k1[static_cast<size_t>(i)])) * (1.0 + std::abs(a1) + std::abs(a2)))
            throw NumericError("non-real-alpha", "invert_two_roots: forward identity violated");
    }
    return {a1.real(), a2.real()};
}

struct CompletedRoots {
    std::array<cplx, 2> k1{};               // third and fourth zeros, first channel
    std::array<cplx, 2> k2{};               // matching second channel, paired by threshold
};

// The remaining two zeros once two are prescribed:
//   k1_{3,4} = [ -i w1 +/- sqrt(D1) ] / 2,  D1 = R1^2 + 4 beta^2 R2/R1 + 4 k1_1 k1_2,
// and the channel-2 values from the k1 <-> k2, Delta <-> -Delta swap rule,
// paired against k1_{3,4} through k1^2 - k2^2 = Delta.
inline CompletedRoots complete_roots(const TwoChannelSpec& spec, double alpha1, double alpha2) {
    spec.check();
    const cplx r1 = spec.k1[1] - spec.k1[0];
    const cplx r2 = spec.k2[1] - spec.k2[0];
    const cplx s1 = cplx(0.0, 1.0) * (spec.k1[0] + spec.k1[1]);
    const cplx s2 = cplx(0.0, 1.0) * (spec.k2[0] + spec.k2[1]);
    // signed square roots actually realized by the given alphas
    const cplx w1 = 2.0 * alpha1 - s1;
    const cplx w2 = 2.0 * alpha2 - s2;
    const cplx d1 = r1 * r1 + 4.0 * spec.beta * spec.beta * r2 / r1 + 4.0 * spec.k1[0] * spec.k1[1];
    const cplx d2 = r2 * r2 + 4.0 * spec.beta * spec.beta * r1 / r2 + 4.0 * spec.k2[0] * spec.k2[1];
    const cplx sq1 = std::sqrt(d1);
    const cplx sq2 = std::sqrt(d2);

    const std::array<cplx, 2> k1cand = {0.5 * (-cplx(0.0, 1.0) * w1 + sq1), 0.5 * (-cplx(0.0, 1.0) * w1 - sq1)};
    const std::array<cplx, 2> k2cand = {0.5 * (-cplx(0.0, 1.0) * w2 + sq2), 0.5 * (-cplx(0.0, 1.0) * w2 - sq2)};

    auto mismatch = [&](const cplx& a, const cplx& b) { return std::abs(a * a - b * b - spec.delta); };
    const double straight = mismatch(k1cand[0], k2cand[0]) + mismatch(k1cand[1], k2cand[1]);
    const double swapped = mismatch(k1cand[0], k2cand[1]) + mismatch(k1cand[1], k2cand[0]);

    CompletedRoots out;
    out.k1 = k1cand;
    out.k2 = (straight <= swapped) ? k2cand : std::array<cplx, 2>{k2cand[1], k2cand[0]};
    const double err = std::min(straight, swapped);
    if (err > 1e-8 * (1.0 + std::abs(spec.delta)))
        throw NumericError("pairing-failure",
                           "complete_roots: no threshold-consistent pairing of the remaining zeros");
    return out;
}

// Couplings realizing a bound state at k1 = i lambda_b alongside a prescribed
// resonance (lower branch). Eliminating the radicals from
// k1_3(beta) = i lambda_b gives a quadratic in beta^2; real solutions are
// filtered through the actual equation and the realizability bound.
inline std::vector<double> beta_for_bound_state(double e_r, double e_i, double delta, double lambda_b) {
    if (lambda_b == 0.0)
        throw NumericError("threshold-critical",
                           "beta_for_bound_state: lambda_b = 0 puts the bound state exactly at threshold");
    if (!(lambda_b > 0.0))
        throw ValidationError("bad-lambda", "beta_for_bound_state requires lambda_b > 0");
    const TwoChannelSpec base = resonance_momenta(e_r, e_i, delta, Branch::lower, 0.0, Branch::lower);
    const double k_r = base.k1[0].real();
    const double k_i = base.k1[0].imag();
    const double p_r = base.k2[0].real();
    const double bmin = std::sqrt(-k_r * p_r);

    // k1_3(beta) = i [ sqrt(a X - k_r^2) + sqrt(b X + k_i^2) ],  X = beta^2,
    // a = k_r/|p_r|, b = |p_r|/k_r.
    const double a = k_r / std::abs(p_r);
    const double b = std::abs(p_r) / k_r;
    const double t = lambda_b * lambda_b + k_i * k_i + k_r * k_r;
    const double qa = (b - a) * (b - a);
    const double qb = 2.0 * t * (b - a) - 4.0 * lambda_b * lambda_b * b;
    const double qc = t * t - 4.0 * lambda_b * lambda_b * k_i * k_i;

    std::vector<double> candidates;
    if (qa == 0.0) {
        if (qb != 0.0) candidates.push_back(-qc / qb);
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            candidates.push_back((-qb + root) / (2.0 * qa));
            candidates.push_back((-qb - root) / (2.0 * qa));
        }
    }

    std::vector<double> admissible;
    for (double x : candidates) {
        if (!(x > 0.0)) continue;
        const double beta = std::sqrt(x);
        if (beta + 1e-12 < bmin) continue;
        const double lhs = std::sqrt(std::max(a * x - k_r * k_r, 0.0)) + std::sqrt(b * x + k_i * k_i);
        if (std::abs(lhs - lambda_b) > 1e-8 * (1.0 + lambda_b)) continue;  // squaring artifact
        admissible.push_back(beta);
    }
    std::sort(admissible.begin(), admissible.end());
    if (admissible.empty())
        throw NumericError("no-admissible-beta",
                           "beta_for_bound_state: no real coupling satisfies the bound-state condition");
    return admissible;
}

// Builds the reconstructed two-channel model from an inversion.
inline ChannelModel make_two_channel_model(double delta, double beta, double alpha1, double alpha2,
                                           double kappa1) {
    ChannelModel m;
    m.n_channels = 2;
    m.thresholds = {0.0, delta};
    m.alpha = {alpha1, alpha2};
    m.beta = {{1, 0, beta}};
    m.factorization_energy = -kappa1 * kappa1;
    return m;
}

} // namespace coxspec
