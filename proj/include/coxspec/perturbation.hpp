// Weak-coupling approximation of the det B zeros: exact decoupled roots at
// beta = 0 and second-order-in-beta corrected roots for every level and
// sheet.
//
// Each level j anchors its own sheet string (sign_j = +). All momenta are
// built in the imaginary-axis picture k_m = i kbar_m with
//   kbar_m = sign_m sqrt(kbar_j^2 + Delta_m - Delta_j),   kbar_j = -alpha_j,
// because that is the picture in which the eigenvalue curves
// lambda_l = alpha_l + sign_l sqrt(kbar_j^2 + Delta_l - Delta_j) and hence
// the correction denominators are defined. (For a companion channel that is
// open at the level energy the radicand is negative and kbar_m comes out
// imaginary; labelling such roots by the sign of the real momentum instead
// would flip the sheet association and with it the sign of the width the
// root acquires, which is how the labelling was pinned down against the
// exact solver.) The first-order correction vanishes (the coupling has zero
// diagonal); the second-order coefficient is
//   c2 = sum_{l != j} b_jl^2 / (alpha_l + sign_l sqrt(alpha_j^2 + Delta_l - Delta_j)),
// and companion square roots are Taylor-expanded consistently to beta^2.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "coxspec/errors.hpp"
#include "coxspec/model.hpp"

namespace coxspec {

struct CouplingSplit {
    double beta = 0.0;                      // overall small parameter
    RMat b;                                 // symmetric shape, zero diagonal

    // Splits a coupled model into beta * b with beta = max |beta_jl|.
    static CouplingSplit from_model(const ChannelModel& m) {
        CouplingSplit s;
        s.b = RMat(m.n_channels);
        for (const auto& c : m.beta) s.beta = std::max(s.beta, std::abs(c.value));
        if (s.beta > 0.0)
            for (const auto& c : m.beta) {
                s.b(c.j, c.l) = c.value / s.beta;
                s.b(c.l, c.j) = c.value / s.beta;
            }
        return s;
    }
};

struct PerturbedRoot {
    int level = 0;                          // 0-based channel whose decoupled momentum is -i alpha
    SheetSignature sheet;                   // anchored at `level`
    SheetSignature sheet_channel1;          // same root re-anchored at channel 1 for comparisons
    Momenta momenta;
    bool zero_width_resonance = false;      // decoupled energy above the first threshold
};

namespace detail {

inline SheetSignature reanchor_to_channel1(const Momenta& mom, const ChannelModel& m) {
    return sheet_from_momenta(mom, m);
}

} // namespace detail

// Exact zeros of the decoupled (beta = 0) system: N levels, each 2^(N-1)
// fold degenerate in energy E_j = -alpha_j^2 + Delta_j.
inline std::vector<PerturbedRoot> decoupled_roots(const ChannelModel& m) {
    for (const auto& c : m.beta)
        if (c.value != 0.0)
            throw ValidationError("not-decoupled", "decoupled_roots: model has nonzero coupling");
    std::vector<PerturbedRoot> out;
    for (int level = 0; level < m.n_channels; ++level) {
        const double aj = m.alpha[static_cast<size_t>(level)];
        const double dj = m.thresholds[static_cast<size_t>(level)];
        const bool zwr = (-aj * aj + dj) > 0.0;
        for (const SheetSignature& sheet : SheetSignature::enumerate(m.n_channels, level)) {
            PerturbedRoot r;
            r.level = level;
            r.sheet = sheet;
            r.zero_width_resonance = zwr;
            r.momenta.k.assign(static_cast<size_t>(m.n_channels), cplx{});
            r.momenta.k[static_cast<size_t>(level)] = cplx(0.0, -aj);
            for (int ch = 0; ch < m.n_channels; ++ch) {
                if (ch == level) continue;
                const cplx kbar = std::sqrt(cplx(aj * aj + m.thresholds[static_cast<size_t>(ch)] - dj, 0.0));
                r.momenta.k[static_cast<size_t>(ch)] =
                    static_cast<double>(sheet.signs[static_cast<size_t>(ch)]) * cplx(0.0, 1.0) * kbar;
            }
            r.momenta.energy = r.momenta.k[0] * r.momenta.k[0];
            r.sheet_channel1 = detail::reanchor_to_channel1(r.momenta, m);
            out.push_back(std::move(r));
        }
    }
    return out;
}

// Roots corrected to second order in beta. The model supplies alpha and the
// thresholds; the coupling enters only through the split. Near-vanishing
// correction denominators invalidate the expansion and are reported.
inline std::vector<PerturbedRoot> perturbed_roots(const ChannelModel& m, const CouplingSplit& split,
                                                  double denominator_tol = 1e-6) {
    const int n = m.n_channels;
    std::vector<PerturbedRoot> out;
    for (int level = 0; level < n; ++level) {
        const double aj = m.alpha[static_cast<size_t>(level)];
        const double dj = m.thresholds[static_cast<size_t>(level)];
        const bool zwr = (-aj * aj + dj) > 0.0;
        for (const SheetSignature& sheet : SheetSignature::enumerate(n, level)) {
            cplx c2 = 0.0;
            for (int l = 0; l < n; ++l) {
                if (l == level) continue;
                const double al = m.alpha[static_cast<size_t>(l)];
                const cplx root = std::sqrt(cplx(aj * aj + m.thresholds[static_cast<size_t>(l)] - dj, 0.0));
                const cplx denom = al + static_cast<double>(sheet.signs[static_cast<size_t>(l)]) * root;
                if (std::abs(denom) < denominator_tol * (1.0 + std::abs(al)))
                    throw NumericError("near-degenerate-denominator",
                                       "perturbed_roots: second-order formula invalid");
                c2 += split.b(level, l) * split.b(level, l) / denom;
            }
            const cplx correction = cplx(0.0, 1.0) * split.beta * split.beta * c2;

            PerturbedRoot r;
            r.level = level;
            r.sheet = sheet;
            r.zero_width_resonance = zwr;
            r.momenta.k.assign(static_cast<size_t>(n), cplx{});
            r.momenta.k[static_cast<size_t>(level)] = cplx(0.0, -aj) + correction;
            for (int ch = 0; ch < n; ++ch) {
                if (ch == level) continue;
                const cplx s = std::sqrt(cplx(aj * aj + m.thresholds[static_cast<size_t>(ch)] - dj, 0.0));
                if (std::abs(s) < 1e-8 * (1.0 + std::abs(aj)))
                    throw NumericError("near-degenerate-denominator",
                                       "perturbed_roots: companion momentum at threshold");
                // kbar_ch = sign sqrt(kbar_level^2 + Delta_ch - Delta_level) expanded to O(beta^2)
                const cplx expanded = s - aj * split.beta * split.beta * c2 / s;
                r.momenta.k[static_cast<size_t>(ch)] =
                    static_cast<double>(sheet.signs[static_cast<size_t>(ch)]) * cplx(0.0, 1.0) * expanded;
            }
            r.momenta.energy = r.momenta.k[0] * r.momenta.k[0];
            r.sheet_channel1 = detail::reanchor_to_channel1(r.momenta, m);
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace coxspec
