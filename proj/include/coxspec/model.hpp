// Channel-model parameters, sheet signatures, momenta kinematics, and the
// B / Jost matrix evaluators.
//
// Conventions used throughout the library:
//   * channel indices are 0-based in code; channel 0 is the one with
//     threshold 0 (the paper-style "first" channel);
//   * all complex square roots are principal-branch; Riemann sheets are
//     selected exclusively by explicit sign factors, never by branch hopping;
//   * kappa_j = sqrt(Delta_j - E_fac) is derived from the factorization
//     energy on demand, so threshold edits cannot desynchronize it.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "coxspec/errors.hpp"
#include "coxspec/linalg.hpp"

namespace coxspec {

struct ChannelModel {
    int n_channels = 0;
    std::vector<double> thresholds;         // Delta_1..Delta_N, Delta_1 = 0
    std::vector<double> alpha;              // diagonal of U0
    struct Coupling {
        int j = 0, l = 0;                   // j > l, 0-based
        double value = 0.0;
    };
    std::vector<Coupling> beta;             // strictly lower triangle of U0
    double factorization_energy = -1.0;     // E_fac < 0

    double kappa(int j) const { return std::sqrt(thresholds[static_cast<size_t>(j)] - factorization_energy); }

    std::vector<double> kappas() const {
        std::vector<double> k(static_cast<size_t>(n_channels));
        for (int j = 0; j < n_channels; ++j) k[static_cast<size_t>(j)] = kappa(j);
        return k;
    }

    RMat u0() const {
        RMat m(n_channels);
        for (int j = 0; j < n_channels; ++j) m(j, j) = alpha[static_cast<size_t>(j)];
        for (const Coupling& c : beta) {
            m(c.j, c.l) = c.value;
            m(c.l, c.j) = c.value;
        }
        return m;
    }

    double beta_value(int j, int l) const {
        for (const Coupling& c : beta)
            if ((c.j == j && c.l == l) || (c.j == l && c.l == j)) return c.value;
        return 0.0;
    }
};

// A string of N signs choosing the Riemann sheet of each momentum relative
// to the anchor channel, whose sign is fixed to +.
struct SheetSignature {
    int anchor = 0;
    std::vector<int> signs;                 // entries +1 / -1, signs[anchor] = +1

    static SheetSignature from_index(int n_channels, unsigned index, int anchor = 0) {
        SheetSignature s;
        s.anchor = anchor;
        s.signs.assign(static_cast<size_t>(n_channels), +1);
        unsigned bit = 0;
        for (int j = 0; j < n_channels; ++j) {
            if (j == anchor) continue;
            if (index & (1u << bit)) s.signs[static_cast<size_t>(j)] = -1;
            ++bit;
        }
        return s;
    }

    static std::vector<SheetSignature> enumerate(int n_channels, int anchor = 0) {
        std::vector<SheetSignature> all;
        const unsigned count = 1u << (n_channels - 1);
        all.reserve(count);
        for (unsigned idx = 0; idx < count; ++idx) all.push_back(from_index(n_channels, idx, anchor));
        return all;
    }

    int n_plus() const {
        int c = 0;
        for (size_t j = 0; j < signs.size(); ++j)
            if (static_cast<int>(j) != anchor && signs[j] > 0) ++c;
        return c;
    }

    int n_minus() const { return static_cast<int>(signs.size()) - 1 - n_plus(); }

    std::string str() const {
        std::string s;
        for (int v : signs) s += (v > 0 ? '+' : '-');
        return s;
    }

    static SheetSignature parse(const std::string& text, int anchor = 0) {
        SheetSignature s;
        s.anchor = anchor;
        for (char ch : text) {
            if (ch == '+') s.signs.push_back(+1);
            else if (ch == '-') s.signs.push_back(-1);
            else throw ValidationError("bad-sheet", "sheet string must contain only '+'/'-'");
        }
        if (s.signs.empty() || s.signs[static_cast<size_t>(anchor)] != +1)
            throw ValidationError("bad-sheet", "sheet anchor entry must be '+'");
        return s;
    }
};

struct Momenta {
    std::vector<cplx> k;
    cplx energy{};
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(const std::string& msg) {
        ok = false;
        violations.push_back(msg);
    }
};

// Checks the model assumptions: distinct thresholds anchored at zero,
// factorization energy below every threshold, and positive definiteness of
// Kcal + U0 (the no-singularity condition on the potential). Violations are
// reported, never thrown; callers decide.
inline ValidationReport validate(const ChannelModel& m) {
    ValidationReport rep;
    const int n = m.n_channels;
    if (n < 1) {
        rep.fail("n_channels must be >= 1");
        return rep;
    }
    if (m.thresholds.size() != static_cast<size_t>(n) || m.alpha.size() != static_cast<size_t>(n)) {
        rep.fail("thresholds/alpha size does not match n_channels");
        return rep;
    }
    if (std::abs(m.thresholds[0]) > 1e-14) rep.fail("first threshold must be 0");
    for (int j = 1; j < n; ++j)
        if (m.thresholds[static_cast<size_t>(j)] < 0.0) rep.fail("thresholds must not lie below channel 1");
    for (int j = 0; j < n; ++j)
        for (int l = j + 1; l < n; ++l)
            if (std::abs(m.thresholds[static_cast<size_t>(j)] - m.thresholds[static_cast<size_t>(l)]) <= 1e-12)
                rep.fail("thresholds not distinct");
    for (const auto& c : m.beta)
        if (c.j <= c.l || c.j >= n || c.l < 0) rep.fail("coupling entries must have n > j > l >= 0");
    if (!(m.factorization_energy < 0.0)) rep.fail("factorization energy must be below the lowest threshold");

    if (rep.ok) {
        RMat g = m.u0();
        for (int j = 0; j < n; ++j) g(j, j) += m.kappa(j);
        const std::vector<double> ev = jacobi_eigenvalues(g);
        if (ev.front() <= 0.0) rep.fail("Kcal + U0 not positive definite");
    }
    return rep;
}

// Momenta on a given sheet as functions of k1: k_j = sign_j sqrt(k1^2 - Delta_j)
// with the principal square root; energy = k1^2.
inline Momenta momenta_from_k1(cplx k1, const SheetSignature& sheet, const ChannelModel& m) {
    if (sheet.anchor != 0)
        throw ValidationError("bad-sheet", "momenta_from_k1 requires a channel-1 anchored sheet");
    Momenta out;
    out.energy = k1 * k1;
    out.k.resize(static_cast<size_t>(m.n_channels));
    out.k[0] = k1;
    for (int j = 1; j < m.n_channels; ++j)
        out.k[static_cast<size_t>(j)] =
            static_cast<double>(sheet.signs[static_cast<size_t>(j)]) *
            std::sqrt(out.energy - m.thresholds[static_cast<size_t>(j)]);
    return out;
}

// Recovers the channel-1 anchored sheet of an arbitrary momenta vector by
// comparing each k_j with the principal square root of k1^2 - Delta_j.
// Imaginary-axis points sit exactly on the branch cut, where rounding noise
// in Im(k1^2) would flip the comparison; the energy is therefore snapped to
// the real axis first, which reduces the rule to sign(Im k_j) there.
inline SheetSignature sheet_from_momenta(const Momenta& mom, const ChannelModel& m,
                                         double imag_axis_tol = 1e-8) {
    SheetSignature s;
    s.anchor = 0;
    s.signs.assign(static_cast<size_t>(m.n_channels), +1);
    const cplx k1 = mom.k[0];
    cplx e = k1 * k1;
    if (std::abs(k1.real()) < imag_axis_tol * (1.0 + std::abs(k1))) e = cplx(-k1.imag() * k1.imag(), 0.0);
    for (int j = 1; j < m.n_channels; ++j) {
        const cplx p = std::sqrt(e - m.thresholds[static_cast<size_t>(j)]);
        const cplx kj = mom.k[static_cast<size_t>(j)];
        s.signs[static_cast<size_t>(j)] = (std::abs(kj - p) <= std::abs(kj + p)) ? +1 : -1;
    }
    return s;
}

inline CMat b_matrix(const Momenta& mom, const ChannelModel& m) {
    CMat b = to_complex(m.u0());
    for (int j = 0; j < m.n_channels; ++j) b(j, j) -= cplx(0.0, 1.0) * mom.k[static_cast<size_t>(j)];
    return b;
}

// F(k) = (Kcal - iK)^{-1} (U0 - iK). The diagonal prefactor is singular when
// some k_j = -i kappa_j; within tolerance of that point the B-matrix zero may
// be cancelled in det F, so the evaluation refuses rather than guessing.
inline CMat jost_matrix(const Momenta& mom, const ChannelModel& m, double cancel_tol = 1e-9) {
    CMat f = b_matrix(mom, m);
    for (int j = 0; j < m.n_channels; ++j) {
        const double kap = m.kappa(j);
        const cplx pref = kap - cplx(0.0, 1.0) * mom.k[static_cast<size_t>(j)];
        if (std::abs(pref) < cancel_tol * (1.0 + kap))
            throw NumericError("cancellation-pole",
                               "jost_matrix: k_j = -i kappa_j within tolerance (channel " + std::to_string(j + 1) + ")");
        for (int col = 0; col < m.n_channels; ++col) f(j, col) /= pref;
    }
    return f;
}

} // namespace coxspec
