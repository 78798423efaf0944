// Locating and classifying every zero of det B: root finding on the
// eliminated polynomial, Newton polish on the original (unsquared) system,
// classification into bound / virtual / resonance / cancelled / degenerate,
// the eigenvalue-sign bound-state count, and the per-sheet eigenvalue-curve
// scan used as an independent cross-check of the algebraic route.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "coxspec/elimination.hpp"
#include "coxspec/errors.hpp"
#include "coxspec/linalg.hpp"
#include "coxspec/model.hpp"
#include "coxspec/polynomial.hpp"

namespace coxspec {

enum class SpectralClass { bound, virtual_state, resonance_member, cancelled, degenerate };

inline const char* to_string(SpectralClass c) {
    switch (c) {
        case SpectralClass::bound: return "bound";
        case SpectralClass::virtual_state: return "virtual";
        case SpectralClass::resonance_member: return "resonance";
        case SpectralClass::cancelled: return "cancelled";
        case SpectralClass::degenerate: return "degenerate";
    }
    return "?";
}

struct SpectralPoint {
    Momenta momenta;
    cplx energy{};
    SpectralClass cls = SpectralClass::virtual_state;
    SheetSignature sheet;
    double residual = 0.0;                  // |det B| at the polished point
};

struct SpectrumTally {
    int n_bound = 0;
    int n_virtual = 0;
    int n_resonance_pairs = 0;
    int n_cancelled = 0;
    int n_degenerate = 0;
    int expected_total = 0;

    int counted_total() const {
        return n_bound + n_virtual + 2 * n_resonance_pairs + n_cancelled + n_degenerate;
    }
};

struct SpectrumResult {
    std::vector<SpectralPoint> points;
    SpectrumTally tally;
};

struct SpectrumTolerances {
    double aberth_rel = 1e-13;
    int aberth_max_iterations = 500;
    int polish_max_steps = 50;
    double polish_accept = 1e-11;           // on |det B| relative to the Hadamard bound
    double residual_detb = 1e-9;            // acceptance: |det B| < residual_detb * max|B_ij|
    double residual_threshold = 1e-10;      // acceptance: |k_j^2 - k1^2 + Delta_j| < tol * (1+|k1|^2)
    double imaginary_axis = 1e-8;           // |Re k1| < tol * (1+|k1|)  => purely imaginary
    double degenerate = 1e-6;               // momenta distance below which points count as one multiple zero
    double cancellation = 1e-9;             // |k_j + i kappa_j| < tol * (1+kappa_j) => cancelled in det F
    double resonance_pairing = 1e-6;        // conjugate-energy matching
    double basin = 0.05;                    // polish may move k1 at most basin*(1+|k1|);
                                            // larger moves mean Newton left the root's own
                                            // neighborhood and would steal another solution
};

namespace detail {

inline double hadamard_bound(const CMat& b) {
    double prod = 1.0;
    for (int i = 0; i < b.dim(); ++i) {
        double row = 0.0;
        for (int j = 0; j < b.dim(); ++j) row += std::norm(b(i, j));
        prod *= std::sqrt(row);
    }
    return prod;
}

struct PolishOutcome {
    Momenta momenta;
    double residual = 0.0;                  // |det B|
    double threshold_residual = 0.0;
    bool converged = false;
};

// Damped Newton iteration on the original system
//   f_1     = det B(k) = 0
//   f_j     = k_j^2 - k_1^2 + Delta_j = 0,   j = 2..N.
// The functions are holomorphic, so the complex Newton step is exactly the
// 2N-real-dimensional one. d det B / d k_j = -i * (principal minor at j).
inline PolishOutcome newton_polish(Momenta mom, const ChannelModel& m, const SpectrumTolerances& tol) {
    const int n = m.n_channels;
    PolishOutcome out;
    auto residuals = [&](const Momenta& q, std::vector<cplx>& f, double& det_scale) {
        const CMat b = b_matrix(q, m);
        det_scale = std::max(1.0, hadamard_bound(b));
        f[0] = lu_det(b);
        for (int j = 1; j < n; ++j)
            f[static_cast<size_t>(j)] =
                q.k[static_cast<size_t>(j)] * q.k[static_cast<size_t>(j)] - q.k[0] * q.k[0] +
                m.thresholds[static_cast<size_t>(j)];
    };
    auto norm_of = [&](const std::vector<cplx>& f) {
        double s = 0.0;
        for (const cplx& v : f) s += std::norm(v);
        return std::sqrt(s);
    };

    std::vector<cplx> f(static_cast<size_t>(n));
    double det_scale = 1.0;
    residuals(mom, f, det_scale);
    double fnorm = norm_of(f);

    for (int step = 0; step < tol.polish_max_steps; ++step) {
        const double thr_scale = 1.0 + std::norm(mom.k[0]);
        bool small = std::abs(f[0]) <= tol.polish_accept * det_scale;
        for (int j = 1; j < n; ++j)
            small = small && std::abs(f[static_cast<size_t>(j)]) <= tol.polish_accept * thr_scale;
        if (small) break;

        const CMat b = b_matrix(mom, m);
        CMat jac(n);
        for (int j = 0; j < n; ++j) jac(0, j) = cplx(0.0, -1.0) * principal_minor_det(b, 1u << j);
        for (int j = 1; j < n; ++j) {
            jac(j, 0) = -2.0 * mom.k[0];
            jac(j, j) = 2.0 * mom.k[static_cast<size_t>(j)];
        }
        std::vector<cplx> rhs(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) rhs[static_cast<size_t>(j)] = -f[static_cast<size_t>(j)];
        std::vector<cplx> dk;
        try {
            dk = lu_solve(jac, rhs);
        } catch (const NumericError&) {
            break;
        }

        double damp = 1.0;
        bool improved = false;
        for (int half = 0; half < 8 && !improved; ++half) {
            Momenta trial = mom;
            for (int j = 0; j < n; ++j) trial.k[static_cast<size_t>(j)] += damp * dk[static_cast<size_t>(j)];
            trial.energy = trial.k[0] * trial.k[0];
            std::vector<cplx> ft(static_cast<size_t>(n));
            double ds = 1.0;
            residuals(trial, ft, ds);
            const double fn = norm_of(ft);
            if (fn < fnorm) {
                mom = trial;
                f = ft;
                det_scale = ds;
                fnorm = fn;
                improved = true;
            }
            damp *= 0.5;
        }
        if (!improved) break;
    }

    out.momenta = mom;
    out.momenta.energy = mom.k[0] * mom.k[0];
    out.residual = std::abs(f[0]);
    out.threshold_residual = 0.0;
    for (int j = 1; j < n; ++j)
        out.threshold_residual = std::max(out.threshold_residual, std::abs(f[static_cast<size_t>(j)]));
    const CMat b = b_matrix(mom, m);
    out.converged = out.residual <= tol.residual_detb * std::max(b.max_abs(), 1e-30) &&
                    out.threshold_residual <= tol.residual_threshold * (1.0 + std::norm(mom.k[0]));
    return out;
}

inline double momenta_distance(const Momenta& a, const Momenta& b) {
    double d = 0.0;
    for (size_t j = 0; j < a.k.size(); ++j) d = std::max(d, std::abs(a.k[j] - b.k[j]));
    return d;
}

inline double momenta_scale(const Momenta& a) {
    double s = 1.0;
    for (const cplx& v : a.k) s = std::max(s, std::abs(v));
    return s;
}

} // namespace detail

// Number of bound states from the eigenvalue signs of B(0) = U0 + diag(sqrt(Delta_j)):
// n_b = (N - sum_j sign lambda_j(0)) / 2. An eigenvalue at zero means a state
// exactly at the lowest threshold and the count is ambiguous.
inline int count_bound_states(const ChannelModel& m, double critical_tol = 1e-9) {
    RMat b0 = m.u0();
    for (int j = 0; j < m.n_channels; ++j) b0(j, j) += std::sqrt(m.thresholds[static_cast<size_t>(j)]);
    const double scale = std::max(b0.max_abs(), 1.0);
    const std::vector<double> ev = jacobi_eigenvalues(b0);
    int sign_sum = 0;
    for (double v : ev) {
        if (std::abs(v) < critical_tol * scale)
            throw NumericError("threshold-critical", "count_bound_states: eigenvalue of B(0) at zero");
        sign_sum += (v > 0.0) ? 1 : -1;
    }
    return (m.n_channels - sign_sum) / 2;
}

struct EigenCurve {
    SheetSignature sheet;
    std::vector<double> grid;                      // k1bar samples, strictly increasing
    std::vector<std::vector<double>> eigenvalues;  // per sample, ascending
    struct Crossing {
        int trace = 0;                             // index of the sorted eigenvalue trace
        double k1bar = 0.0;
    };
    std::vector<Crossing> crossings;
};

// B^sigma(k1bar) = U0 + diag(k1bar, sign_j sqrt(k1bar^2 + Delta_j)): real
// symmetric on the imaginary momentum axis. Zero crossings of the sorted
// eigenvalue traces are located by sign change and refined by bisection.
inline EigenCurve eigenvalue_curves(const ChannelModel& m, const SheetSignature& sheet,
                                    const std::vector<double>& grid) {
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ValidationError("bad-grid", "eigenvalue_curves: grid must be strictly increasing");

    auto bsigma_eigen = [&](double k1bar) {
        RMat b = m.u0();
        b(0, 0) += k1bar;
        for (int j = 1; j < m.n_channels; ++j)
            b(j, j) += sheet.signs[static_cast<size_t>(j)] *
                       std::sqrt(k1bar * k1bar + m.thresholds[static_cast<size_t>(j)]);
        return jacobi_eigenvalues(b);
    };

    EigenCurve out;
    out.sheet = sheet;
    out.grid = grid;
    out.eigenvalues.reserve(grid.size());
    for (double x : grid) out.eigenvalues.push_back(bsigma_eigen(x));

    for (int trace = 0; trace < m.n_channels; ++trace) {
        for (size_t i = 1; i < grid.size(); ++i) {
            const double fa = out.eigenvalues[i - 1][static_cast<size_t>(trace)];
            const double fb = out.eigenvalues[i][static_cast<size_t>(trace)];
            if (fa == 0.0) {
                out.crossings.push_back({trace, grid[i - 1]});
                continue;
            }
            if (fa * fb >= 0.0) continue;
            double lo = grid[i - 1], hi = grid[i];
            double flo = fa;
            while (hi - lo > 1e-10 * (1.0 + std::abs(lo))) {
                const double mid = 0.5 * (lo + hi);
                const double fm = bsigma_eigen(mid)[static_cast<size_t>(trace)];
                if (fm == 0.0) { lo = hi = mid; break; }
                if ((flo < 0.0) == (fm < 0.0)) { lo = mid; flo = fm; }
                else hi = mid;
            }
            out.crossings.push_back({trace, 0.5 * (lo + hi)});
        }
    }
    std::sort(out.crossings.begin(), out.crossings.end(),
              [](const EigenCurve::Crossing& a, const EigenCurve::Crossing& b) {
                  return a.k1bar < b.k1bar || (a.k1bar == b.k1bar && a.trace < b.trace);
              });
    return out;
}

// Classifies polished zeros. Degeneracy (momenta vectors closer than the
// tolerance) takes precedence, then cancellation against det(Kcal - iK),
// then the imaginary-axis split into bound/virtual; everything else is a
// resonance member and must have a conjugate-energy partner.
inline std::vector<SpectralPoint> classify(const std::vector<SpectralPoint>& raw, const ChannelModel& m,
                                           const SpectrumTolerances& tol = {}) {
    std::vector<SpectralPoint> pts = raw;
    const size_t n = pts.size();

    std::vector<bool> degenerate(n, false);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b) {
            const double scale = std::max(detail::momenta_scale(pts[a].momenta), detail::momenta_scale(pts[b].momenta));
            if (detail::momenta_distance(pts[a].momenta, pts[b].momenta) < tol.degenerate * scale)
                degenerate[a] = degenerate[b] = true;
        }

    for (size_t i = 0; i < n; ++i) {
        SpectralPoint& p = pts[i];
        p.energy = p.momenta.k[0] * p.momenta.k[0];
        p.sheet = sheet_from_momenta(p.momenta, m);
        if (degenerate[i]) {
            p.cls = SpectralClass::degenerate;
            continue;
        }
        bool cancelled = false;
        for (int j = 0; j < m.n_channels; ++j) {
            const double kap = m.kappa(j);
            if (std::abs(p.momenta.k[static_cast<size_t>(j)] + cplx(0.0, 1.0) * kap) <
                tol.cancellation * (1.0 + kap))
                cancelled = true;
        }
        if (cancelled) {
            p.cls = SpectralClass::cancelled;
            continue;
        }
        const cplx k1 = p.momenta.k[0];
        if (std::abs(k1.real()) < tol.imaginary_axis * (1.0 + std::abs(k1))) {
            bool all_upper = true;
            for (const cplx& kj : p.momenta.k) all_upper = all_upper && kj.imag() > 0.0;
            p.cls = all_upper ? SpectralClass::bound : SpectralClass::virtual_state;
        } else {
            p.cls = SpectralClass::resonance_member;
        }
    }

    // resonance members pair up through complex-conjugate energies; a partner
    // that ended up flagged degenerate (or cancelled) still satisfies the
    // pairing, only a genuinely missing conjugate signals root-finder failure
    std::vector<bool> paired(n, false);
    for (size_t a = 0; a < n; ++a) {
        if (pts[a].cls != SpectralClass::resonance_member || paired[a]) continue;
        std::optional<size_t> partner;
        double best = 0.0;
        for (size_t b = 0; b < n; ++b) {
            if (b == a || pts[b].cls != SpectralClass::resonance_member || paired[b]) continue;
            const double d = std::abs(pts[b].energy - std::conj(pts[a].energy));
            if (d <= tol.resonance_pairing * (1.0 + std::abs(pts[a].energy)) && (!partner || d < best)) {
                partner = b;
                best = d;
            }
        }
        if (partner) {
            paired[a] = paired[*partner] = true;
            continue;
        }
        bool conjugate_elsewhere = false;
        for (size_t b = 0; b < n && !conjugate_elsewhere; ++b)
            if (b != a && std::abs(pts[b].energy - std::conj(pts[a].energy)) <=
                              tol.resonance_pairing * (1.0 + std::abs(pts[a].energy)))
                conjugate_elsewhere = true;
        if (!conjugate_elsewhere)
            throw NumericError("unpaired-complex-zero",
                               "classify: complex zero without conjugate partner");
        pts[a].cls = SpectralClass::degenerate;
    }

    std::sort(pts.begin(), pts.end(), [](const SpectralPoint& a, const SpectralPoint& b) {
        if (a.cls != b.cls) return static_cast<int>(a.cls) < static_cast<int>(b.cls);
        if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
        if (a.energy.imag() != b.energy.imag()) return a.energy.imag() < b.energy.imag();
        return a.momenta.k[0].imag() < b.momenta.k[0].imag();
    });
    return pts;
}

inline SpectrumTally tally_points(const std::vector<SpectralPoint>& pts, const ChannelModel& m) {
    SpectrumTally t;
    t.expected_total = m.n_channels * (1 << (m.n_channels - 1));
    int resonance_members = 0;
    for (const SpectralPoint& p : pts) {
        switch (p.cls) {
            case SpectralClass::bound: ++t.n_bound; break;
            case SpectralClass::virtual_state: ++t.n_virtual; break;
            case SpectralClass::resonance_member: ++resonance_members; break;
            case SpectralClass::cancelled: ++t.n_cancelled; break;
            case SpectralClass::degenerate: ++t.n_degenerate; break;
        }
    }
    t.n_resonance_pairs = resonance_members / 2;
    return t;
}

// The full pipeline: build det B -> eliminate -> Aberth on P_N -> Newton
// polish on the original system -> classify.
//
// The squaring steps of the elimination amplify coefficient rounding, so on
// models with clustered zeros the Aberth approximations can be fuzzy at the
// cluster scale (and the back-substitution divisors can vanish outright when
// several sheet solutions share one k1). Robustness therefore comes from a
// two-phase scheme: first every chain back-substitution and every per-sheet
// start is polished into a deduplicated pool of verified solutions of the
// original system, then each polynomial root claims its nearest pool
// solution, preferring unclaimed ones. Exactly one point is emitted per
// root, so the output always carries N 2^(N-1) points; roots that end up on
// an already-claimed solution are genuine multiple zeros and get flagged
// degenerate by classification.
inline SpectrumResult solve_spectrum(const ChannelModel& m, const SpectrumTolerances& tol = {}) {
    // beyond ~6 channels the squared elimination loses accuracy fast; at 10
    // channels P_N has degree 5120 and double precision is spent
    if (m.n_channels > 10)
        throw ValidationError("channel-cap", "solve_spectrum supports at most 10 channels");
    const MultilinearPoly detb = build_detb_poly(m);
    const SubstitutionChain chain = eliminate(detb, m);

    AberthOptions aopts;
    aopts.max_iterations = tol.aberth_max_iterations;
    aopts.rel_tolerance = tol.aberth_rel;
    const std::vector<cplx> roots = aberth_roots(chain.p_final, aopts);

    const std::vector<SheetSignature> sheets = SheetSignature::enumerate(m.n_channels);

    struct Candidate {
        Momenta momenta;
        double residual = 0.0;
        bool claimed = false;
    };
    std::vector<Candidate> pool;

    auto offer = [&](const detail::PolishOutcome& po) {
        if (!po.converged) return;
        for (const Candidate& c : pool) {
            const double scale = std::max(detail::momenta_scale(c.momenta), detail::momenta_scale(po.momenta));
            if (detail::momenta_distance(c.momenta, po.momenta) < 1e-7 * scale) return;
        }
        pool.push_back({po.momenta, po.residual, false});
    };

    // chain starts carry the most accurate per-root information
    std::vector<std::optional<Momenta>> chain_start(roots.size());
    for (size_t i = 0; i < roots.size(); ++i) {
        try {
            const Momenta guess = back_substitute(roots[i], chain, m);
            chain_start[i] = guess;
            offer(detail::newton_polish(guess, m, tol));
        } catch (const NumericError&) {
            // chain breakdown at a shared-k1 cluster; sheet starts cover it
        }
    }
    for (const cplx& r : roots)
        for (const SheetSignature& sheet : sheets)
            offer(detail::newton_polish(momenta_from_k1(r, sheet, m), m, tol));

    // each root claims its nearest pool solution, free ones first
    std::vector<SpectralPoint> accepted;
    for (size_t i = 0; i < roots.size(); ++i) {
        const cplx r = roots[i];
        const double radius = 5.0 * tol.basin * (1.0 + std::abs(r));
        int best_free = -1, best_any = -1;
        double dist_free = 0.0, dist_any = 0.0;
        for (size_t c = 0; c < pool.size(); ++c) {
            const double d = std::abs(pool[c].momenta.k[0] - r);
            if (d > radius) continue;
            if (best_any < 0 || d < dist_any) { best_any = static_cast<int>(c); dist_any = d; }
            if (!pool[c].claimed && (best_free < 0 || d < dist_free)) {
                best_free = static_cast<int>(c);
                dist_free = d;
            }
        }
        SpectralPoint p;
        if (best_free >= 0) {
            pool[static_cast<size_t>(best_free)].claimed = true;
            p.momenta = pool[static_cast<size_t>(best_free)].momenta;
            p.residual = pool[static_cast<size_t>(best_free)].residual;
        } else if (best_any >= 0) {
            // all reachable solutions taken: a multiple zero
            p.momenta = pool[static_cast<size_t>(best_any)].momenta;
            p.residual = pool[static_cast<size_t>(best_any)].residual;
        } else if (chain_start[i]) {
            // nothing converged here; report the raw back-substituted point
            p.momenta = *chain_start[i];
            p.residual = std::abs(lu_det(b_matrix(p.momenta, m)));
        } else {
            double best_res = 0.0;
            bool have = false;
            for (const SheetSignature& sheet : sheets) {
                const Momenta guess = momenta_from_k1(r, sheet, m);
                const double res = std::abs(lu_det(b_matrix(guess, m)));
                if (!have || res < best_res) {
                    p.momenta = guess;
                    best_res = res;
                    have = true;
                }
            }
            p.residual = best_res;
        }
        accepted.push_back(p);
    }

    SpectrumResult result;
    result.points = classify(accepted, m, tol);
    result.tally = tally_points(result.points, m);
    return result;
}

} // namespace coxspec
