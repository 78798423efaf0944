// S-matrix, open-channel phase shift, and partial cross section on the real
// energy axis, from the Jost matrix.
//
// With physical momenta (k_j real positive when open, +i sqrt(Delta_j - E)
// when closed) the open-channel S-matrix used here is
//   S = K_o^{-1/2} [ F(-k) F(k)^{-1} ]_oo K_o^{+1/2},
// where -k negates open momenta and conjugates closed ones. This reduces to
// the single-channel S = F(-k)/F(k) and is unitary and symmetric for this
// potential family; it was cross-checked against direct integration of the
// radial equation.
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "coxspec/errors.hpp"
#include "coxspec/linalg.hpp"
#include "coxspec/model.hpp"

namespace coxspec {

struct ObservableSample {
    double energy = 0.0;
    int open_count = 0;
    CMat s;                                 // open x open block
    double delta1 = 0.0;                    // channel-1 phase shift (radians, unwrapped by the sweep)
    double sigma11 = 0.0;                   // partial cross section, 4pi/k1^2 * |1 - S11|^2 / 4
    bool valid = true;
    std::string error;
};

inline ObservableSample s_matrix(double energy, const ChannelModel& m, double threshold_tol = 1e-8) {
    if (!(energy > 0.0)) throw ValidationError("bad-energy", "s_matrix: energy must be positive");
    const int n = m.n_channels;
    for (int j = 0; j < n; ++j)
        if (std::abs(energy - m.thresholds[static_cast<size_t>(j)]) < threshold_tol * (1.0 + std::abs(energy)))
            throw NumericError("threshold-proximity", "s_matrix: energy too close to a channel threshold");

    Momenta km, kminus;
    km.energy = energy;
    kminus.energy = energy;
    km.k.resize(static_cast<size_t>(n));
    kminus.k.resize(static_cast<size_t>(n));
    std::vector<int> open;
    for (int j = 0; j < n; ++j) {
        const double d = m.thresholds[static_cast<size_t>(j)];
        if (energy > d) {
            const double k = std::sqrt(energy - d);
            km.k[static_cast<size_t>(j)] = k;
            kminus.k[static_cast<size_t>(j)] = -k;
            open.push_back(j);
        } else {
            const cplx k(0.0, std::sqrt(d - energy));
            km.k[static_cast<size_t>(j)] = k;
            kminus.k[static_cast<size_t>(j)] = std::conj(k);
        }
    }

    const CMat f = jost_matrix(km, m);
    const CMat fm = jost_matrix(kminus, m);
    CMat finv;
    try {
        finv = lu_inverse(f);
    } catch (const NumericError&) {
        throw NumericError("jost-singular", "s_matrix: Jost matrix singular at real energy");
    }
    const CMat prod = fm * finv;

    const int no = static_cast<int>(open.size());
    ObservableSample out;
    out.energy = energy;
    out.open_count = no;
    out.s = CMat(no);
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b) {
            const double ka = km.k[static_cast<size_t>(open[static_cast<size_t>(a)])].real();
            const double kb = km.k[static_cast<size_t>(open[static_cast<size_t>(b)])].real();
            out.s(a, b) = prod(open[static_cast<size_t>(a)], open[static_cast<size_t>(b)]) * std::sqrt(kb / ka);
        }

    if (no > 0 && open.front() == 0) {
        const double k1 = km.k[0].real();
        const cplx s11 = out.s(0, 0);
        out.delta1 = 0.5 * std::arg(s11);
        out.sigma11 = 4.0 * std::numbers::pi / (k1 * k1) * 0.25 * std::norm(1.0 - s11);
    }
    return out;
}

// Energy sweep with continuous phase unwrapping: the first sample is pinned
// to the principal value in (-pi/2, pi/2], later samples follow the nearest
// branch. Per-sample failures are recorded and the sweep continues.
inline std::vector<ObservableSample> observable_sweep(const std::vector<double>& energies,
                                                      const ChannelModel& m,
                                                      double threshold_tol = 1e-8) {
    for (size_t i = 1; i < energies.size(); ++i)
        if (!(energies[i] > energies[i - 1]))
            throw ValidationError("bad-grid", "observable_sweep: energy grid must be strictly increasing");

    std::vector<ObservableSample> out;
    out.reserve(energies.size());
    bool have_prev = false;
    double prev = 0.0;
    for (double e : energies) {
        ObservableSample s;
        try {
            s = s_matrix(e, m, threshold_tol);
        } catch (const Error& err) {
            s.energy = e;
            s.valid = false;
            s.error = err.code();
            out.push_back(s);
            continue;
        }
        if (have_prev) {
            while (s.delta1 - prev > 0.5 * std::numbers::pi) s.delta1 -= std::numbers::pi;
            while (s.delta1 - prev < -0.5 * std::numbers::pi) s.delta1 += std::numbers::pi;
        }
        prev = s.delta1;
        have_prev = true;
        out.push_back(s);
    }
    return out;
}

} // namespace coxspec
