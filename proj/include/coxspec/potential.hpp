// The factorization solution, superpotential, and transformed potential on a
// radial grid, evaluated in large-r-stable scaled form.
//
// With eta(r) = cosh(Kcal r) + Kcal^{-1} sinh(Kcal r) U0 written as
// eta = e^{Kcal r} A(r),
//   A(r) = (1 + e^{-2 Kcal r})/2 + Kcal^{-1} (1 - e^{-2 Kcal r}) U0 / 2,
// the superpotential eta' eta^{-1} collapses entrywise to
//   U(r)_ij = Kcal_ij - [(Kcal - U0) A(r)^{-1}]_ij e^{-(kappa_i + kappa_j) r},
// which is exact, free of growing exponentials, and reproduces U(0) = U0
// without cancellation. The potential uses the identity U' = Kcal^2 - U^2
// (eta'' = Kcal^2 eta), so no numerical differentiation appears anywhere:
//   V(r) = 2 (U^2 - Kcal^2) = 2 (X^2 - Kcal X - X Kcal),  X = Kcal - U.
#pragma once

#include <cmath>
#include <vector>

#include "coxspec/errors.hpp"
#include "coxspec/linalg.hpp"
#include "coxspec/model.hpp"

namespace coxspec {

struct PotentialSample {
    double r = 0.0;
    RMat v;                                 // N x N real symmetric potential value
    double asymmetry = 0.0;                 // max |v_ij - v_ji| before symmetrization
};

struct ScaledFactorization {
    RMat a;                                 // eta(r) = exp(Kcal r) * a
    std::vector<double> exponents;          // kappa_j * r, the diagonal scale
};

inline ScaledFactorization factorization_solution_scaled(double r, const ChannelModel& m) {
    const int n = m.n_channels;
    ScaledFactorization out;
    out.a = RMat(n);
    out.exponents.resize(static_cast<size_t>(n));
    const RMat u0 = m.u0();
    for (int i = 0; i < n; ++i) {
        const double kap = m.kappa(i);
        out.exponents[static_cast<size_t>(i)] = kap * r;
        const double e2 = std::exp(-2.0 * kap * r);
        out.a(i, i) += 0.5 * (1.0 + e2);
        for (int j = 0; j < n; ++j) out.a(i, j) += 0.5 / kap * (1.0 - e2) * u0(i, j);
    }
    return out;
}

namespace potential_detail {

// X(r) = Kcal - U(r) = [(Kcal - U0) A^{-1}]_ij e^{-(kappa_i+kappa_j) r}
inline RMat decay_part(double r, const ChannelModel& m) {
    const int n = m.n_channels;
    const ScaledFactorization fac = factorization_solution_scaled(r, m);
    double hadamard = 1.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += fac.a(i, j) * fac.a(i, j);
        hadamard *= std::sqrt(row);
    }
    const double det_a = lu_det(fac.a);
    if (std::abs(det_a) < 1e-12 * std::max(hadamard, 1e-300))
        throw NumericError("singular-factorization-solution",
                           "factorization solution singular: model violates regularity");
    RMat w(n);
    const RMat u0 = m.u0();
    for (int i = 0; i < n; ++i) {
        w(i, i) = m.kappa(i);
        for (int j = 0; j < n; ++j) w(i, j) -= u0(i, j);
    }
    w = w * lu_inverse(fac.a);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) *= std::exp(-(m.kappa(i) + m.kappa(j)) * r);
    return w;
}

} // namespace potential_detail

inline RMat superpotential(double r, const ChannelModel& m) {
    if (r < 0.0) throw ValidationError("bad-radius", "superpotential: r must be nonnegative");
    RMat u = potential_detail::decay_part(r, m);
    for (int i = 0; i < m.n_channels; ++i)
        for (int j = 0; j < m.n_channels; ++j) u(i, j) = (i == j ? m.kappa(i) : 0.0) - u(i, j);
    return u;
}

inline PotentialSample potential(double r, const ChannelModel& m) {
    if (r < 0.0) throw ValidationError("bad-radius", "potential: r must be nonnegative");
    const int n = m.n_channels;
    const RMat x = potential_detail::decay_part(r, m);
    RMat kx(n), xk(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            kx(i, j) = m.kappa(i) * x(i, j);
            xk(i, j) = x(i, j) * m.kappa(j);
        }
    RMat v = x * x;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(i, j) = 2.0 * (v(i, j) - kx(i, j) - xk(i, j));

    PotentialSample sample;
    sample.r = r;
    sample.asymmetry = v.max_asymmetry();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double sym = 0.5 * (v(i, j) + v(j, i));
            v(i, j) = v(j, i) = sym;
        }
    sample.v = v;
    return sample;
}

struct RegularityReport {
    bool regular = false;
    double min_eigenvalue = 0.0;            // smallest eigenvalue of Kcal + U0
};

inline RegularityReport regularity_check(const ChannelModel& m) {
    RMat g = m.u0();
    for (int j = 0; j < m.n_channels; ++j) g(j, j) += m.kappa(j);
    const std::vector<double> ev = jacobi_eigenvalues(g);
    return {ev.front() > 0.0, ev.front()};
}

// Default radial grid covering the decay scale of the potential.
inline std::vector<double> default_potential_grid(const ChannelModel& m, int points = 2000) {
    double kappa_min = m.kappa(0);
    for (int j = 1; j < m.n_channels; ++j) kappa_min = std::min(kappa_min, m.kappa(j));
    const double rmax = 25.0 / kappa_min;
    std::vector<double> grid(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i) grid[static_cast<size_t>(i)] = rmax * i / (points - 1);
    return grid;
}

} // namespace coxspec
