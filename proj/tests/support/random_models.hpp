// Deterministic random-model generators shared by the property and
// acceptance suites. All draws use an explicit mt19937_64 so a fixed seed
// reproduces the exact population.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "coxspec/model.hpp"

namespace coxspec::testing {

// A model satisfying every validation invariant: thresholds distinct and
// anchored at 0, and a factorization energy negative enough that
// Kcal + U0 is diagonally dominant, hence positive definite.
inline ChannelModel random_regular_model(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> gap(0.8, 8.0);
    std::uniform_real_distribution<double> alpha(-3.0, 3.0);
    std::uniform_real_distribution<double> coupling(-1.0, 1.0);

    ChannelModel m;
    m.n_channels = n;
    m.thresholds.assign(static_cast<size_t>(n), 0.0);
    for (int j = 1; j < n; ++j)
        m.thresholds[static_cast<size_t>(j)] = m.thresholds[static_cast<size_t>(j - 1)] + gap(rng);
    double row_sum = 0.0, min_alpha = 0.0;
    for (int j = 0; j < n; ++j) {
        m.alpha.push_back(alpha(rng));
        min_alpha = std::min(min_alpha, m.alpha.back());
    }
    for (int j = 1; j < n; ++j)
        for (int l = 0; l < j; ++l) {
            const double b = coupling(rng);
            m.beta.push_back({j, l, b});
            row_sum += std::abs(b);
        }
    const double margin = -min_alpha + row_sum + 1.0;
    m.factorization_energy = -margin * margin;
    return m;
}

// Like random_regular_model but with bounded parameters, so kappa stays
// small enough that h = 1e-4 central differences of the superpotential are
// truncation-limited well below 1e-6.
inline ChannelModel random_moderate_model(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> gap(0.5, 2.5);
    std::uniform_real_distribution<double> alpha(-1.0, 1.0);
    std::uniform_real_distribution<double> coupling(-0.4, 0.4);

    ChannelModel m;
    m.n_channels = n;
    m.thresholds.assign(static_cast<size_t>(n), 0.0);
    for (int j = 1; j < n; ++j)
        m.thresholds[static_cast<size_t>(j)] = m.thresholds[static_cast<size_t>(j - 1)] + gap(rng);
    double row_sum = 0.0, min_alpha = 0.0;
    for (int j = 0; j < n; ++j) {
        m.alpha.push_back(alpha(rng));
        min_alpha = std::min(min_alpha, m.alpha.back());
    }
    for (int j = 1; j < n; ++j)
        for (int l = 0; l < j; ++l) {
            const double b = coupling(rng);
            m.beta.push_back({j, l, b});
            row_sum += std::abs(b);
        }
    const double margin = -min_alpha + row_sum + 0.5;
    m.factorization_energy = -margin * margin;
    return m;
}

// A model suited to second-order perturbation tests: coupling shape with
// |b_jl| in [0.2, 1], level momenta away from thresholds, and all correction
// denominators |alpha_l + sign sqrt(alpha_j^2 + Delta_l - Delta_j)| >= 0.8.
struct PerturbationFamily {
    ChannelModel base;                      // beta = 0
    RMat b;                                 // coupling shape

    ChannelModel coupled(double beta) const {
        ChannelModel m = base;
        for (int j = 1; j < m.n_channels; ++j)
            for (int l = 0; l < j; ++l) m.beta.push_back({j, l, beta * b(j, l)});
        return m;
    }
};

inline PerturbationFamily random_perturbation_family(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> gap(1.5, 9.0);
    std::uniform_real_distribution<double> alpha_mag(0.5, 2.5);
    std::uniform_real_distribution<double> sign01(0.0, 1.0);
    std::uniform_real_distribution<double> coupling_mag(0.2, 1.0);

    for (int attempt = 0; attempt < 1000; ++attempt) {
        ChannelModel m;
        m.n_channels = n;
        m.thresholds.assign(static_cast<size_t>(n), 0.0);
        for (int j = 1; j < n; ++j)
            m.thresholds[static_cast<size_t>(j)] = m.thresholds[static_cast<size_t>(j - 1)] + gap(rng);
        double min_alpha = 0.0;
        for (int j = 0; j < n; ++j) {
            const double a = alpha_mag(rng) * (sign01(rng) < 0.5 ? -1.0 : 1.0);
            m.alpha.push_back(a);
            min_alpha = std::min(min_alpha, a);
        }
        m.factorization_energy = -(std::abs(min_alpha) + n + 2.0) * (std::abs(min_alpha) + n + 2.0);

        // reject near-degenerate correction denominators and companion
        // momenta too close to a threshold
        double worst_den = 1e30, worst_comp = 1e30;
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                if (l == j) continue;
                const double aj = m.alpha[static_cast<size_t>(j)];
                const cplx root = std::sqrt(cplx(aj * aj + m.thresholds[static_cast<size_t>(l)] -
                                                     m.thresholds[static_cast<size_t>(j)],
                                                 0.0));
                for (double s : {1.0, -1.0})
                    worst_den = std::min(worst_den, std::abs(m.alpha[static_cast<size_t>(l)] + s * root));
                worst_comp = std::min(worst_comp,
                                      std::abs(-aj * aj + m.thresholds[static_cast<size_t>(j)] -
                                               m.thresholds[static_cast<size_t>(l)]));
            }
        if (worst_den < 0.8 || worst_comp < 0.5) continue;

        PerturbationFamily fam;
        fam.base = m;
        fam.b = RMat(n);
        for (int j = 1; j < n; ++j)
            for (int l = 0; l < j; ++l) {
                const double v = coupling_mag(rng) * (sign01(rng) < 0.5 ? -1.0 : 1.0);
                fam.b(j, l) = fam.b(l, j) = v;
            }
        return fam;
    }
    throw std::runtime_error("random_perturbation_family: no admissible model found");
}

} // namespace coxspec::testing
