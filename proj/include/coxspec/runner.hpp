// Command runner behind the CLI: thin composition of the library operations
// plus file I/O. No numerics of its own.
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure. Failures
// print a machine-readable JSON object on stderr.
#pragma once

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "coxspec/cox2.hpp"
#include "coxspec/elimination.hpp"
#include "coxspec/errors.hpp"
#include "coxspec/io.hpp"
#include "coxspec/model.hpp"
#include "coxspec/perturbation.hpp"
#include "coxspec/potential.hpp"
#include "coxspec/scattering.hpp"
#include "coxspec/spectrum.hpp"

namespace coxspec {

enum class Command { analyze, curves, perturb, invert2, potential_cmd, scatter };

struct GridSpec {
    double min = 0.0;
    double max = 1.0;
    int points = 100;

    std::vector<double> samples() const {
        if (points < 2 || !(max > min))
            throw ValidationError("bad-grid", "grid requires max > min and at least 2 points");
        std::vector<double> g(static_cast<size_t>(points));
        for (int i = 0; i < points; ++i) g[static_cast<size_t>(i)] = min + (max - min) * i / (points - 1);
        return g;
    }

    static GridSpec parse(const std::string& text) {
        GridSpec g;
        const size_t c1 = text.find(':');
        const size_t c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ValidationError("bad-grid", "grid must be MIN:MAX:N");
        try {
            g.min = std::stod(text.substr(0, c1));
            g.max = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
            g.points = std::stoi(text.substr(c2 + 1));
        } catch (const std::exception&) {
            throw ValidationError("bad-grid", "grid must be MIN:MAX:N with numeric fields");
        }
        return g;
    }
};

struct RunConfig {
    Command command = Command::analyze;
    std::string model_path;
    std::string out_path;
    std::string sheet;                       // curves: restrict to one sheet ("+-+"); empty = all
    std::optional<GridSpec> grid;
    std::string branch = "upper";
    std::string scenario;
    std::map<std::string, double> tol_overrides;
};

namespace runner_detail {

inline SpectrumTolerances tolerances_from(const std::map<std::string, double>& overrides) {
    SpectrumTolerances t;
    for (const auto& [name, value] : overrides) {
        if (!(value > 0.0)) throw ValidationError("bad-tolerance", "tolerance '" + name + "' must be positive");
        if (name == "aberth_rel") t.aberth_rel = value;
        else if (name == "polish_accept") t.polish_accept = value;
        else if (name == "residual_detb") t.residual_detb = value;
        else if (name == "residual_threshold") t.residual_threshold = value;
        else if (name == "imaginary_axis") t.imaginary_axis = value;
        else if (name == "degenerate") t.degenerate = value;
        else if (name == "cancellation") t.cancellation = value;
        else if (name == "resonance_pairing") t.resonance_pairing = value;
        else throw ValidationError("bad-tolerance", "unknown tolerance '" + name + "'");
    }
    return t;
}

inline ChannelModel load_validated_model(const std::string& path) {
    const ChannelModel m = load_model(path);
    const ValidationReport rep = validate(m);
    if (!rep.ok) {
        std::string msg = "model validation failed:";
        for (const std::string& v : rep.violations) msg += " [" + v + "]";
        throw ValidationError("invalid-model", msg);
    }
    return m;
}

inline int run_analyze(const RunConfig& cfg) {
    const ChannelModel m = load_validated_model(cfg.model_path);
    if (m.n_channels > 6)
        std::cerr << "warning: above 6 channels the eliminated polynomial (degree "
                  << m.n_channels * (1 << (m.n_channels - 1))
                  << ") becomes ill-conditioned; expect reduced zero accuracy\n";
    const SpectrumResult res = solve_spectrum(m, tolerances_from(cfg.tol_overrides));
    write_file(cfg.out_path, spectrum_to_json(res));
    std::cout << "zeros: " << res.points.size() << " of " << res.tally.expected_total
              << " expected | bound " << res.tally.n_bound << ", virtual " << res.tally.n_virtual
              << ", resonance pairs " << res.tally.n_resonance_pairs << ", cancelled "
              << res.tally.n_cancelled << ", degenerate " << res.tally.n_degenerate << "\n";
    for (const SpectralPoint& p : res.points)
        std::cout << "  " << to_string(p.cls) << " E = " << fmt_num(p.energy.real())
                  << (p.energy.imag() >= 0 ? " + " : " - ") << fmt_num(std::abs(p.energy.imag()))
                  << "i  sheet " << p.sheet.str() << "\n";
    return 0;
}

inline int run_curves(const RunConfig& cfg) {
    const ChannelModel m = load_validated_model(cfg.model_path);
    GridSpec grid = cfg.grid.value_or(GridSpec{-12.0, 12.0, 1201});
    std::vector<SheetSignature> sheets;
    if (!cfg.sheet.empty()) sheets.push_back(SheetSignature::parse(cfg.sheet));
    else sheets = SheetSignature::enumerate(m.n_channels);

    std::vector<std::string> header = {"sheet", "k1bar"};
    for (int j = 0; j < m.n_channels; ++j) header.push_back("lambda" + std::to_string(j + 1));
    CsvWriter csv(header);
    int crossings = 0;
    for (const SheetSignature& sheet : sheets) {
        const EigenCurve curve = eigenvalue_curves(m, sheet, grid.samples());
        for (size_t i = 0; i < curve.grid.size(); ++i) {
            std::vector<std::string> row = {sheet.str(), fmt_num(curve.grid[i])};
            for (double ev : curve.eigenvalues[i]) row.push_back(fmt_num(ev));
            csv.row(row);
        }
        for (const auto& c : curve.crossings) {
            std::cout << "crossing sheet " << sheet.str() << " trace " << (c.trace + 1) << " at k1bar = "
                      << fmt_num(c.k1bar) << " (E = " << fmt_num(-c.k1bar * c.k1bar) << ")\n";
            ++crossings;
        }
    }
    std::cout << "total crossings: " << crossings << "\n";
    write_file(cfg.out_path, csv.str());
    return 0;
}

inline int run_perturb(const RunConfig& cfg) {
    const ChannelModel m = load_validated_model(cfg.model_path);
    const CouplingSplit split = CouplingSplit::from_model(m);
    const std::vector<PerturbedRoot> approx = perturbed_roots(m, split);
    const SpectrumResult exact = solve_spectrum(m, tolerances_from(cfg.tol_overrides));

    std::vector<std::string> header = {"level", "sheet"};
    for (int j = 0; j < m.n_channels; ++j) {
        header.push_back("k" + std::to_string(j + 1) + "_re");
        header.push_back("k" + std::to_string(j + 1) + "_im");
    }
    header.push_back("nearest_exact_distance");
    CsvWriter csv(header);
    double worst = 0.0;
    for (const PerturbedRoot& r : approx) {
        double best = -1.0;
        for (const SpectralPoint& p : exact.points) {
            double d = 0.0;
            for (size_t j = 0; j < p.momenta.k.size(); ++j)
                d = std::max(d, std::abs(p.momenta.k[j] - r.momenta.k[j]));
            if (best < 0.0 || d < best) best = d;
        }
        worst = std::max(worst, best);
        std::vector<std::string> row = {std::to_string(r.level + 1), r.sheet.str()};
        for (const cplx& k : r.momenta.k) {
            row.push_back(fmt_num(k.real()));
            row.push_back(fmt_num(k.imag()));
        }
        row.push_back(fmt_num(best));
        csv.row(row);
    }
    write_file(cfg.out_path, csv.str());
    std::cout << "perturbative roots: " << approx.size() << ", worst distance to exact: " << fmt_num(worst)
              << " (beta = " << fmt_num(split.beta) << ")\n";
    return 0;
}

inline TwoChannelSpec spec_from_inverse_input(const InverseInput& in) {
    TwoChannelSpec spec;
    if (in.resonance) {
        spec = resonance_momenta(in.resonance->first, in.resonance->second, in.delta, in.resonance_sign,
                                 in.beta.value_or(0.0), in.branch);
    } else if (in.zeros.size() == 2) {
        spec.delta = in.delta;
        spec.beta = in.beta.value_or(0.0);
        spec.branch = in.branch;
        spec.k1 = {in.zeros[0], in.zeros[1]};
        if (in.zeros2) {
            spec.k2 = *in.zeros2;
        } else {
            // threshold completion on the positive-imaginary branch
            for (int i = 0; i < 2; ++i)
                spec.k2[static_cast<size_t>(i)] =
                    std::sqrt(spec.k1[static_cast<size_t>(i)] * spec.k1[static_cast<size_t>(i)] - spec.delta);
        }
    } else {
        throw ValidationError("bad-inverse-json", "inverse input needs either 'resonance' or two 'zeros'");
    }
    return spec;
}

inline int run_invert2(const RunConfig& cfg) {
    InverseInput in = load_inverse_input(cfg.model_path);
    if (!cfg.branch.empty()) in.branch = parse_branch(cfg.branch);

    std::ostringstream report;
    double beta_used = in.beta.value_or(0.0);
    const std::string scenario = cfg.scenario.empty() ? "generic" : cfg.scenario;
    if (in.resonance)
        report << "  \"visible_feshbach\": "
               << (visible_feshbach(in.resonance->first, in.resonance->second, in.delta) ? "true" : "false")
               << ",\n";

    if (scenario == "resonance-plus-bound") {
        if (!in.resonance || !in.bound_lambda)
            throw ValidationError("bad-scenario", "resonance-plus-bound needs 'resonance' and 'bound_lambda'");
        const std::vector<double> betas =
            beta_for_bound_state(in.resonance->first, in.resonance->second, in.delta, *in.bound_lambda);
        beta_used = betas.front();
        in.beta = beta_used;
        in.branch = Branch::lower;  // bound-state placement uses the lower branch
        report << "  \"admissible_beta\": [";
        for (size_t i = 0; i < betas.size(); ++i) report << (i ? ", " : "") << fmt_num(betas[i]);
        report << "],\n";
    } else if (scenario == "resonance-only") {
        if (!in.resonance) throw ValidationError("bad-scenario", "resonance-only needs 'resonance'");
        const double bmin = beta_lower_bound(in.resonance->first, in.resonance->second, in.delta);
        if (!in.beta) throw ValidationError("bad-scenario", "resonance-only needs 'beta'");
        if (*in.beta < bmin)
            throw ValidationError("beta-below-bound",
                                  "beta " + fmt_num(*in.beta) + " below realizability bound " + fmt_num(bmin));
        report << "  \"beta_lower_bound\": " << fmt_num(bmin) << ",\n";
    } else if (scenario == "two-bound") {
        if (in.zeros.size() != 2) throw ValidationError("bad-scenario", "two-bound needs two 'zeros'");
        for (const cplx& z : in.zeros)
            if (std::abs(z.real()) > 1e-12 || z.imag() <= 0.0)
                throw ValidationError("bad-scenario", "two-bound zeros must lie on the positive imaginary axis");
    } else if (scenario == "one-bound") {
        if (in.zeros.empty() || !in.beta || !in.alpha1)
            throw ValidationError("bad-scenario", "one-bound needs 'zeros' (one entry), 'beta', 'alpha1'");
    } else if (scenario != "generic") {
        throw ValidationError("bad-scenario", "unknown scenario '" + scenario + "'");
    }

    double alpha1 = 0.0, alpha2 = 0.0;
    TwoChannelSpec spec;
    if (scenario == "one-bound") {
        // single prescribed zero: alpha_2 follows from one zero condition
        const cplx k1 = in.zeros[0];
        const double lambda_b = k1.imag();
        if (std::abs(k1.real()) > 1e-12 || lambda_b <= 0.0)
            throw ValidationError("bad-scenario", "one-bound zero must lie on the positive imaginary axis");
        beta_used = *in.beta;
        alpha1 = *in.alpha1;
        alpha2 = beta_used * beta_used / (lambda_b + alpha1) - std::sqrt(lambda_b * lambda_b + in.delta);
    } else {
        spec = spec_from_inverse_input(in);
        spec.beta = beta_used = in.beta.value_or(beta_used);
        spec.branch = in.branch;
        const InversionResult inv = invert_two_roots(spec);
        alpha1 = inv.alpha1;
        alpha2 = inv.alpha2;
    }

    double kappa1 = in.kappa1.value_or(1.0);
    if (scenario == "two-bound" || scenario == "one-bound" || scenario == "resonance-plus-bound") {
        // regularity restriction kappa_1 > lambda of the deepest prescribed bound state
        double lam = in.bound_lambda.value_or(0.0);
        for (const cplx& z : in.zeros) lam = std::max(lam, z.imag());
        if (!in.kappa1) kappa1 = std::max(1.0, 1.01 * lam);
        else if (kappa1 <= lam)
            throw ValidationError("kappa-too-small", "kappa1 must exceed the deepest bound-state lambda " + fmt_num(lam));
    }

    const ChannelModel model = make_two_channel_model(in.delta, beta_used, alpha1, alpha2, kappa1);
    const ValidationReport rep = validate(model);
    if (!rep.ok) {
        std::string msg = "reconstructed model fails validation:";
        for (const std::string& v : rep.violations) msg += " [" + v + "]";
        throw ValidationError("invalid-model", msg);
    }

    const SpectrumResult res = solve_spectrum(model, tolerances_from(cfg.tol_overrides));

    std::ostringstream os;
    os << "{\n  \"scenario\": \"" << scenario << "\",\n  \"branch\": \"" << to_string(in.branch)
       << "\",\n  \"alpha1\": " << fmt_num(alpha1) << ",\n  \"alpha2\": " << fmt_num(alpha2)
       << ",\n  \"beta\": " << fmt_num(beta_used) << ",\n  \"kappa1\": " << fmt_num(kappa1) << ",\n"
       << report.str() << "  \"model\": " << model_to_json(model) << ",\n  \"spectrum\": "
       << spectrum_to_json(res) << "}\n";
    write_file(cfg.out_path, os.str());
    std::cout << "alpha1 = " << fmt_num(alpha1) << ", alpha2 = " << fmt_num(alpha2) << ", beta = "
              << fmt_num(beta_used) << "\n";
    for (const SpectralPoint& p : res.points)
        std::cout << "  " << to_string(p.cls) << " E = " << fmt_num(p.energy.real())
                  << (p.energy.imag() >= 0 ? " + " : " - ") << fmt_num(std::abs(p.energy.imag())) << "i\n";
    return 0;
}

inline int run_potential(const RunConfig& cfg) {
    const ChannelModel m = load_validated_model(cfg.model_path);
    std::vector<double> grid;
    if (cfg.grid) grid = cfg.grid->samples();
    else grid = default_potential_grid(m);

    std::vector<std::string> header = {"r"};
    for (int i = 0; i < m.n_channels; ++i)
        for (int j = i; j < m.n_channels; ++j)
            header.push_back("V_" + std::to_string(i + 1) + std::to_string(j + 1));
    CsvWriter csv(header);
    for (double r : grid) {
        const PotentialSample s = potential(r, m);
        std::vector<std::string> row = {fmt_num(r)};
        for (int i = 0; i < m.n_channels; ++i)
            for (int j = i; j < m.n_channels; ++j) row.push_back(fmt_num(s.v(i, j)));
        csv.row(row);
    }
    write_file(cfg.out_path, csv.str());
    const RegularityReport reg = regularity_check(m);
    std::cout << "potential written for " << grid.size() << " radii; regularity min eigenvalue "
              << fmt_num(reg.min_eigenvalue) << (reg.regular ? " (regular)\n" : " (NOT regular)\n");
    return 0;
}

inline int run_scatter(const RunConfig& cfg) {
    const ChannelModel m = load_validated_model(cfg.model_path);
    GridSpec grid = cfg.grid.value_or(GridSpec{0.01, 2.0, 400});
    const std::vector<ObservableSample> sweep = observable_sweep(grid.samples(), m);

    std::vector<std::string> header = {"E", "delta1", "sigma11", "open_count"};
    for (int i = 0; i < m.n_channels; ++i)
        for (int j = 0; j < m.n_channels; ++j) {
            header.push_back("S" + std::to_string(i + 1) + std::to_string(j + 1) + "_re");
            header.push_back("S" + std::to_string(i + 1) + std::to_string(j + 1) + "_im");
        }
    CsvWriter csv(header);
    int failures = 0;
    for (const ObservableSample& s : sweep) {
        std::vector<std::string> row = {fmt_num(s.energy)};
        if (!s.valid) {
            ++failures;
            row.push_back("");
            row.push_back("");
            row.push_back("0");
        } else {
            row.push_back(fmt_num(s.delta1));
            row.push_back(fmt_num(s.sigma11));
            row.push_back(std::to_string(s.open_count));
        }
        for (int i = 0; i < m.n_channels; ++i)
            for (int j = 0; j < m.n_channels; ++j) {
                if (s.valid && i < s.open_count && j < s.open_count) {
                    row.push_back(fmt_num(s.s(i, j).real()));
                    row.push_back(fmt_num(s.s(i, j).imag()));
                } else {
                    row.push_back("");
                    row.push_back("");
                }
            }
        csv.row(row);
    }
    write_file(cfg.out_path, csv.str());
    std::cout << "observables written for " << sweep.size() << " energies (" << failures
              << " skipped near thresholds)\n";
    return 0;
}

} // namespace runner_detail

inline int run(const RunConfig& cfg) {
    try {
        switch (cfg.command) {
            case Command::analyze: return runner_detail::run_analyze(cfg);
            case Command::curves: return runner_detail::run_curves(cfg);
            case Command::perturb: return runner_detail::run_perturb(cfg);
            case Command::invert2: return runner_detail::run_invert2(cfg);
            case Command::potential_cmd: return runner_detail::run_potential(cfg);
            case Command::scatter: return runner_detail::run_scatter(cfg);
        }
    } catch (const ValidationError& e) {
        std::cerr << "{\"error\": {\"kind\": \"validation\", \"code\": \"" << e.code()
                  << "\", \"message\": \"" << e.what() << "\"}}\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "{\"error\": {\"kind\": \"numerical\", \"code\": \"" << e.code()
                  << "\", \"message\": \"" << e.what() << "\"}}\n";
        return 2;
    }
    return 2;
}

} // namespace coxspec
