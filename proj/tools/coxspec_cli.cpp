// coxspec command-line front end.
//
//   coxspec analyze   --model m.json --out spectrum.json
//   coxspec curves    --model m.json --out curves.csv [--sheet +-+] [--grid -12:12:1201]
//   coxspec perturb   --model m.json --out table.csv
//   coxspec invert2   --model inverse.json --out result.json [--branch upper] [--scenario NAME]
//   coxspec potential --model m.json --out potential.csv [--grid 0:50:2000]
//   coxspec scatter   --model m.json --out observables.csv [--grid 0.01:2:400]
#include <map>
#include <string>

#include <CLI11.hpp>

#include "coxspec/runner.hpp"

namespace {

coxspec::RunConfig g_cfg;
std::vector<std::string> g_tol_args;

void add_common(CLI::App* cmd, bool needs_model = true) {
    cmd->add_option("--model", g_cfg.model_path, "input file (model JSON, or inverse-problem JSON for invert2)")
        ->required(needs_model);
    cmd->add_option("--out", g_cfg.out_path, "output file")->required();
    cmd->add_option("--tol", g_tol_args, "tolerance override NAME=VALUE (repeatable)");
}

int apply_tolerances() {
    for (const std::string& v : g_tol_args) {
        const size_t eq = v.find('=');
        bool ok = eq != std::string::npos && eq > 0;
        if (ok) {
            try {
                g_cfg.tol_overrides[v.substr(0, eq)] = std::stod(v.substr(eq + 1));
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok) {
            std::cerr << "{\"error\": {\"kind\": \"validation\", \"code\": \"bad-tolerance\", "
                         "\"message\": \"--tol expects NAME=VALUE, got '" << v << "'\"}}\n";
            return 1;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coxspec: spectra, inverse problems, and observables of multichannel Cox potentials"};
    app.require_subcommand(1);

    CLI::App* analyze = app.add_subcommand("analyze", "locate and classify all det-B zeros");
    add_common(analyze);

    CLI::App* curves = app.add_subcommand("curves", "B-matrix eigenvalue curves over the imaginary axis");
    add_common(curves);
    curves->add_option("--sheet", g_cfg.sheet, "restrict to one sheet, e.g. ++- (default: all sheets)");
    std::string curves_grid;
    curves->add_option("--grid", curves_grid, "k1bar grid MIN:MAX:N (default -12:12:1201)");

    CLI::App* perturb = app.add_subcommand("perturb", "weak-coupling roots vs the exact solver");
    add_common(perturb);

    CLI::App* invert2 = app.add_subcommand("invert2", "two-channel inverse problem from prescribed zeros");
    add_common(invert2);
    invert2->add_option("--branch", g_cfg.branch, "alpha branch: upper|lower (default upper)");
    invert2->add_option("--scenario", g_cfg.scenario,
                        "preset: resonance-only, resonance-plus-bound, two-bound, one-bound");

    CLI::App* potential = app.add_subcommand("potential", "potential matrix V(r) on a radial grid");
    add_common(potential);
    std::string pot_grid;
    potential->add_option("--grid", pot_grid, "radial grid MIN:MAX:N (default 0:25/kappa_min:2000)");

    CLI::App* scatter = app.add_subcommand("scatter", "S-matrix, phase shift, and cross section sweep");
    add_common(scatter);
    std::string scat_grid;
    scatter->add_option("--grid", scat_grid, "energy grid MIN:MAX:N (default 0.01:2:400)");

    CLI11_PARSE(app, argc, argv);

    if (int rc = apply_tolerances(); rc != 0) return rc;

    try {
        if (analyze->parsed()) g_cfg.command = coxspec::Command::analyze;
        if (curves->parsed()) {
            g_cfg.command = coxspec::Command::curves;
            if (!curves_grid.empty()) g_cfg.grid = coxspec::GridSpec::parse(curves_grid);
        }
        if (perturb->parsed()) g_cfg.command = coxspec::Command::perturb;
        if (invert2->parsed()) g_cfg.command = coxspec::Command::invert2;
        if (potential->parsed()) {
            g_cfg.command = coxspec::Command::potential_cmd;
            if (!pot_grid.empty()) g_cfg.grid = coxspec::GridSpec::parse(pot_grid);
        }
        if (scatter->parsed()) {
            g_cfg.command = coxspec::Command::scatter;
            if (!scat_grid.empty()) g_cfg.grid = coxspec::GridSpec::parse(scat_grid);
        }
    } catch (const coxspec::ValidationError& e) {
        std::cerr << "{\"error\": {\"kind\": \"validation\", \"code\": \"" << e.code()
                  << "\", \"message\": \"" << e.what() << "\"}}\n";
        return 1;
    }

    return coxspec::run(g_cfg);
}
