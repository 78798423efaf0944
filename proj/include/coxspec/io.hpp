// File formats: the model JSON (single source for all CLI commands), the
// spectrum report JSON, the two-channel inverse-problem input, and the CSV
// grids.
//
// Inputs are parsed with nlohmann::json. Outputs go through a small
// deterministic emitter: fixed key order, numbers printed with %.12g
// (12 significant digits, lowercase exponent), so repeated runs are
// byte-identical.
#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coxspec/cox2.hpp"
#include "coxspec/errors.hpp"
#include "coxspec/model.hpp"
#include "coxspec/spectrum.hpp"

namespace coxspec {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string fmt_pair(cplx v) {
    return "[" + fmt_num(v.real()) + ", " + fmt_num(v.imag()) + "]";
}

// ---------------------------------------------------------------------------
// model file
// {"n": N, "thresholds": [...], "alpha": [...],
//  "beta": [[j, l, value], ...] (1-based j > l), "factorization_energy": e}
// ---------------------------------------------------------------------------

inline ChannelModel model_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"n", "thresholds", "alpha", "beta", "factorization_energy"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const std::string& k : known) ok = ok || it.key() == k;
        if (!ok) throw ValidationError("unknown-key", "model file: unknown key '" + it.key() + "'");
    }
    ChannelModel m;
    try {
        m.n_channels = j.at("n").get<int>();
        m.thresholds = j.at("thresholds").get<std::vector<double>>();
        m.alpha = j.at("alpha").get<std::vector<double>>();
        if (j.contains("beta"))
            for (const auto& row : j.at("beta")) {
                if (!row.is_array() || row.size() != 3)
                    throw ValidationError("bad-beta", "model file: beta rows must be [j, l, value]");
                ChannelModel::Coupling c;
                c.j = row[0].get<int>() - 1;
                c.l = row[1].get<int>() - 1;
                c.value = row[2].get<double>();
                m.beta.push_back(c);
            }
        m.factorization_energy = j.at("factorization_energy").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad-model-json", std::string("model file: ") + e.what());
    }
    return m;
}

inline ChannelModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("unreadable-file", "cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad-json", std::string("model file parse error: ") + e.what());
    }
    return model_from_json(j);
}

inline std::string model_to_json(const ChannelModel& m) {
    std::ostringstream os;
    os << "{\n  \"n\": " << m.n_channels << ",\n  \"thresholds\": [";
    for (int j = 0; j < m.n_channels; ++j)
        os << (j ? ", " : "") << fmt_num(m.thresholds[static_cast<size_t>(j)]);
    os << "],\n  \"alpha\": [";
    for (int j = 0; j < m.n_channels; ++j) os << (j ? ", " : "") << fmt_num(m.alpha[static_cast<size_t>(j)]);
    os << "],\n  \"beta\": [";
    bool first = true;
    for (const auto& c : m.beta) {
        if (c.value == 0.0) continue;
        os << (first ? "" : ", ") << "[" << (c.j + 1) << ", " << (c.l + 1) << ", " << fmt_num(c.value) << "]";
        first = false;
    }
    os << "],\n  \"factorization_energy\": " << fmt_num(m.factorization_energy) << "\n}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// spectrum report
// ---------------------------------------------------------------------------

inline std::string spectrum_to_json(const SpectrumResult& res) {
    std::ostringstream os;
    os << "{\n  \"points\": [\n";
    for (size_t i = 0; i < res.points.size(); ++i) {
        const SpectralPoint& p = res.points[i];
        os << "    {\"class\": \"" << to_string(p.cls) << "\", \"energy\": " << fmt_pair(p.energy)
           << ", \"momenta\": [";
        for (size_t j = 0; j < p.momenta.k.size(); ++j) os << (j ? ", " : "") << fmt_pair(p.momenta.k[j]);
        os << "], \"sheet\": \"" << p.sheet.str() << "\", \"residual\": " << fmt_num(p.residual) << "}";
        os << (i + 1 < res.points.size() ? ",\n" : "\n");
    }
    os << "  ],\n  \"tally\": {\"n_b\": " << res.tally.n_bound << ", \"n_v\": " << res.tally.n_virtual
       << ", \"n_r\": " << res.tally.n_resonance_pairs << ", \"n_cancelled\": " << res.tally.n_cancelled
       << ", \"n_degenerate\": " << res.tally.n_degenerate
       << ", \"expected_total\": " << res.tally.expected_total << "}\n}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// inverse-problem input
// {"delta": d, "beta": b, "branch": "upper"|"lower",
//  "resonance": {"er": ..., "ei": ..., "sign": "upper"|"lower"}   (either)
//  "zeros": [[re, im], [re, im]],                                 (or)
//  "zeros2": [[re, im], [re, im]],          optional channel-2 momenta
//  "bound_lambda": l, "alpha1": a, "kappa1": k}                   scenario extras
// ---------------------------------------------------------------------------

struct InverseInput {
    double delta = 0.0;
    std::optional<double> beta;
    Branch branch = Branch::upper;
    std::optional<std::pair<double, double>> resonance;  // (er, ei)
    Branch resonance_sign = Branch::lower;               // sign of k_i in the parametrization
    std::vector<cplx> zeros;                             // channel-1 momenta (1 or 2 entries)
    std::optional<std::array<cplx, 2>> zeros2;           // channel-2 momenta
    std::optional<double> bound_lambda;
    std::optional<double> alpha1;
    std::optional<double> kappa1;
};

inline cplx parse_complex_pair(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ValidationError("bad-complex", "complex values must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline InverseInput inverse_input_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"delta", "beta",  "branch",       "resonance",
                                                   "zeros", "zeros2", "bound_lambda", "alpha1",
                                                   "kappa1"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const std::string& k : known) ok = ok || it.key() == k;
        if (!ok) throw ValidationError("unknown-key", "inverse input: unknown key '" + it.key() + "'");
    }
    InverseInput in;
    try {
        in.delta = j.at("delta").get<double>();
        if (j.contains("beta")) in.beta = j.at("beta").get<double>();
        if (j.contains("branch")) in.branch = parse_branch(j.at("branch").get<std::string>());
        if (j.contains("resonance")) {
            const auto& r = j.at("resonance");
            in.resonance = std::make_pair(r.at("er").get<double>(), r.at("ei").get<double>());
            if (r.contains("sign")) in.resonance_sign = parse_branch(r.at("sign").get<std::string>());
        }
        if (j.contains("zeros")) {
            const auto& z = j.at("zeros");
            if (!z.is_array() || z.empty() || z.size() > 2)
                throw ValidationError("bad-zeros", "inverse input: 'zeros' must hold one or two [re, im] pairs");
            for (const auto& entry : z) in.zeros.push_back(parse_complex_pair(entry));
        }
        if (j.contains("zeros2")) {
            const auto& z = j.at("zeros2");
            if (!z.is_array() || z.size() != 2)
                throw ValidationError("bad-zeros", "inverse input: 'zeros2' must hold two [re, im] pairs");
            in.zeros2 = std::array<cplx, 2>{parse_complex_pair(z[0]), parse_complex_pair(z[1])};
        }
        if (j.contains("bound_lambda")) in.bound_lambda = j.at("bound_lambda").get<double>();
        if (j.contains("alpha1")) in.alpha1 = j.at("alpha1").get<double>();
        if (j.contains("kappa1")) in.kappa1 = j.at("kappa1").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad-inverse-json", std::string("inverse input: ") + e.what());
    }
    return in;
}

inline InverseInput load_inverse_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("unreadable-file", "cannot open inverse input file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad-json", std::string("inverse input parse error: ") + e.what());
    }
    return inverse_input_from_json(j);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : cols_(std::move(header)) {
        for (size_t i = 0; i < cols_.size(); ++i) os_ << (i ? "," : "") << cols_[i];
        os_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << "\n";
    }

    std::string str() const { return os_.str(); }

private:
    std::vector<std::string> cols_;
    std::ostringstream os_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("unwritable-file", "cannot write output file: " + path);
    out << content;
}

} // namespace coxspec
