// Copyright 2026 The nonlocal-meter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Run configuration, mode dispatch and report generation for the command
 * line front end. Reports are JSON; sweep tables additionally serialize to
 * CSV. Identical (config, seed) pairs produce byte-identical reports, so
 * wall-clock timing is never written into the report itself.
 */

#pragma once

#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nlm/optics.hpp"
#include "nlm/protocol.hpp"
#include "nlm/tomography.hpp"
#include "nlm/version.hpp"

namespace nlm::cli {

using nlohmann::json;

struct RunConfig {
    std::string mode;  // protocol | weak-sweep | optics | tomography | table1
    std::optional<std::string> preset;
    std::optional<std::array<cplx, 4>> amps;
    std::vector<double> phi_grid;
    double shots = 1e5;
    std::optional<uint64_t> seed;
    double noise_p = 0.0;
    double visibility = 1.0;
    int resamples = 200;
    std::string output_path;
};

inline cplx parse_amplitude(const std::string &text) {
    // Accepts "0.5", "-0.3i", "0.5+0.5i", "1-2i".
    std::string t = text;
    t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
    if (t.empty()) throw std::invalid_argument("empty amplitude");
    double re = 0.0, im = 0.0;
    size_t pos = 0;
    auto read_num = [&](double &out) {
        size_t used = 0;
        out = std::stod(t.substr(pos), &used);
        if (used == 0) throw std::invalid_argument("malformed amplitude '" + text + "'");
        pos += used;
    };
    if (t.back() == 'i') {
        // Find the split between real and imaginary parts, if any.
        double first = 0.0;
        read_num(first);
        if (pos == t.size() - 1) {
            im = first;  // purely imaginary
        } else {
            re = first;
            read_num(im);
            if (pos != t.size() - 1) throw std::invalid_argument("malformed amplitude '" + text + "'");
        }
        if (t.back() != 'i') throw std::invalid_argument("malformed amplitude '" + text + "'");
    } else {
        read_num(re);
        if (pos != t.size()) throw std::invalid_argument("malformed amplitude '" + text + "'");
    }
    return {re, im};
}

inline std::vector<double> parse_phi_grid(const std::string &spec) {
    std::vector<double> grid;
    if (spec.find(',') != std::string::npos) {
        std::istringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
    } else {
        const int n = std::stoi(spec);
        if (n < 2) throw std::invalid_argument("phi grid needs at least 2 points");
        for (int i = 0; i < n; ++i) {
            grid.push_back(std::numbers::pi * static_cast<double>(i) / (n - 1));
        }
    }
    for (double phi : grid) {
        if (phi < 0.0 || phi > std::numbers::pi) {
            throw std::invalid_argument("phi grid values must lie in [0, pi]");
        }
    }
    return grid;
}

/// Parses a JSON-shaped config document. Flags are merged on top by the CLI.
inline RunConfig parse_config(const json &doc) {
    RunConfig cfg;
    if (!doc.contains("mode")) throw std::invalid_argument("config: missing mode");
    cfg.mode = doc.at("mode").get<std::string>();
    if (doc.contains("preset")) cfg.preset = doc.at("preset").get<std::string>();
    if (doc.contains("amps")) {
        const auto &arr = doc.at("amps");
        if (!arr.is_array() || arr.size() != 4) {
            throw std::invalid_argument("config: amps must be 4 amplitudes");
        }
        std::array<cplx, 4> a;
        for (size_t i = 0; i < 4; ++i) {
            a[i] = arr[i].is_string() ? parse_amplitude(arr[i].get<std::string>())
                                      : cplx(arr[i].get<double>(), 0.0);
        }
        cfg.amps = a;
    }
    if (doc.contains("phi_grid")) {
        if (doc.at("phi_grid").is_string()) {
            cfg.phi_grid = parse_phi_grid(doc.at("phi_grid").get<std::string>());
        } else {
            cfg.phi_grid = doc.at("phi_grid").get<std::vector<double>>();
        }
    }
    if (doc.contains("shots")) cfg.shots = doc.at("shots").get<double>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<uint64_t>();
    if (doc.contains("noise_p")) cfg.noise_p = doc.at("noise_p").get<double>();
    if (doc.contains("visibility")) cfg.visibility = doc.at("visibility").get<double>();
    if (doc.contains("resamples")) cfg.resamples = doc.at("resamples").get<int>();
    if (doc.contains("out")) cfg.output_path = doc.at("out").get<std::string>();
    return cfg;
}

inline void validate_config(const RunConfig &cfg) {
    static const std::vector<std::string> modes = {"protocol", "weak-sweep", "optics",
                                                   "tomography", "table1"};
    if (std::find(modes.begin(), modes.end(), cfg.mode) == modes.end()) {
        throw std::invalid_argument("unknown mode '" + cfg.mode + "'");
    }
    if (cfg.mode == "tomography" && !cfg.seed) {
        throw std::invalid_argument("stochastic mode '" + cfg.mode + "' requires a seed");
    }
    if (cfg.mode != "table1" && !cfg.preset && !cfg.amps) {
        throw std::invalid_argument("mode '" + cfg.mode + "' requires a preset or amplitudes");
    }
    if (cfg.noise_p < 0.0 || cfg.noise_p > 1.0) {
        throw std::invalid_argument("noise_p must lie in [0,1]");
    }
    if (cfg.visibility < 0.0 || cfg.visibility > 1.0) {
        throw std::invalid_argument("visibility must lie in [0,1]");
    }
}

inline SystemInput config_input(const RunConfig &cfg) {
    if (cfg.amps) return SystemInput{*cfg.amps};
    return preset_input(cfg.preset.value());
}

inline size_t worker_count(size_t tasks) {
    size_t n = std::max<unsigned>(1, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("NONLOCAL_METER_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<size_t>(n, static_cast<size_t>(cap));
    }
    return std::min(n, tasks);
}

/// Index-deterministic parallel map: results land in slot i regardless of
/// which worker computed them.
template <typename Fn>
void parallel_for(size_t n, Fn &&fn) {
    const size_t workers = worker_count(n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto &t : pool) t.join();
}

namespace detail {

inline json amps_json(const VectorXcd &v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back({{"re", v[i].real()}, {"im", v[i].imag()}});
    }
    return out;
}

inline json matrix_json(const MatrixXcd &m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rr = json::array(), ri = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ri.push_back(m(i, j).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return {{"re", re}, {"im", im}};
}

inline json config_json(const RunConfig &cfg) {
    json j;
    j["mode"] = cfg.mode;
    if (cfg.preset) j["preset"] = *cfg.preset;
    if (cfg.amps) {
        json arr = json::array();
        for (const cplx &a : *cfg.amps) arr.push_back({{"re", a.real()}, {"im", a.imag()}});
        j["amps"] = arr;
    }
    if (!cfg.phi_grid.empty()) j["phi_grid"] = cfg.phi_grid;
    j["shots"] = cfg.shots;
    if (cfg.seed) j["seed"] = *cfg.seed;
    j["noise_p"] = cfg.noise_p;
    j["visibility"] = cfg.visibility;
    j["resamples"] = cfg.resamples;
    return j;
}

inline json run_protocol(const RunConfig &cfg) {
    const SystemInput input = config_input(cfg);
    const AnalyticExpected exact = analytic_expected(input);
    const auto circuit = run_strong(input, ErasurePolicy::KeepBoth);

    json j;
    j["analytic"] = {{"p_plus", exact.p_plus}, {"p_minus", exact.p_minus}};
    if (exact.psi_plus) j["analytic"]["psi_plus"] = amps_json(exact.psi_plus->amps);
    if (exact.psi_minus) j["analytic"]["psi_minus"] = amps_json(exact.psi_minus->amps);

    json rows = json::array();
    for (const auto &r : circuit) {
        json row;
        row["outcome"] = r.outcome;
        row["erasure_outcome"] = std::string(1, r.erasure_outcome);
        row["probability"] = r.probability;
        row["step2_success_prob"] = r.step2_success_prob;
        row["erasure_prob"] = r.erasure_prob;
        if (r.conditional_state) {
            row["conditional_state"] = amps_json(r.conditional_state->amps);
            const auto &ideal = (r.outcome == +1) ? exact.psi_plus : exact.psi_minus;
            double f = ideal ? overlap2(*r.conditional_state, *ideal) : 0.0;
            row["fidelity_vs_analytic"] = f;
            if (cfg.noise_p > 0.0 && ideal) {
                const DensityMatrix noisy =
                    tomo::apply_depolarizing(to_density(*r.conditional_state), cfg.noise_p);
                row["fidelity_after_noise"] = fidelity(noisy, *ideal);
            }
        }
        rows.push_back(row);
    }
    j["circuit"] = rows;
    return j;
}

inline json run_weak_sweep(const RunConfig &cfg, std::string *csv) {
    const SystemInput input = config_input(cfg);
    const AnalyticExpected exact = analytic_expected(input);
    std::vector<double> grid = cfg.phi_grid;
    if (grid.empty()) grid = parse_phi_grid("9");

    std::vector<double> measured(grid.size());
    parallel_for(grid.size(), [&](size_t i) {
        measured[i] = run_weak(input, CouplingAngle(grid[i])).p_meter_1;
    });

    json rows = json::array();
    std::ostringstream table;
    table << "phi,p_meter_1,predicted\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        const double predicted = exact.p_minus * std::pow(std::sin(grid[i] / 2.0), 2);
        rows.push_back({{"phi", grid[i]}, {"p_meter_1", measured[i]}, {"predicted", predicted}});
        table << grid[i] << ',' << measured[i] << ',' << predicted << '\n';
    }
    if (csv) *csv = table.str();
    json j;
    j["p_minus"] = exact.p_minus;
    j["sweep"] = rows;
    return j;
}

inline json run_optics(const RunConfig &cfg) {
    const SystemInput input = config_input(cfg);
    const AnalyticExpected exact = analytic_expected(input);
    const optics::SetupResult res = optics::run_setup(input, cfg.visibility);

    json j;
    j["p_plus"] = res.p_plus;
    j["p_minus"] = res.p_minus;
    j["postselection_prob"] = res.postselection_prob;
    j["analytic"] = {{"p_plus", exact.p_plus}, {"p_minus", exact.p_minus}};
    if (res.cond_plus && exact.psi_plus) {
        j["fidelity_plus"] = fidelity(*res.cond_plus, *exact.psi_plus);
        j["conditional_plus"] = matrix_json(res.cond_plus->entries);
    }
    if (res.cond_minus && exact.psi_minus) {
        j["fidelity_minus"] = fidelity(*res.cond_minus, *exact.psi_minus);
        j["conditional_minus"] = matrix_json(res.cond_minus->entries);
    }
    return j;
}

inline json run_tomography(const RunConfig &cfg, std::string *csv) {
    const SystemInput input = config_input(cfg);
    const AnalyticExpected exact = analytic_expected(input);
    if (!exact.psi_plus || !exact.psi_minus) {
        throw postselection_error("input state has an empty projection branch");
    }
    const DensityMatrix ideal_plus = to_density(*exact.psi_plus);
    const DensityMatrix ideal_minus = to_density(*exact.psi_minus);
    const DensityMatrix true_plus = tomo::apply_depolarizing(ideal_plus, cfg.noise_p);
    const DensityMatrix true_minus = tomo::apply_depolarizing(ideal_minus, cfg.noise_p);

    const auto settings = tomo::all_settings();
    const uint64_t seed = cfg.seed.value();
    const tomo::CountsTable counts_plus =
        tomo::simulate_counts(true_plus, settings, cfg.shots * exact.p_plus, seed);
    const tomo::CountsTable counts_minus =
        tomo::simulate_counts(true_minus, settings, cfg.shots * exact.p_minus, seed + 1);
    const tomo::BranchEstimates est = tomo::estimate_fidelity_and_probability(
        counts_plus, counts_minus, ideal_plus, ideal_minus, cfg.resamples, seed + 2);

    json j;
    j["F_plus"] = {{"value", est.F_plus.value}, {"sigma", est.F_plus.sigma}};
    j["F_minus"] = {{"value", est.F_minus.value}, {"sigma", est.F_minus.sigma}};
    j["P_plus"] = {{"value", est.P_plus.value}, {"sigma", est.P_plus.sigma}};
    j["P_minus"] = {{"value", est.P_minus.value}, {"sigma", est.P_minus.sigma}};
    j["reconstruction_plus"] = matrix_json(tomo::reconstruct(counts_plus).entries);
    j["reconstruction_minus"] = matrix_json(tomo::reconstruct(counts_minus).entries);
    if (csv) {
        std::ostringstream os;
        counts_plus.to_csv(os);
        *csv = os.str();
    }
    return j;
}

inline json run_table1(const RunConfig &) {
    json rows = json::array();
    for (const std::string name : {"phi1", "phi2", "phi3", "phi4"}) {
        const AnalyticExpected exact = analytic_expected(preset_input(name));
        json row;
        row["input"] = name;
        row["p_plus"] = exact.p_plus;
        row["p_minus"] = exact.p_minus;
        row["state_plus"] = amps_json(exact.psi_plus->amps);
        row["state_minus"] = amps_json(exact.psi_minus->amps);
        if (name == "phi1") {
            row["note"] =
                "published table lists the minus-branch state as |HV>; the algebra for "
                "|+>|H> gives |VH>, which is what this row reports";
        }
        rows.push_back(row);
    }
    json j;
    j["rows"] = rows;
    return j;
}

}  // namespace detail

struct RunReport {
    json document;
    std::string csv;  // empty unless the mode produces a sweep/counts table
};

inline RunReport run(const RunConfig &cfg) {
    validate_config(cfg);
    RunReport report;
    json results;
    if (cfg.mode == "protocol") {
        results = detail::run_protocol(cfg);
    } else if (cfg.mode == "weak-sweep") {
        results = detail::run_weak_sweep(cfg, &report.csv);
    } else if (cfg.mode == "optics") {
        results = detail::run_optics(cfg);
    } else if (cfg.mode == "tomography") {
        results = detail::run_tomography(cfg, &report.csv);
    } else {
        results = detail::run_table1(cfg);
    }
    report.document["config"] = detail::config_json(cfg);
    report.document["library_version"] = kVersion;
    report.document["results"] = results;
    return report;
}

inline void write_report(const RunReport &report, const std::string &path) {
    if (path.empty()) return;
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open output path '" + path + "'");
    os << report.document.dump(2) << '\n';
    if (!report.csv.empty()) {
        std::ofstream cs(path + ".csv");
        cs << report.csv;
    }
}

}  // namespace nlm::cli
