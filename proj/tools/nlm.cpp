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

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nlm/cli.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 numerical invariant violation,
// 4 impossible post-selection.
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitPostselection = 4;

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"nonlocal-meter: nonlocal Pauli-product measurement simulator"};

    std::string mode, preset, config_path, phi_grid_spec, out_path;
    std::vector<std::string> amps;
    double shots = -1.0, noise_p = -1.0, visibility = -1.0;
    int resamples = -1;
    uint64_t seed = 0;
    bool seed_set = false;

    app.add_option("--config", config_path, "JSON config file (flags override its keys)");
    app.add_option("--mode", mode, "protocol | weak-sweep | optics | tomography | table1");
    app.add_option("--preset", preset, "named input state: phi1 | phi2 | phi3 | phi4");
    app.add_option("--amps", amps, "four system amplitudes, e.g. 0.5 0.5i 0.5 -0.5i")
        ->expected(4);
    app.add_option("--phi-grid", phi_grid_spec,
                   "coupling-angle grid: point count or comma-separated values in [0, pi]");
    app.add_option("--shots", shots, "mean coincidence counts per tomography setting");
    app.add_option("--seed", seed, "64-bit RNG seed (required for stochastic modes)")
        ->trigger_on_parse()
        ->each([&](const std::string &) { seed_set = true; });
    app.add_option("--noise-p", noise_p, "depolarizing strength in [0,1]");
    app.add_option("--visibility", visibility, "interferometer visibility in [0,1]");
    app.add_option("--resamples", resamples, "bootstrap resamples (tomography mode)");
    app.add_option("--out", out_path, "report output path (JSON; sweeps add a .csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        nlm::cli::json doc;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::invalid_argument("cannot read config file '" + config_path + "'");
            is >> doc;
        } else {
            doc = nlm::cli::json::object();
        }
        // Flags win over config-file keys.
        if (!mode.empty()) doc["mode"] = mode;
        if (!preset.empty()) doc["preset"] = preset;
        if (!amps.empty()) doc["amps"] = amps;
        if (!phi_grid_spec.empty()) doc["phi_grid"] = phi_grid_spec;
        if (shots >= 0.0) doc["shots"] = shots;
        if (seed_set) doc["seed"] = seed;
        if (noise_p >= 0.0) doc["noise_p"] = noise_p;
        if (visibility >= 0.0) doc["visibility"] = visibility;
        if (resamples >= 0) doc["resamples"] = resamples;
        if (!out_path.empty()) doc["out"] = out_path;

        const nlm::cli::RunConfig cfg = nlm::cli::parse_config(doc);

        const auto start = std::chrono::steady_clock::now();
        const nlm::cli::RunReport report = nlm::cli::run(cfg);
        const auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start);

        if (!cfg.output_path.empty()) {
            nlm::cli::write_report(report, cfg.output_path);
            std::cout << "report written to " << cfg.output_path << '\n';
        } else {
            std::cout << report.document.dump(2) << '\n';
        }
        std::cout << "elapsed: " << elapsed.count() << " s\n";
        return 0;
    } catch (const nlm::postselection_error &e) {
        std::cerr << "postselection error: " << e.what() << '\n';
        return kExitPostselection;
    } catch (const nlm::invariant_error &e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::exception &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}
