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
 * Finite-shot two-qubit tomography: Poissonian coincidence counts over the
 * 36 pairings of the {H,V,D,A,R,L} projectors, linear-inversion
 * reconstruction with PSD repair, and parametric-bootstrap error bars for
 * fidelity and branch probability.
 */

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlm/measurement.hpp"
#include "nlm/qstate.hpp"

namespace nlm::tomo {

inline constexpr std::string_view kBasisLabels = "HVDARL";

inline Eigen::Vector2cd basis_ket(char label) {
    const double s = std::sqrt(0.5);
    switch (label) {
        case 'H': return {1.0, 0.0};
        case 'V': return {0.0, 1.0};
        case 'D': return {s, s};
        case 'A': return {s, -s};
        case 'R': return {s, cplx(0, s)};
        case 'L': return {s, cplx(0, -s)};
        default: throw std::invalid_argument(std::string("unknown basis label '") + label + "'");
    }
}

struct TomographySetting {
    char basis_A;
    char basis_B;
};

/// The 36 projector pairings, row-major in (A, B).
inline std::vector<TomographySetting> all_settings() {
    std::vector<TomographySetting> s;
    for (char a : kBasisLabels) {
        for (char b : kBasisLabels) s.push_back({a, b});
    }
    return s;
}

inline Eigen::Matrix4cd setting_projector(const TomographySetting &s) {
    const Eigen::Vector2cd va = basis_ket(s.basis_A);
    const Eigen::Vector2cd vb = basis_ket(s.basis_B);
    const Eigen::Matrix2cd pa = va * va.adjoint();
    const Eigen::Matrix2cd pb = vb * vb.adjoint();
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = pa(i, j) * pb;
    }
    return out;
}

struct CountsTable {
    std::vector<TomographySetting> settings;
    std::vector<long long> counts;
    double mean_shots = 0.0;
    uint64_t seed = 0;

    long long total() const {
        long long t = 0;
        for (long long c : counts) t += c;
        return t;
    }

    void to_csv(std::ostream &os) const {
        os << "basisA,basisB,count\n";
        for (size_t i = 0; i < settings.size(); ++i) {
            os << settings[i].basis_A << ',' << settings[i].basis_B << ',' << counts[i] << '\n';
        }
    }
    static CountsTable from_csv(std::istream &is, double mean_shots) {
        CountsTable t;
        t.mean_shots = mean_shots;
        std::string line;
        std::getline(is, line);  // header
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string a, b, c;
            std::getline(ls, a, ',');
            std::getline(ls, b, ',');
            std::getline(ls, c, ',');
            if (a.size() != 1 || b.size() != 1) throw std::invalid_argument("malformed CSV row");
            t.settings.push_back({a[0], b[0]});
            t.counts.push_back(std::stoll(c));
        }
        return t;
    }
};

inline long long draw_poisson(double mean, RngStream &rng) {
    if (mean < 0.0) throw std::invalid_argument("negative Poisson mean");
    if (mean == 0.0) return 0;
    return std::poisson_distribution<long long>(mean)(rng.engine());
}

/// Per setting: expected rate mean_shots × Tr(ρ Π), count ~ Poisson(rate).
inline CountsTable simulate_counts(const DensityMatrix &rho,
                                   const std::vector<TomographySetting> &settings,
                                   double mean_shots, uint64_t seed) {
    if (rho.entries.rows() != 4) throw std::invalid_argument("tomography expects a 2-qubit state");
    if (mean_shots <= 0.0) throw std::invalid_argument("mean_shots must be positive");
    validate_density(rho);
    RngStream rng(seed);
    CountsTable t;
    t.settings = settings;
    t.mean_shots = mean_shots;
    t.seed = seed;
    for (const auto &s : settings) {
        const double p = std::max(0.0, (rho.entries * setting_projector(s)).trace().real());
        t.counts.push_back(draw_poisson(mean_shots * p, rng));
    }
    return t;
}

namespace detail {
/// Bloch components (Tr(|v⟩⟨v| σ_i), i = I,X,Y,Z) of a basis projector.
inline Eigen::Vector4d bloch_of(char label) {
    switch (label) {
        case 'H': return {1, 0, 0, 1};
        case 'V': return {1, 0, 0, -1};
        case 'D': return {1, 1, 0, 0};
        case 'A': return {1, -1, 0, 0};
        case 'R': return {1, 0, 1, 0};
        case 'L': return {1, 0, -1, 0};
        default: throw std::invalid_argument("unknown basis label");
    }
}
inline const Eigen::Matrix2cd &pauli_by_index(int i) {
    switch (i) {
        case 0: return paulis::I();
        case 1: return paulis::X();
        case 2: return paulis::Y();
        default: return paulis::Z();
    }
}
}  // namespace detail

/// Linear inversion from probabilities: least squares in the two-qubit Pauli
/// basis (36 equations, 16 real coefficients), exact in the noiseless case.
inline DensityMatrix reconstruct_from_probabilities(
    const std::vector<TomographySetting> &settings, const std::vector<double> &probs) {
    if (settings.size() != probs.size() || settings.size() < 16) {
        throw std::invalid_argument("reconstruction needs an informationally complete setting set");
    }
    Eigen::MatrixXd design(static_cast<Eigen::Index>(settings.size()), 16);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(settings.size()));
    for (size_t s = 0; s < settings.size(); ++s) {
        const Eigen::Vector4d ma = detail::bloch_of(settings[s].basis_A);
        const Eigen::Vector4d mb = detail::bloch_of(settings[s].basis_B);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                design(static_cast<Eigen::Index>(s), 4 * i + j) = ma[i] * mb[j] / 4.0;
            }
        }
        rhs[static_cast<Eigen::Index>(s)] = probs[s];
    }
    const Eigen::VectorXd c = design.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    MatrixXcd rho = MatrixXcd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            rho += (c[4 * i + j] / 4.0) *
                   kron(detail::pauli_by_index(i), detail::pauli_by_index(j));
        }
    }
    // PSD repair: clip negative eigenvalues, renormalize the trace.
    const MatrixXcd herm = (rho + rho.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    const double tr = ev.sum();
    if (tr < 1e-12) throw std::invalid_argument("reconstruction has vanishing trace");
    ev /= tr;
    MatrixXcd repaired =
        es.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<cplx>() * es.eigenvectors().adjoint();
    return DensityMatrix{QubitRegister{"A", "B"}, std::move(repaired)};
}

inline DensityMatrix reconstruct(const CountsTable &counts) {
    if (counts.mean_shots <= 0.0) throw std::invalid_argument("counts table lacks mean_shots");
    if (counts.total() == 0) throw std::invalid_argument("all counts are zero");
    std::vector<double> probs(counts.counts.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        probs[i] = static_cast<double>(counts.counts[i]) / counts.mean_shots;
    }
    return reconstruct_from_probabilities(counts.settings, probs);
}

struct EstimateWithError {
    double value = 0.0;
    double sigma = 0.0;
};

struct BranchEstimates {
    EstimateWithError F_plus, F_minus, P_plus, P_minus;
};

namespace detail {
/// Branch-total counts in the {H,V} setting block, per the counting-based
/// probability estimate.
inline long long hv_block_total(const CountsTable &t) {
    long long n = 0;
    for (size_t i = 0; i < t.settings.size(); ++i) {
        const bool hv_a = t.settings[i].basis_A == 'H' || t.settings[i].basis_A == 'V';
        const bool hv_b = t.settings[i].basis_B == 'H' || t.settings[i].basis_B == 'V';
        if (hv_a && hv_b) n += t.counts[i];
    }
    return n;
}

struct PipelinePoint {
    double f_plus, f_minus, p_plus, p_minus;
};

inline PipelinePoint run_pipeline(const CountsTable &plus, const CountsTable &minus,
                                  const DensityMatrix &ideal_plus,
                                  const DensityMatrix &ideal_minus) {
    PipelinePoint pt{};
    pt.f_plus = fidelity(reconstruct(plus), ideal_plus);
    pt.f_minus = fidelity(reconstruct(minus), ideal_minus);
    const double n_plus = static_cast<double>(hv_block_total(plus));
    const double n_minus = static_cast<double>(hv_block_total(minus));
    if (n_plus + n_minus <= 0.0) throw std::invalid_argument("zero total counts");
    pt.p_plus = n_plus / (n_plus + n_minus);
    pt.p_minus = n_minus / (n_plus + n_minus);
    return pt;
}

inline CountsTable resample(const CountsTable &t, RngStream &rng) {
    CountsTable out = t;
    for (auto &c : out.counts) c = draw_poisson(static_cast<double>(c), rng);
    return out;
}
}  // namespace detail

/// Fidelity via reconstruction, probability from branch count totals, sigmas
/// from a parametric bootstrap (counts resampled Poisson around the observed
/// values, pipeline re-run, standard deviation reported).
inline BranchEstimates estimate_fidelity_and_probability(
    const CountsTable &counts_plus, const CountsTable &counts_minus,
    const DensityMatrix &ideal_plus, const DensityMatrix &ideal_minus, int resamples,
    uint64_t seed) {
    if (resamples < 100) throw std::invalid_argument("need at least 100 bootstrap resamples");
    const detail::PipelinePoint center =
        detail::run_pipeline(counts_plus, counts_minus, ideal_plus, ideal_minus);

    std::vector<detail::PipelinePoint> pts;
    pts.reserve(static_cast<size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        RngStream rng(seed, static_cast<uint64_t>(r) + 1);
        const CountsTable rp = detail::resample(counts_plus, rng);
        const CountsTable rm = detail::resample(counts_minus, rng);
        pts.push_back(detail::run_pipeline(rp, rm, ideal_plus, ideal_minus));
    }
    auto sigma_of = [&](auto field) {
        double mean = 0.0;
        for (const auto &p : pts) mean += p.*field;
        mean /= static_cast<double>(pts.size());
        double var = 0.0;
        for (const auto &p : pts) var += (p.*field - mean) * (p.*field - mean);
        return std::sqrt(var / static_cast<double>(pts.size() - 1));
    };
    BranchEstimates est;
    est.F_plus = {center.f_plus, sigma_of(&detail::PipelinePoint::f_plus)};
    est.F_minus = {center.f_minus, sigma_of(&detail::PipelinePoint::f_minus)};
    est.P_plus = {center.p_plus, sigma_of(&detail::PipelinePoint::p_plus)};
    est.P_minus = {center.p_minus, sigma_of(&detail::PipelinePoint::p_minus)};
    return est;
}

/// (1−p)ρ + p·I/4.
inline DensityMatrix apply_depolarizing(const DensityMatrix &rho, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing strength must lie in [0,1]");
    const Eigen::Index d = rho.entries.rows();
    MatrixXcd out = (1.0 - p) * rho.entries +
                    (p / static_cast<double>(d)) * MatrixXcd::Identity(d, d);
    return DensityMatrix{rho.reg, std::move(out)};
}

}  // namespace nlm::tomo
