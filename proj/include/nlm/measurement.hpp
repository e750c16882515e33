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
 * Projective measurement with register shrinking, post-selection probability
 * tracking, Kraus-channel (projector set) application, and seeded sampling.
 */

#pragma once

#include <optional>
#include <random>
#include <vector>

#include "nlm/gates.hpp"
#include "nlm/qstate.hpp"

namespace nlm {

/// A projector pair (or set) with outcome labels. For the σzσz observable the
/// operators are Π+ = |00⟩⟨00|+|11⟩⟨11| and Π− = |01⟩⟨01|+|10⟩⟨10|.
struct KrausSet {
    std::vector<int> labels;
    std::vector<MatrixXcd> operators;

    void validate() const {
        if (labels.size() != operators.size() || operators.empty()) {
            throw std::invalid_argument("KrausSet: labels/operators mismatch");
        }
        MatrixXcd sum = MatrixXcd::Zero(operators[0].rows(), operators[0].cols());
        for (const auto &k : operators) {
            if ((k - k.adjoint()).cwiseAbs().maxCoeff() > kDriftTol ||
                (k * k - k).cwiseAbs().maxCoeff() > kDriftTol) {
                throw invariant_error("Kraus operator is not a Hermitian projector");
            }
            sum += k.adjoint() * k;
        }
        if ((sum - MatrixXcd::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff() > kDriftTol) {
            throw invariant_error("Kraus operators do not sum to identity");
        }
    }
};

struct MeasurementRecord {
    int outcome = 0;
    double probability = 0.0;
    std::optional<PureState> post_state;  // absent for zero-probability outcomes
};

/// σzσz spectral projectors over a two-qubit register, labels {+1, −1}.
inline KrausSet zz_kraus() {
    MatrixXcd plus = MatrixXcd::Zero(4, 4);
    plus(0, 0) = plus(3, 3) = 1.0;
    MatrixXcd minus = MatrixXcd::Zero(4, 4);
    minus(1, 1) = minus(2, 2) = 1.0;
    return KrausSet{{+1, -1}, {plus, minus}};
}

/// Projects qubit `q` onto column `outcome_index` of `basis` (columns are the
/// basis vectors). The measured qubit is removed from the register; the
/// returned post-state covers the remaining roles, renormalized.
inline MeasurementRecord project(const PureState &s, const std::string &q,
                                 const Eigen::Matrix2cd &basis, int outcome_index) {
    if ((basis.adjoint() * basis - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() >
        kDriftTol) {
        throw std::invalid_argument("measurement basis is not orthonormal");
    }
    if (outcome_index != 0 && outcome_index != 1) {
        throw std::invalid_argument("outcome index must be 0 or 1");
    }
    const size_t bit = s.reg.index_of(q);
    std::vector<std::string> remaining;
    for (const auto &r : s.reg.roles()) {
        if (r != q) remaining.push_back(r);
    }
    const Eigen::Vector2cd v = basis.col(outcome_index);

    const size_t out_dim = s.reg.dim() / 2;
    VectorXcd out(static_cast<Eigen::Index>(std::max<size_t>(out_dim, 1)));
    const size_t low_mask = (size_t{1} << bit) - 1;
    for (size_t r = 0; r < out_dim; ++r) {
        const size_t spread = ((r & ~low_mask) << 1) | (r & low_mask);
        const cplx a0 = s.amps[static_cast<Eigen::Index>(spread)];
        const cplx a1 = s.amps[static_cast<Eigen::Index>(spread | (size_t{1} << bit))];
        out[static_cast<Eigen::Index>(r)] = std::conj(v[0]) * a0 + std::conj(v[1]) * a1;
    }
    const double prob = out.squaredNorm();
    if (prob < 1e-12) {
        throw postselection_error("requested measurement outcome has zero probability");
    }
    MeasurementRecord rec;
    rec.outcome = outcome_index;
    rec.probability = prob;
    if (!remaining.empty()) {
        rec.post_state = PureState{QubitRegister(remaining), out / std::sqrt(prob)};
    }
    return rec;
}

inline const Eigen::Matrix2cd &computational_basis() {
    static const Eigen::Matrix2cd b = Eigen::Matrix2cd::Identity();
    return b;
}

inline const Eigen::Matrix2cd &plus_minus_basis() {
    static const Eigen::Matrix2cd b = paulis::H();  // columns |+⟩, |−⟩
    return b;
}

/// Applies a projector set over the full register: one record per outcome.
/// Zero-probability outcomes come back flagged (probability 0, no state).
inline std::vector<MeasurementRecord> kraus_apply(const PureState &s, const KrausSet &ks) {
    ks.validate();
    if (ks.operators[0].rows() != s.amps.size()) {
        throw std::invalid_argument("Kraus operators do not act on this register");
    }
    std::vector<MeasurementRecord> records;
    double total = 0.0;
    for (size_t i = 0; i < ks.operators.size(); ++i) {
        const VectorXcd branch = ks.operators[i] * s.amps;
        MeasurementRecord rec;
        rec.outcome = ks.labels[i];
        rec.probability = branch.squaredNorm();
        total += rec.probability;
        if (rec.probability >= 1e-12) {
            rec.post_state = PureState{s.reg, branch / std::sqrt(rec.probability)};
        }
        records.push_back(std::move(rec));
    }
    if (std::abs(total - 1.0) > kDriftTol) {
        throw invariant_error("Kraus outcome probabilities do not sum to 1");
    }
    return records;
}

/// Deterministic seedable RNG stream. Parallel consumers derive independent
/// streams by mixing a stream index into the root seed.
class RngStream {
  public:
    explicit RngStream(uint64_t seed, uint64_t stream = 0)
        : engine_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}
    std::mt19937_64 &engine() { return engine_; }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  private:
    std::mt19937_64 engine_;
};

inline int sample_outcome(const std::vector<MeasurementRecord> &records, RngStream &rng) {
    double total = 0.0;
    for (const auto &r : records) {
        if (r.probability < 0.0) throw std::invalid_argument("negative probability");
        total += r.probability;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("outcome probabilities do not sum to 1");
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (const auto &r : records) {
        acc += r.probability;
        if (u < acc) return r.outcome;
    }
    return records.back().outcome;
}

}  // namespace nlm
