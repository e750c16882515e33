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
//
// Test-only oracles, independent of the library's computation paths.

#pragma once

#include <random>

#include "nlm/protocol.hpp"
#include "nlm/qstate.hpp"

namespace nlm::testing {

inline VectorXcd haar_random_vector(int dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = cplx(g(rng), g(rng));
    return v / v.norm();
}

inline SystemInput haar_random_input(std::mt19937_64 &rng) {
    const VectorXcd v = haar_random_vector(4, rng);
    return SystemInput{{v[0], v[1], v[2], v[3]}};
}

/// Independent matrix exponential e^{iθ H} for Hermitian H, by
/// eigendecomposition. Used as the oracle for closed-form exponentials.
inline MatrixXcd exp_i_hermitian_oracle(double theta, const MatrixXcd &h) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases[k] = std::exp(cplx(0, theta * es.eigenvalues()[k]));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Brute-force partial trace by summing outer-product entries directly.
inline MatrixXcd partial_trace_oracle(const VectorXcd &amps, int n_qubits,
                                      const std::vector<int> &keep_positions) {
    const int m = static_cast<int>(keep_positions.size());
    const int out_dim = 1 << m;
    MatrixXcd out = MatrixXcd::Zero(out_dim, out_dim);
    auto reduced_index = [&](int full) {
        int r = 0;
        for (int p : keep_positions) r = (r << 1) | ((full >> (n_qubits - 1 - p)) & 1);
        return r;
    };
    auto same_env = [&](int a, int b) {
        for (int p = 0; p < n_qubits; ++p) {
            const bool kept =
                std::find(keep_positions.begin(), keep_positions.end(), p) != keep_positions.end();
            if (!kept && (((a >> (n_qubits - 1 - p)) & 1) != ((b >> (n_qubits - 1 - p)) & 1))) {
                return false;
            }
        }
        return true;
    };
    const int dim = 1 << n_qubits;
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
            if (same_env(a, b)) {
                out(reduced_index(a), reduced_index(b)) += amps[a] * std::conj(amps[b]);
            }
        }
    }
    return out;
}

/// Brute-force run of the weak-coupling circuit on the full 5-qubit space
/// (A, B, N_A, N_B, M), built from explicit dense matrices only.
struct BruteForceWeak {
    double p_meter_1;
    MatrixXcd rho_meter0;  // conditional system state, traced over N_B
    MatrixXcd rho_meter1;
};

inline BruteForceWeak brute_force_weak(const SystemInput &input, double phi) {
    using namespace paulis;
    auto embed = [&](const MatrixXcd &u, int pos, int width, int n) {
        MatrixXcd out = MatrixXcd::Identity(1, 1);
        int q = 0;
        while (q < n) {
            if (q == pos) {
                out = nlm::kron(out, u);
                q += width;
            } else {
                out = nlm::kron(out, I());
                q += 1;
            }
        }
        return out;
    };
    // Order (A, B, N_A, N_B, M), A most significant.
    VectorXcd bell(4);
    bell << 1, 0, 0, 1;
    bell /= std::sqrt(2.0);
    VectorXcd meter(2);
    meter << 1, 0;
    VectorXcd state = VectorXcd::Zero(32);
    {
        VectorXcd sys(4);
        for (int i = 0; i < 4; ++i) sys[i] = input.a[static_cast<size_t>(i)];
        sys /= sys.norm();
        // tensor sys(A,B) x bell(N_A,N_B) x meter(M), but register order is
        // (A,B,N_A,N_B,M) so this is a straight Kronecker chain.
        MatrixXcd tmp = nlm::kron(nlm::kron(sys, bell), meter);
        state = Eigen::Map<VectorXcd>(tmp.data(), 32);
    }
    // CNOT(A -> N_A): A is qubit 0, N_A qubit 2 (MSB order).
    MatrixXcd cn = MatrixXcd::Zero(32, 32);
    for (int i = 0; i < 32; ++i) {
        int j = i;
        if ((i >> 4) & 1) j ^= 1 << 2;
        cn(j, i) = 1;
    }
    state = cn * state;
    // Project N_A = 0 and renormalize.
    for (int i = 0; i < 32; ++i) {
        if ((i >> 2) & 1) state[i] = 0;
    }
    state /= state.norm();
    // CNOT(B -> N_B): B qubit 1 (bit 3), N_B qubit 3 (bit 1).
    cn = MatrixXcd::Zero(32, 32);
    for (int i = 0; i < 32; ++i) {
        int j = i;
        if ((i >> 3) & 1) j ^= 1 << 1;
        cn(j, i) = 1;
    }
    state = cn * state;
    // Controlled-e^{-i phi/2 X}(N_B -> M): N_B bit 1, M bit 0.
    MatrixXcd rx = std::cos(phi / 2) * I() - cplx(0, std::sin(phi / 2)) * X();
    MatrixXcd crx = MatrixXcd::Identity(32, 32);
    for (int i = 0; i < 32; ++i) {
        if (((i >> 1) & 1) == 0) continue;
        const int b0 = i & ~1;
        crx(b0, b0) = 0;
        crx(b0 | 1, b0 | 1) = 0;
    }
    for (int i = 0; i < 32; ++i) {
        if (((i >> 1) & 1) && ((i & 1) == 0)) {
            crx(i, i) = rx(0, 0);
            crx(i, i | 1) = rx(0, 1);
            crx(i | 1, i) = rx(1, 0);
            crx(i | 1, i | 1) = rx(1, 1);
        }
    }
    state = crx * state;
    // Erase N_B (bit 1) in the {|+>,|->} basis; the '-' branch gets the local
    // Z (x) Z feedforward correction on (A, B) that undoes the parity sign.
    // Remaining register (A, B, N_A, M), A most significant.
    std::array<VectorXcd, 2> erased{VectorXcd::Zero(16), VectorXcd::Zero(16)};
    for (int k = 0; k < 16; ++k) {
        const int hi = (k >> 1) & 0x7;  // A, B, N_A bits
        const int i0 = (hi << 2) | (k & 1);
        const int i1 = i0 | 2;
        erased[0][k] = (state[i0] + state[i1]) / std::sqrt(2.0);
        cplx minus = (state[i0] - state[i1]) / std::sqrt(2.0);
        const int a = (k >> 3) & 1, b = (k >> 2) & 1;
        if ((a ^ b) != 0) minus = -minus;
        erased[1][k] = minus;
    }
    BruteForceWeak out{0.0, MatrixXcd::Zero(4, 4), MatrixXcd::Zero(4, 4)};
    std::array<double, 2> meter_p{0.0, 0.0};
    std::array<MatrixXcd, 2> accum{MatrixXcd::Zero(4, 4), MatrixXcd::Zero(4, 4)};
    for (int e = 0; e < 2; ++e) {
        for (int m = 0; m < 2; ++m) {
            VectorXcd branch = erased[static_cast<size_t>(e)];
            for (int k = 0; k < 16; ++k) {
                if ((k & 1) != m) branch[k] = 0;
            }
            const double p = branch.squaredNorm();
            meter_p[static_cast<size_t>(m)] += p;
            if (p > 1e-15) {
                accum[static_cast<size_t>(m)] +=
                    p * partial_trace_oracle(branch / std::sqrt(p), 4, {0, 1});
            }
        }
    }
    if (meter_p[0] > 1e-15) out.rho_meter0 = accum[0] / meter_p[0];
    if (meter_p[1] > 1e-15) out.rho_meter1 = accum[1] / meter_p[1];
    out.p_meter_1 = meter_p[1];
    return out;
}

inline double total_variation(std::initializer_list<std::pair<double, double>> pairs) {
    double tv = 0.0;
    for (const auto &[a, b] : pairs) tv += std::abs(a - b);
    return tv / 2.0;
}

}  // namespace nlm::testing
