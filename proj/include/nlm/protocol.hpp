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
 * The six-step nonlocal measurement of σz⊗σz via an ancilla Bell pair, a
 * local meter and quantum erasure; its weak-coupling variant; the
 * local-rotation generalization to arbitrary product Pauli observables; and
 * the closed-form analytic oracle the circuit is checked against.
 *
 * Circuit (strong coupling):
 *   1. CNOT(A → N_A)
 *   2. measure N_A in {|0⟩,|1⟩}, keep |0⟩         (succeeds with prob 1/2)
 *   3. CNOT(B → N_B)
 *   4. CNOT(N_B → M)
 *   5. erase N_B in {|+⟩,|−⟩}                     (each branch prob 1/2)
 *   6. read the meter: |0⟩ ↦ outcome +1, |1⟩ ↦ outcome −1
 */

#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "nlm/gates.hpp"
#include "nlm/measurement.hpp"
#include "nlm/qstate.hpp"

namespace nlm {

/// Two-qubit system amplitudes (a1..a4) over |00⟩,|01⟩,|10⟩,|11⟩ in the
/// (A,B) ordering, A most significant.
struct SystemInput {
    std::array<cplx, 4> a;

    VectorXcd vec() const {
        VectorXcd v(4);
        for (int i = 0; i < 4; ++i) v[i] = a[static_cast<size_t>(i)];
        return v;
    }
    PureState state() const { return new_pure(QubitRegister{"A", "B"}, vec()); }
};

enum class ErasurePolicy { KeepPlus, KeepBoth };

struct ProtocolResult {
    int outcome = 0;                           // +1 or −1
    double probability = 0.0;                  // given the kept post-selections
    std::optional<PureState> conditional_state;  // over {A,B}; absent if prob ~ 0
    double step2_success_prob = 0.0;
    char erasure_outcome = '+';
    double erasure_prob = 0.0;
};

/// Pauli-product observable P_A ⊗ P_B to measure via local rotations.
enum class Pauli { X, Y, Z };
struct ObservableSpec {
    Pauli pauli_A;
    Pauli pauli_B;
};

/// Meter pointer convention: |q⟩ = cos(q/2)|0⟩ + i sin(q/2)|1⟩, so that
/// e^{±iπ/4 σx} shifts the zenith angle q by ±π/2.
struct MeterPointer {
    PureState state;
    double zenith_q;

    static MeterPointer from_zenith(double q) {
        if (q < 0.0 || q > std::numbers::pi) {
            throw std::invalid_argument("zenith angle must lie in [0, pi]");
        }
        VectorXcd v(2);
        v[0] = std::cos(q / 2.0);
        v[1] = cplx(0, std::sin(q / 2.0));
        return MeterPointer{new_pure(QubitRegister{"M"}, v), q};
    }
    static double zenith_of(const PureState &s) {
        if (s.amps.size() != 2) throw std::invalid_argument("meter state must be one qubit");
        const double q = 2.0 * std::atan2(std::abs(s.amps[1]), std::abs(s.amps[0]));
        const MeterPointer ref = from_zenith(q);
        if (1.0 - overlap2(s, ref.state) > 1e-9) {
            throw std::invalid_argument("state is not a pointer state for any zenith angle");
        }
        return q;
    }
};

namespace detail {
inline PureState assemble_initial(const SystemInput &input) {
    VectorXcd bell(4);
    bell << 1, 0, 0, 1;
    const PureState ancilla = new_pure(QubitRegister{"N_A", "N_B"}, bell);
    const PureState meter = basis_state(QubitRegister{"M"}, 0);
    return tensor(tensor(input.state(), ancilla), meter);
}
}  // namespace detail

/// State over (A, B, N_B, M) after step 4, for direct comparison with the
/// analytic intermediate state. Post-selection of N_A = |0⟩ already applied.
inline PureState state_after_step4(const SystemInput &input, double *step2_prob = nullptr) {
    PureState s = detail::assemble_initial(input);
    s = apply_cnot(s, "A", "N_A");
    MeasurementRecord step2 = project(s, "N_A", computational_basis(), 0);
    if (step2_prob) *step2_prob = step2.probability;
    s = *step2.post_state;
    s = apply_cnot(s, "B", "N_B");
    return apply_cnot(s, "N_B", "M");
}

inline std::vector<ProtocolResult> run_strong(const SystemInput &input,
                                              ErasurePolicy policy = ErasurePolicy::KeepBoth) {
    double step2_prob = 0.0;
    const PureState s4 = state_after_step4(input, &step2_prob);

    std::vector<ProtocolResult> results;
    const int n_branches = (policy == ErasurePolicy::KeepBoth) ? 2 : 1;
    for (int e = 0; e < n_branches; ++e) {
        MeasurementRecord erased = project(s4, "N_B", plus_minus_basis(), e);
        const PureState &s5 = *erased.post_state;  // (A, B, M)
        for (int m = 0; m < 2; ++m) {
            ProtocolResult r;
            r.outcome = (m == 0) ? +1 : -1;
            r.step2_success_prob = step2_prob;
            r.erasure_outcome = (e == 0) ? '+' : '-';
            r.erasure_prob = erased.probability;
            // Meter branch amplitude without renormalizing through project(),
            // so zero-probability outcomes are reported rather than thrown.
            VectorXcd branch(4);
            for (int ab = 0; ab < 4; ++ab) {
                branch[ab] = s5.amps[2 * ab + m];
            }
            r.probability = branch.squaredNorm();
            if (r.probability >= 1e-12) {
                r.conditional_state =
                    PureState{QubitRegister{"A", "B"}, branch / std::sqrt(r.probability)};
            }
            results.push_back(std::move(r));
        }
    }
    return results;
}

struct WeakResult {
    double p_meter_1 = 0.0;
    double step2_success_prob = 0.0;
    /// Conditional post-measurement system state per outcome (+1 for meter
    /// |0⟩, −1 for meter |1⟩), mixed over the erasure branches. Absent when
    /// the outcome has zero probability.
    std::map<int, std::optional<DensityMatrix>> conditional_states;
};

/// Weak variant: CNOT(N_B → M) replaced by controlled-e^{−iφ/2 σx}.
/// p(meter = 1) = P− sin²(φ/2); φ = π reproduces run_strong, φ = 0 leaves
/// the system untouched.
inline WeakResult run_weak(const SystemInput &input, CouplingAngle phi) {
    PureState s = detail::assemble_initial(input);
    s = apply_cnot(s, "A", "N_A");
    MeasurementRecord step2 = project(s, "N_A", computational_basis(), 0);
    s = *step2.post_state;
    s = apply_cnot(s, "B", "N_B");
    s = apply_controlled_rx(s, "N_B", "M", phi);

    WeakResult out;
    out.step2_success_prob = step2.probability;
    std::array<double, 2> meter_prob{0.0, 0.0};
    std::array<MatrixXcd, 2> accum{MatrixXcd::Zero(4, 4), MatrixXcd::Zero(4, 4)};
    for (int e = 0; e < 2; ++e) {
        MeasurementRecord erased = project(s, "N_B", plus_minus_basis(), e);
        const PureState &s5 = *erased.post_state;  // (A, B, M)
        for (int m = 0; m < 2; ++m) {
            VectorXcd branch(4);
            for (int ab = 0; ab < 4; ++ab) branch[ab] = s5.amps[2 * ab + m];
            if (e == 1) {
                // Feedforward on the |-> erasure outcome: local Z at each
                // site cancels the parity sign the erasure imprints.
                branch[1] = -branch[1];
                branch[2] = -branch[2];
            }
            const double p = branch.squaredNorm() * erased.probability;
            meter_prob[static_cast<size_t>(m)] += p;
            accum[static_cast<size_t>(m)] += erased.probability * (branch * branch.adjoint());
        }
    }
    out.p_meter_1 = meter_prob[1];
    for (int m = 0; m < 2; ++m) {
        const int label = (m == 0) ? +1 : -1;
        if (meter_prob[static_cast<size_t>(m)] < 1e-12) {
            out.conditional_states[label] = std::nullopt;
        } else {
            out.conditional_states[label] = DensityMatrix{
                QubitRegister{"A", "B"}, accum[static_cast<size_t>(m)] / meter_prob[static_cast<size_t>(m)]};
        }
    }
    return out;
}

/// Basis-change unitaries realizing a general product Pauli observable: the
/// pre-rotation maps the target Pauli's eigenbasis to the computational
/// basis, the post-rotation undoes it on the conditional outputs.
struct ObservableRotations {
    Eigen::Matrix2cd pre_A, pre_B;    // applied before step 1
    Eigen::Matrix2cd post_A, post_B;  // applied after step 6
};

inline Eigen::Matrix2cd pauli_basis_rotation(Pauli p) {
    switch (p) {
        case Pauli::Z: return paulis::I();
        case Pauli::X: return paulis::H();
        case Pauli::Y: return paulis::RY_BASIS();
    }
    throw std::invalid_argument("unknown Pauli label");
}

inline ObservableRotations rotate_observable(const ObservableSpec &spec) {
    ObservableRotations r;
    r.pre_A = pauli_basis_rotation(spec.pauli_A);
    r.pre_B = pauli_basis_rotation(spec.pauli_B);
    r.post_A = r.pre_A.adjoint();
    r.post_B = r.pre_B.adjoint();
    return r;
}

/// Spectral projectors of pauli_A ⊗ pauli_B, obtained by conjugating the
/// σzσz projectors with the basis-change rotations.
inline KrausSet observable_kraus(const ObservableSpec &spec) {
    const ObservableRotations r = rotate_observable(spec);
    const MatrixXcd u = kron(r.pre_A, r.pre_B);
    KrausSet zz = zz_kraus();
    for (auto &op : zz.operators) op = u.adjoint() * op * u;
    return zz;
}

/// Runs the σzσz protocol conjugated to measure an arbitrary Pauli product.
inline std::vector<ProtocolResult> run_strong_rotated(
    const SystemInput &input, const ObservableSpec &spec,
    ErasurePolicy policy = ErasurePolicy::KeepBoth) {
    const ObservableRotations rot = rotate_observable(spec);
    PureState rotated = input.state();
    rotated = apply_single(rotated, rot.pre_A, "A");
    rotated = apply_single(rotated, rot.pre_B, "B");
    SystemInput conj_input;
    for (int i = 0; i < 4; ++i) conj_input.a[static_cast<size_t>(i)] = rotated.amps[i];
    std::vector<ProtocolResult> results = run_strong(conj_input, policy);
    for (auto &r : results) {
        if (r.conditional_state) {
            PureState s = apply_single(*r.conditional_state, rot.post_A, "A");
            r.conditional_state = apply_single(s, rot.post_B, "B");
        }
    }
    return results;
}

struct AnalyticExpected {
    double p_plus = 0.0;
    double p_minus = 0.0;
    std::optional<PureState> psi_plus;   // ∝ a1|00⟩ + a4|11⟩
    std::optional<PureState> psi_minus;  // ∝ a2|01⟩ + a3|10⟩
};

/// Closed-form oracle from the Π± projections; never touches the circuit.
inline AnalyticExpected analytic_expected(const SystemInput &input) {
    const PureState s = input.state();
    AnalyticExpected out;
    VectorXcd plus = VectorXcd::Zero(4), minus = VectorXcd::Zero(4);
    plus[0] = s.amps[0];
    plus[3] = s.amps[3];
    minus[1] = s.amps[1];
    minus[2] = s.amps[2];
    out.p_plus = plus.squaredNorm();
    out.p_minus = minus.squaredNorm();
    if (out.p_plus >= 1e-12) {
        out.psi_plus = PureState{QubitRegister{"A", "B"}, plus / std::sqrt(out.p_plus)};
    }
    if (out.p_minus >= 1e-12) {
        out.psi_minus = PureState{QubitRegister{"A", "B"}, minus / std::sqrt(out.p_minus)};
    }
    return out;
}

/// The four input states used in the reference experiment.
/// phi1 = |+⟩|0⟩, phi2 = |+⟩|+⟩, phi3 = |+⟩|R⟩,
/// phi4 = (√2|0⟩+|1⟩)(√2|0⟩+|1⟩)/3.
inline SystemInput preset_input(const std::string &name) {
    const double s2 = std::sqrt(0.5);
    const double r2 = std::sqrt(2.0);
    if (name == "phi1") return SystemInput{{s2, 0.0, s2, 0.0}};
    if (name == "phi2") return SystemInput{{0.5, 0.5, 0.5, 0.5}};
    if (name == "phi3") return SystemInput{{0.5, cplx(0, 0.5), 0.5, cplx(0, 0.5)}};
    if (name == "phi4") return SystemInput{{2.0 / 3, r2 / 3, r2 / 3, 1.0 / 3}};
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace nlm
