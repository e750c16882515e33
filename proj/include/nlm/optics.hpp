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
 * Linear-optics realization of the nonlocal measurement over two photons
 * carrying (polarization, path, OAM) qubit triples.
 *
 * Encoding: polarization = system qubits (H=0, V=1); the OAM Bell pair
 * (|rr⟩−|ll⟩)/√2 plays the role of the entangled ancilla (r=0, l=1); photon
 * 2's path mode, prepared in |d⟩ (d=0, u=1), is the remaining local ancilla.
 * At the second party the two local ancilla roles are swapped relative to
 * the abstract circuit (path is erased, OAM is read out as the meter), which
 * leaves the statistics unchanged.
 */

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nlm/gates.hpp"
#include "nlm/measurement.hpp"
#include "nlm/protocol.hpp"
#include "nlm/qstate.hpp"

namespace nlm::optics {

inline const std::vector<std::string> &mode_roles() {
    static const std::vector<std::string> roles = {"P1pol", "P1path", "P1oam",
                                                   "P2pol", "P2path", "P2oam"};
    return roles;
}

struct TwoPhotonState {
    PureState state;  // register = mode_roles()
};

enum class ElementKind { PBS, HWP, QWP, DovePrism, SPP, BS_OAM, PathPrismBS, Compensator };

/// One optical element. `photon` is 1 or 2; `theta` applies to wave plates
/// (radians from the H axis).
struct OpticalElement {
    ElementKind kind;
    int photon = 1;
    double theta = 0.0;
};

namespace roles {
inline std::string pol(int photon) { return "P" + std::to_string(photon) + "pol"; }
inline std::string path(int photon) { return "P" + std::to_string(photon) + "path"; }
inline std::string oam(int photon) { return "P" + std::to_string(photon) + "oam"; }
}  // namespace roles

/// |ψ⟩_0 = (a1|HH⟩+a2|HV⟩+a3|VH⟩+a4|VV⟩) ⊗ (|rr⟩−|ll⟩)/√2 ⊗ |dd⟩.
inline TwoPhotonState encode_initial(const SystemInput &input) {
    const PureState pols = new_pure(QubitRegister{"P1pol", "P2pol"}, input.vec());
    VectorXcd oam_bell(4);
    oam_bell << 1, 0, 0, -1;
    const PureState oams = new_pure(QubitRegister{"P1oam", "P2oam"}, oam_bell);
    const PureState paths = basis_state(QubitRegister{"P1path", "P2path"}, 0);
    PureState s = tensor(tensor(pols, paths), oams);
    // Reorder to the canonical per-photon (pol, path, oam) register.
    VectorXcd out(64);
    QubitRegister canonical(mode_roles());
    for (size_t i = 0; i < 64; ++i) {
        size_t j = 0;
        for (const auto &r : mode_roles()) {
            j = (j << 1) | static_cast<size_t>(s.reg.bit_of(i, r));
        }
        out[static_cast<Eigen::Index>(j)] = s.amps[static_cast<Eigen::Index>(i)];
    }
    return TwoPhotonState{PureState{canonical, std::move(out)}};
}

/// Jones matrices. HWP(θ) = R(θ) diag(1,−1) R(−θ), QWP(θ) = R(θ) diag(1,i) R(−θ).
inline Eigen::Matrix2cd hwp_matrix(double theta) {
    Eigen::Matrix2cd m;
    m << std::cos(2 * theta), std::sin(2 * theta), std::sin(2 * theta), -std::cos(2 * theta);
    return m;
}
inline Eigen::Matrix2cd qwp_matrix(double theta) {
    Eigen::Matrix2cd rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Matrix2cd ret = Eigen::Matrix2cd::Zero();
    ret(0, 0) = 1.0;
    ret(1, 1) = cplx(0, 1);
    return rot * ret * rot.transpose();
}

/// The mode unitary an element induces, together with the roles it touches
/// (most significant first). SPP and PathPrismBS are detection steps, not
/// unitaries, and are applied through the readout path in run_setup.
struct ElementUnitary {
    GateMatrix gate;
    std::vector<std::string> touched;
};

inline ElementUnitary element_unitary(const OpticalElement &e) {
    using namespace roles;
    switch (e.kind) {
        case ElementKind::PBS: {
            // H transmits (path kept), V reflects (path flipped): a CNOT with
            // polarization controlling path.
            return ElementUnitary{GateMatrix(cnot_matrix()), {pol(e.photon), path(e.photon)}};
        }
        case ElementKind::HWP:
            return ElementUnitary{GateMatrix(hwp_matrix(e.theta)), {pol(e.photon)}};
        case ElementKind::QWP:
            return ElementUnitary{GateMatrix(qwp_matrix(e.theta)), {pol(e.photon)}};
        case ElementKind::DovePrism: {
            // Sits in the up arm: OAM NOT on the path = |u⟩ amplitude.
            return ElementUnitary{GateMatrix(cnot_matrix()), {path(e.photon), oam(e.photon)}};
        }
        case ElementKind::BS_OAM: {
            // 50:50 splitter, OAM-preserving in transmission, i-phase and
            // OAM swap in reflection.
            const MatrixXcd u =
                (kron(paulis::I(), paulis::I()) + cplx(0, 1) * kron(paulis::X(), paulis::X())) /
                std::sqrt(2.0);
            return ElementUnitary{GateMatrix(u), {path(e.photon), oam(e.photon)}};
        }
        case ElementKind::Compensator:
            return ElementUnitary{GateMatrix(Eigen::Matrix2cd::Identity()), {path(e.photon)}};
        case ElementKind::SPP:
        case ElementKind::PathPrismBS:
            throw std::invalid_argument("element is a detector, not a unitary");
    }
    throw std::invalid_argument("unknown element kind");
}

/// A detection step: project `role` onto column `outcome` of `basis` and
/// drop the mode from the register.
struct DetectionStep {
    std::string role;
    Eigen::Matrix2cd basis;
    int outcome;
    std::string label;
};

using AssemblyStep = std::variant<OpticalElement, DetectionStep>;

/// Alice's interferometer: PBS splits H/d from V/u, a Dove prism in the up
/// (V) arm NOTs the OAM, and an HWP(45°)/PBS/HWP(45°) sandwich recombines the
/// paths — net effect a polarization-controlled OAM NOT. The SPP then reads
/// the OAM out in {|r⟩,|l⟩}; the kept |r⟩→|G⟩ port is the abstract step-2
/// post-selection. The final HWP(0°) cancels the sign the (|rr⟩−|ll⟩)
/// ancilla term puts on the V branch.
inline std::vector<AssemblyStep> assemble_alice() {
    return {
        OpticalElement{ElementKind::PBS, 1},
        OpticalElement{ElementKind::DovePrism, 1},
        OpticalElement{ElementKind::Compensator, 1},
        OpticalElement{ElementKind::HWP, 1, std::numbers::pi / 4},
        OpticalElement{ElementKind::PBS, 1},
        OpticalElement{ElementKind::HWP, 1, std::numbers::pi / 4},
        DetectionStep{roles::oam(1), computational_basis(), 0, "alice_spp_r_port"},
        OpticalElement{ElementKind::HWP, 1, 0.0},
    };
}

/// Bob's interferometer: PBS routes polarization to path (CNOT), the Dove
/// prism in the up path NOTs the OAM (path-controlled CNOT), the prism+BS
/// reads the path out in the (|d⟩+|u⟩)/√2 basis (the erasure), and the
/// BS+SPP pair reads the OAM in {|r⟩,|l⟩} — the Π± outcome.
inline std::vector<AssemblyStep> assemble_bob() {
    return {
        OpticalElement{ElementKind::PBS, 2},
        OpticalElement{ElementKind::DovePrism, 2},
        DetectionStep{roles::path(2), plus_minus_basis(), 0, "bob_path_plus_port"},
    };
}

struct SetupResult {
    double p_plus = 0.0;
    double p_minus = 0.0;
    std::optional<DensityMatrix> cond_plus;   // over {P1pol, P2pol}
    std::optional<DensityMatrix> cond_minus;
    /// Product of the conditioning-port probabilities (Alice's OAM port ×
    /// Bob's path port); the abstract protocol's step-2 probability times the
    /// erasure share.
    double postselection_prob = 1.0;
};

/// Mixes a two-qubit polarization state with its computational-basis
/// dephased version: v = 1 is ideal, v = 0 kills all off-diagonal terms.
inline DensityMatrix apply_visibility(const DensityMatrix &rho, double v) {
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("visibility must lie in [0,1]");
    MatrixXcd out = v * rho.entries + (1.0 - v) * MatrixXcd(rho.entries.diagonal().asDiagonal());
    return DensityMatrix{rho.reg, std::move(out)};
}

/// Evolves |ψ⟩_0 through both assemblies, conditions on the two detection
/// ports, and reads Bob's OAM as the Π± outcome. The conditional polarization
/// states come out via partial trace over the remaining modes.
inline SetupResult run_setup(const SystemInput &input, double visibility = 1.0) {
    PureState s = encode_initial(input).state;
    SetupResult out;
    for (const auto &assembly : {assemble_alice(), assemble_bob()}) {
        for (const auto &step : assembly) {
            if (std::holds_alternative<OpticalElement>(step)) {
                const ElementUnitary eu = element_unitary(std::get<OpticalElement>(step));
                s = apply_gate(s, eu.gate.u, eu.touched);
            } else {
                const auto &d = std::get<DetectionStep>(step);
                MeasurementRecord rec = project(s, d.role, d.basis, d.outcome);
                out.postselection_prob *= rec.probability;
                s = *rec.post_state;
            }
        }
    }
    // Bob's OAM readout: |r⟩ port ↦ Π+, |l⟩ port ↦ Π−.
    for (int o = 0; o < 2; ++o) {
        const std::string oam2 = roles::oam(2);
        const size_t bit = s.reg.index_of(oam2);
        double p = 0.0;
        for (Eigen::Index i = 0; i < s.amps.size(); ++i) {
            if (((static_cast<size_t>(i) >> bit) & 1u) == static_cast<size_t>(o)) {
                p += std::norm(s.amps[i]);
            }
        }
        std::optional<DensityMatrix> cond;
        if (p >= 1e-12) {
            MeasurementRecord rec = project(s, oam2, computational_basis(), o);
            DensityMatrix rho = partial_trace(to_density(*rec.post_state), {"P1pol", "P2pol"});
            cond = apply_visibility(rho, visibility);
        }
        if (o == 0) {
            out.p_plus = p;
            out.cond_plus = std::move(cond);
        } else {
            out.p_minus = p;
            out.cond_minus = std::move(cond);
        }
    }
    if (out.p_plus < 1e-12 && out.p_minus < 1e-12) {
        throw postselection_error("coincidence configuration has zero probability");
    }
    return out;
}

/// Coincidence state of the photon-pair source: both photons enter the BS in
/// |H⟩|r⟩, and the (transmit, transmit) and (reflect, reflect) alternatives
/// that leave one photon per output port are summed with the BS rules
/// (i-phase and OAM swap on reflection). Reproduces (|rr⟩−|ll⟩)/√2 up to
/// global phase.
inline PureState source_coincidence_state() {
    const cplx t(1.0 / std::sqrt(2.0), 0.0);  // transmission amplitude
    const cplx r(0.0, 1.0 / std::sqrt(2.0));  // reflection amplitude, OAM swapped
    VectorXcd oam = VectorXcd::Zero(4);
    oam[0] = t * t;  // both transmit: |r⟩|r⟩
    oam[3] = r * r;  // both reflect: |l⟩|l⟩
    return new_pure(QubitRegister{"P1oam", "P2oam"}, oam);
}

}  // namespace nlm::optics
