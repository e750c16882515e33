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
 * Dense complex state-vector and density-matrix core: qubit registers with
 * named roles, pure states, density matrices, partial trace and fidelity.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nlm {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Engine arithmetic must stay within this of exact; violations are bugs,
/// not user errors.
inline constexpr double kDriftTol = 1e-10;
/// Tolerance applied to user-supplied amplitudes before renormalization.
inline constexpr double kInputNormTol = 1e-6;
inline constexpr int kMaxQubits = 8;

/// Numerical invariant violation (norm drift, non-unitary matrix, ...).
struct invariant_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A requested post-selection branch has (numerically) zero probability.
struct postselection_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ordered set of named qubit roles. The role listed first is the most
/// significant bit of a basis index, so |01⟩ over roles {A,B} means A=0, B=1.
class QubitRegister {
  public:
    QubitRegister() = default;
    explicit QubitRegister(std::vector<std::string> roles) : roles_(std::move(roles)) {
        if (roles_.empty() || roles_.size() > kMaxQubits) {
            throw std::invalid_argument("register must hold between 1 and 8 qubits");
        }
        for (size_t i = 0; i < roles_.size(); ++i) {
            for (size_t j = i + 1; j < roles_.size(); ++j) {
                if (roles_[i] == roles_[j]) {
                    throw std::invalid_argument("duplicate role '" + roles_[i] + "'");
                }
            }
        }
    }
    QubitRegister(std::initializer_list<std::string> roles)
        : QubitRegister(std::vector<std::string>(roles)) {}

    size_t size() const { return roles_.size(); }
    size_t dim() const { return size_t{1} << roles_.size(); }
    const std::vector<std::string> &roles() const { return roles_; }

    bool contains(const std::string &role) const {
        return std::find(roles_.begin(), roles_.end(), role) != roles_.end();
    }
    /// Position of `role` in the listed order (0 = most significant).
    size_t position_of(const std::string &role) const {
        auto it = std::find(roles_.begin(), roles_.end(), role);
        if (it == roles_.end()) {
            throw std::invalid_argument("unknown role '" + role + "'");
        }
        return static_cast<size_t>(it - roles_.begin());
    }
    /// Bit position of `role` inside a basis index (0 = least significant).
    size_t index_of(const std::string &role) const {
        return roles_.size() - 1 - position_of(role);
    }
    /// Value of `role`'s bit in basis index `basis`.
    int bit_of(size_t basis, const std::string &role) const {
        return static_cast<int>((basis >> index_of(role)) & 1u);
    }

    bool operator==(const QubitRegister &other) const { return roles_ == other.roles_; }

  private:
    std::vector<std::string> roles_;
};

/// Normalized amplitude vector over a named register. Immutable value type;
/// every operation returns a fresh state.
struct PureState {
    QubitRegister reg;
    VectorXcd amps;
};

struct DensityMatrix {
    QubitRegister reg;
    MatrixXcd entries;
};

inline bool is_finite(const VectorXcd &v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
    }
    return true;
}

/// Builds a normalized PureState. The input norm may be off by up to 1e-6
/// (or arbitrary if `renormalize` is set); the result is normalized exactly.
inline PureState new_pure(QubitRegister reg, VectorXcd amplitudes, bool renormalize = true) {
    if (static_cast<size_t>(amplitudes.size()) != reg.dim()) {
        throw std::invalid_argument("amplitude vector length does not match register dimension");
    }
    if (!is_finite(amplitudes)) {
        throw std::invalid_argument("non-finite amplitude");
    }
    const double norm = amplitudes.norm();
    if (norm < 1e-12) {
        throw std::invalid_argument("zero amplitude vector");
    }
    if (!renormalize && std::abs(norm - 1.0) > kInputNormTol) {
        throw std::invalid_argument("amplitude vector is not normalized");
    }
    return PureState{std::move(reg), amplitudes / norm};
}

inline PureState basis_state(QubitRegister reg, size_t basis) {
    VectorXcd v = VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()));
    v[static_cast<Eigen::Index>(basis)] = 1.0;
    return PureState{std::move(reg), std::move(v)};
}

inline void check_norm(const PureState &s) {
    if (std::abs(s.amps.squaredNorm() - 1.0) > kDriftTol) {
        throw invariant_error("state norm drifted from 1");
    }
}

/// Kronecker product of two states over disjoint role sets; roles of `a`
/// become the more significant bits.
inline PureState tensor(const PureState &a, const PureState &b) {
    std::vector<std::string> roles = a.reg.roles();
    for (const auto &r : b.reg.roles()) {
        if (a.reg.contains(r)) {
            throw std::invalid_argument("role collision in tensor: '" + r + "'");
        }
        roles.push_back(r);
    }
    VectorXcd out(a.amps.size() * b.amps.size());
    for (Eigen::Index i = 0; i < a.amps.size(); ++i) {
        out.segment(i * b.amps.size(), b.amps.size()) = a.amps[i] * b.amps;
    }
    return PureState{QubitRegister(std::move(roles)), std::move(out)};
}

inline DensityMatrix to_density(const PureState &s) {
    return DensityMatrix{s.reg, s.amps * s.amps.adjoint()};
}

/// Traces out every role not in `keep`. Kept roles retain their relative
/// order from the original register.
inline DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<std::string> &keep) {
    if (keep.empty()) {
        throw std::invalid_argument("partial_trace: empty keep set");
    }
    std::vector<std::string> kept;   // in original register order
    std::vector<std::string> traced;
    for (const auto &r : rho.reg.roles()) {
        const bool k = std::find(keep.begin(), keep.end(), r) != keep.end();
        (k ? kept : traced).push_back(r);
    }
    if (kept.size() != keep.size()) {
        throw std::invalid_argument("partial_trace: keep set contains unknown role");
    }
    QubitRegister out_reg(kept);
    const size_t m = kept.size();
    const size_t t = traced.size();
    const size_t out_dim = size_t{1} << m;
    const size_t tr_dim = size_t{1} << t;

    // Bit offsets of kept/traced roles in the full index.
    std::vector<size_t> kept_bits(m), traced_bits(t);
    for (size_t i = 0; i < m; ++i) kept_bits[i] = rho.reg.index_of(kept[i]);
    for (size_t i = 0; i < t; ++i) traced_bits[i] = rho.reg.index_of(traced[i]);

    auto full_index = [&](size_t kept_idx, size_t tr_idx) {
        size_t f = 0;
        for (size_t i = 0; i < m; ++i) {
            f |= ((kept_idx >> (m - 1 - i)) & 1u) << kept_bits[i];
        }
        for (size_t i = 0; i < t; ++i) {
            f |= ((tr_idx >> (t - 1 - i)) & 1u) << traced_bits[i];
        }
        return f;
    };

    MatrixXcd out = MatrixXcd::Zero(static_cast<Eigen::Index>(out_dim),
                                    static_cast<Eigen::Index>(out_dim));
    for (size_t r = 0; r < out_dim; ++r) {
        for (size_t c = 0; c < out_dim; ++c) {
            cplx sum = 0.0;
            for (size_t e = 0; e < tr_dim; ++e) {
                sum += rho.entries(static_cast<Eigen::Index>(full_index(r, e)),
                                   static_cast<Eigen::Index>(full_index(c, e)));
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
        }
    }
    return DensityMatrix{std::move(out_reg), std::move(out)};
}

/// F = Tr(ρ_exp ρ_ideal). For the pure/near-pure states used here this is the
/// standard overlap fidelity.
inline double fidelity(const DensityMatrix &rho_exp, const DensityMatrix &rho_ideal) {
    if (rho_exp.entries.rows() != rho_ideal.entries.rows()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    const cplx tr = (rho_exp.entries * rho_ideal.entries).trace();
    if (std::abs(tr.imag()) > kDriftTol) {
        throw invariant_error("fidelity has nonreal trace");
    }
    return tr.real();
}

inline double fidelity(const DensityMatrix &rho, const PureState &ideal) {
    return fidelity(rho, to_density(ideal));
}

/// |⟨a|b⟩|² with one global phase ignored; used for state comparisons.
inline double overlap2(const PureState &a, const PureState &b) {
    return std::norm(a.amps.dot(b.amps));
}

/// Von Neumann entropy in bits of a (validated-Hermitian) density matrix.
inline double entropy_bits(const DensityMatrix &rho) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.entries);
    double h = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()[i];
        if (p > 1e-15) h -= p * std::log2(p);
    }
    return h;
}

inline void validate_density(const DensityMatrix &rho, double min_eig = -1e-8) {
    const MatrixXcd &m = rho.entries;
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kDriftTol) {
        throw invariant_error("density matrix not Hermitian");
    }
    if (std::abs(m.trace().real() - 1.0) > kDriftTol || std::abs(m.trace().imag()) > kDriftTol) {
        throw invariant_error("density matrix trace != 1");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    if (es.eigenvalues().minCoeff() < min_eig) {
        throw invariant_error("density matrix has a negative eigenvalue");
    }
}

}  // namespace nlm
