// Copyright 2026 The dressq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DRESSQ_ENTANGLE_H
#define DRESSQ_ENTANGLE_H

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dressq/spectrum.h"

namespace dressq {

using TransmonAmps = std::array<cplx, kTransmonLevels>;

/// Bare-basis expansion bar|n,k> = Σ_l d_l |n-l, k+l>. Entry kp holds d_l with
/// l = kp - k; entries outside the strip are zero.
std::array<double, kTransmonLevels> eigen_coeffs(const DressedBasis& basis, int n, int k);

/// Σ_n c_n* c_{n+l}, the overlap of the ladder state with itself shifted by l.
cplx shifted_overlap(std::span<const cplx> c, int l);

struct ProductApprox {
    int k = 0;
    std::vector<cplx> resonator_amps;      // c_n
    std::array<double, kTransmonLevels> d;  // |c_n|²-weighted average of d_l^(n,k), normalized
    std::array<double, kTransmonLevels> phases;  // φ_l = arg Σ c_n* c_{n+l}, by transmon level k+l
    TransmonAmps transmon_amps;             // e^{iφ_l} d_l
    double infidelity = 0.0;                // 1 - |<ψ_dp|ψ>|²
};

/// Direct-product approximation of Σ_n c_n bar|n,k>; c must be normalized.
ProductApprox product_approx(const DressedBasis& basis, std::span<const cplx> c, int k);

/// Bare-basis amplitudes of the product state described by `product`.
std::vector<cplx> product_state(const ProductApprox& product, int n_res);

/// Reduced 7x7 transmon density matrix of a bare-basis state.
Eigen::Matrix<cplx, kTransmonLevels, kTransmonLevels> transmon_density(std::span<const cplx> psi, int n_res);

/// Von Neumann entropy (bits) of the transmon reduced state of a pure state.
double entanglement_of_formation(std::span<const cplx> psi, int n_res);

/// 1 - max over product states of |<a⊗b|ψ>|², i.e. 1 - largest Schmidt weight.
double best_product_infidelity(std::span<const cplx> psi, int n_res);

/// Transmon factor at lab time t: φ_l(t) = φ_l(0) - l ω_r t. omega_r in rad/ns.
TransmonAmps transmon_lab_frame_state(const ProductApprox& product, double omega_r, double t);

}  // namespace dressq

#endif  // DRESSQ_ENTANGLE_H
