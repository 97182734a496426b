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

#ifndef DRESSQ_DRESSED_H
#define DRESSQ_DRESSED_H

#include <array>
#include <span>
#include <vector>

#include "dressq/spectrum.h"

namespace dressq {

/// Hybrid phase-Fock parameters of a sheared Gaussian state on ladder k.
struct ShearedParams {
    cplx beta = 0.0;
    double K = 0.0;  // shear, q|β|²
    double W = 1.0;  // number variance relative to a coherent state
    int k = 0;
};

/// Displaced squeezed state D(β) S(ξ)|0>, ξ = r e^{iθ}.
struct SqueezeOptical {
    cplx beta = 0.0;
    double r = 0.0;
    double theta = 0.0;
};

// ---- ladder amplitudes c_n, n = 0..n_max-1 ----

std::vector<cplx> coherent_amplitudes(cplx alpha, int n_max);

/// Closed-form recurrence, normalized over the truncated range.
std::vector<cplx> squeezed_amplitudes(const SqueezeOptical& opt, int n_max);

/// Same state from matrix exponentials of the displacement and squeeze
/// generators on a padded Fock space. Slow; meant for cross-checks.
std::vector<cplx> squeezed_amplitudes_expm(const SqueezeOptical& opt, int n_max);

/// Gaussian number distribution with quadratic phase. When `renormalize` is
/// false the amplitudes are returned exactly as the closed form gives them.
std::vector<cplx> sheared_gaussian_amplitudes(const ShearedParams& params, int n_max, bool renormalize = true);

// ---- full states in the bare basis ----

std::vector<cplx> make_dressed_coherent(const DressedBasis& basis, cplx alpha, int k);
std::vector<cplx> make_sheared_gaussian(const DressedBasis& basis, const ShearedParams& params);
std::vector<cplx> make_dressed_squeezed(const DressedBasis& basis, const SqueezeOptical& opt, int k);

SqueezeOptical shear_to_squeeze(const ShearedParams& params);

/// Squeezing measure S(K, W); S = 0 for a coherent state.
double shear_s_parameter(double K, double W);

// ---- analytic large-|β| moments of a sheared Gaussian ----

cplx sheared_mean_a(const ShearedParams& params);
cplx sheared_mean_a2(const ShearedParams& params);
double sheared_quadrature_variance(const ShearedParams& params, double phi);
/// {σ²_min, σ²_max} from S.
std::array<double, 2> sheared_variance_extrema(const ShearedParams& params);

// ---- moments of a ladder state ----

struct LadderMoments {
    double norm = 0.0;
    cplx a = 0.0;   // ⟨ā⟩
    cplx a2 = 0.0;  // ⟨ā²⟩
    double n = 0.0;  // ⟨ā†ā⟩
};

/// Moments of the normalized ladder state c.
LadderMoments ladder_moments(std::span<const cplx> c);

struct QuadratureStats {
    double var_min = 0.0;
    double var_max = 0.0;
    double phi_min = 0.0;  // angle of the minimum variance, in (-π/2, π/2]
    /// r with e^{∓2r} matching var_min/var_max relative to 1/4.
    double fitted_r() const;
};

QuadratureStats quadrature_stats(std::span<const cplx> c);

/// σ² of X_φ = (e^{-iφ}ā + e^{iφ}ā†)/2 for ladder amplitudes c.
double quadrature_variance(std::span<const cplx> c, double phi);

// ---- decomposition and fidelities ----

struct SplitState {
    double p_stray = 0.0;
    std::vector<cplx> psi_k;     // normalized ladder-k amplitudes c_n
    std::vector<cplx> psi_perp;  // normalized dressed amplitudes outside ladder k
};

/// psi is a bare-basis state. psi = √(1-P) ψ_k + √P ψ_⊥ in the dressed basis.
SplitState split_state(std::span<const cplx> psi, int k, const DressedBasis& basis);

struct CoherentFit {
    double fidelity = 0.0;
    cplx alpha = 0.0;
    bool converged = true;
};

/// max_α |⟨α|c⟩|² over ladder amplitudes c, refined from the ⟨ā⟩ seed.
CoherentFit fit_coherent(std::span<const cplx> c);

/// Dressed coherent fidelity of a full bare-basis state against |α⟩_k.
CoherentFit fidelity_dressed_coherent(std::span<const cplx> psi, int k, const DressedBasis& basis);

/// Fidelity against the bare product |α⟩ ⊗ |k⟩, optimized over α.
CoherentFit fidelity_bare_coherent(std::span<const cplx> psi, int k, int n_res);

/// |⟨β,ξ|c⟩|² for ladder amplitudes c.
double fidelity_dressed_squeezed(std::span<const cplx> c, const SqueezeOptical& opt);

// ---- Husimi Q ----

struct QGrid {
    cplx center = 0.0;
    double half_width = 5.0;
    int points = 201;

    cplx at(int i_re, int i_im) const;
};

QGrid default_q_grid(std::span<const cplx> c, double r = 0.0);

/// Q(α) = |⟨α|c⟩|²/π, stored at index i_im * points + i_re.
std::vector<double> husimi_q(std::span<const cplx> c, const QGrid& grid);

/// Contour levels 0.1/π ... 0.8/π.
std::array<double, 8> husimi_contour_levels();

}  // namespace dressq

#endif  // DRESSQ_DRESSED_H
