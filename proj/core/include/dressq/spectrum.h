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

#ifndef DRESSQ_SPECTRUM_H
#define DRESSQ_SPECTRUM_H

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "dressq/model.h"

namespace dressq {

/// Stable 64-bit hash of every physical field of SystemParams.
std::uint64_t params_hash(const SystemParams& params);

/// Sorted eigenpairs of the drive-free Hamiltonian, labelled by the bare
/// product state they adiabatically connect to.
///
/// The eigenvector of bar|n,k> lives in RWA strip s = n + k and is stored as
/// its components on the bare states |s-k', k'>, indexed by the bare
/// transmon level k'. Columns of U are ordered by the flat bare index.
class DressedBasis {
   public:
    using StripVector = std::array<double, kTransmonLevels>;

    DressedBasis(SystemParams params, std::vector<double> energies, std::vector<StripVector> vectors);

    const SystemParams& params() const { return params_; }
    int n_res() const { return params_.n_res; }
    int dim() const { return params_.dim(); }

    /// Rotating-frame eigenenergy of bar|n,k> in rad/ns.
    double energy(int n, int k) const { return energies_[flat_index(n, k)]; }
    std::span<const double> energies() const { return energies_; }

    /// <n+k-kp, kp | bar(n,k)>, zero when that bare state is outside the truncation.
    double component(int n, int k, int kp) const { return vectors_[flat_index(n, k)][kp]; }
    const StripVector& strip_vector(int n, int k) const { return vectors_[flat_index(n, k)]; }

    /// ψ_dressed = U† ψ_bare.
    std::vector<cplx> to_dressed(std::span<const cplx> bare) const;
    /// ψ_bare = U c.
    std::vector<cplx> to_bare(std::span<const cplx> dressed) const;

    /// Dressed Fock amplitudes c_n of ladder k, taken from a full dressed vector.
    std::vector<cplx> ladder(std::span<const cplx> dressed, int k) const;
    /// Full bare-basis state Σ_n c_n bar|n,k>.
    std::vector<cplx> embed_ladder(std::span<const cplx> ladder_amps, int k) const;

    /// ⟨bar(n1,k1)| a |bar(n2,k2)⟩ for the bare resonator lowering operator.
    double bare_lowering_element(int n1, int k1, int n2, int k2) const;

    Eigen::MatrixXd dense_u() const;

    /// Levels near the resonator truncation are distorted by the cutoff.
    bool n_is_reliable(int n) const { return n <= n_res() - 10; }

   private:
    SystemParams params_;
    std::vector<double> energies_;
    std::vector<StripVector> vectors_;
};

/// One eigenpair of an RWA-strip block, with the vector over the strip
/// members in ascending bare transmon level.
struct StripEigenpair {
    double energy = 0.0;
    std::vector<double> vector;
};

/// Matches eigenpairs to bare states by rank order of energy within the strip.
/// Returns, for each strip member (ascending bare transmon level), the index
/// of its eigenpair in `pairs`. Throws std::runtime_error on a degeneracy
/// closer than 1e-12 relative to the strip scale.
std::vector<int> identify_strip(std::span<const double> bare_diag, std::span<const StripEigenpair> pairs);

/// Strip-by-strip diagonalization with identification and sign fixing.
///
/// Sign convention: the first state of every ladder has a positive dominant
/// bare component, and each following state is oriented so that
/// ⟨bar(n-1,k)| a |bar(n,k)⟩ > 0, which keeps the dominant amplitude from
/// flipping as n grows.
DressedBasis diagonalize(const RotatingHamiltonian& h0, const SystemParams& params);

/// Convenience: build_h0 followed by diagonalize.
DressedBasis diagonalize(const SystemParams& params);

/// Drive frequency (GHz) resonant with ladder k at n = 0, i.e. the lab-frame
/// transition bar|0,k> -> bar|1,k>.
double resonant_drive_frequency(const SystemParams& params, int k);

/// ω_r^(k)(n) = Ē_{n+1,k} - Ē_{n,k} in the rotating frame, with its
/// n-derivative. Both grids are indexed by integer n = 0..N-2; derivatives use
/// central differences inside and one-sided differences at the ends.
class LadderProfile {
   public:
    LadderProfile(int k, std::vector<double> omega, std::vector<double> domega_dn);
    /// A profile with n-independent frequency, for linear-resonator checks.
    static LadderProfile constant(int k, double omega, int n_points);

    int k() const { return k_; }
    std::span<const double> omega() const { return omega_; }
    std::span<const double> domega_dn() const { return domega_; }
    double max_n() const { return static_cast<double>(omega_.size() - 1); }

    /// Linear interpolation at non-integer n; throws std::out_of_range past max_n().
    double omega_at(double n) const;
    double domega_at(double n) const;

   private:
    int k_;
    std::vector<double> omega_;
    std::vector<double> domega_;
};

LadderProfile ladder_profile(const DressedBasis& basis, int k);

/// n_c = (ω_r - ω_q)^2 / 4g^2.
double critical_photon_number(const SystemParams& params);

/// Δ_n = Ē_{n+1,0} - Ē_{n,1} (rad/ns), the ac-Stark-shifted qubit-resonator
/// detuning. Both levels share a strip, so the value is frame independent.
double detuning_n(const DressedBasis& basis, int n);

/// Generalization to the ladder pair (k, k+1): Ē_{n+1,k} - Ē_{n,k+1}.
double ladder_detuning(const DressedBasis& basis, int n, int lower_k);

enum class DetuningLookup { kNearest, kWeighted };

/// Δ at non-integer n̄ by nearest-integer lookup.
double detuning_at(const DressedBasis& basis, double nbar, int lower_k = 0);
/// Δ averaged over a photon-number distribution (weights need not be normalized).
double detuning_weighted(const DressedBasis& basis, std::span<const double> weights, int lower_k = 0);

/// χ ≈ -(ω_r/ω_q) g^2 η / (Δ(Δ+η)) in rad/ns.
double chi_approx(const SystemParams& params);

/// ā = U a U† in the bare basis, as a sparse matrix.
Eigen::SparseMatrix<double> dressed_lowering(const DressedBasis& basis);

/// Applies ā in the dressed (eigen-index) representation: (ā c)_{n,k} = √(n+1) c_{n+1,k}.
std::vector<cplx> apply_dressed_lowering(std::span<const cplx> dressed, int n_res);

/// ε̃ = ε ⟨bar(n-1,k)| a |bar(n,k)⟩ / √n, for 1 <= n <= N-1.
cplx effective_drive(const DressedBasis& basis, int n, int k, cplx eps);

/// Leading-order ε̃/ε for ladders 0 and 1 at n below n_c.
double effective_drive_factor_analytic(const SystemParams& params, int k);

}  // namespace dressq

#endif  // DRESSQ_SPECTRUM_H
