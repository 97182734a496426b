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

#ifndef DRESSQ_REDUCED_H
#define DRESSQ_REDUCED_H

#include <vector>

#include "dressq/dressed.h"
#include "dressq/spectrum.h"

namespace dressq {

/// Hybrid phase-Fock parameters (β, K, W) of a dressed sheared state.
struct ReducedState {
    cplx beta = 0.0;
    double K = 0.0;
    double W = 1.0;
    int k = 0;
    double t = 0.0;
};

enum class DriveMode {
    kBare,           // ε
    kAnalytic,       // ε times the second-order correction factor
    kMatrixElement,  // ε ⟨bar(n-1,k)|a|bar(n,k)⟩/√n at n = |β|²
};

/// Maps the bare drive amplitude to the amplitude seen within one ladder.
class EffectiveDrive {
   public:
    static EffectiveDrive bare();
    static EffectiveDrive analytic(const SystemParams& params, int k);
    static EffectiveDrive matrix_element(const DressedBasis& basis, int k);
    /// basis may be null except for kMatrixElement.
    static EffectiveDrive from_mode(DriveMode mode, const SystemParams& params, const DressedBasis* basis, int k);

    DriveMode mode() const { return mode_; }
    /// ε̃/ε at photon number n (values below 1 use n = 1).
    double factor(double n) const;

   private:
    DriveMode mode_ = DriveMode::kBare;
    double constant_ = 1.0;
    std::vector<double> table_;  // entry n-1 holds the factor at n
};

struct ReducedOptions {
    double dt = 0.01;                 // fixed RK4 step, ns
    bool zero_nonlinearity = false;   // drop the (|β|²/2) dω/dn term
    bool check_halving = false;       // rerun at dt/2 and report the difference
};

struct ReducedTrajectory {
    std::vector<ReducedState> states;
    /// Largest |Δβ|, |ΔK|, |ΔW| between dt and dt/2 runs; 0 unless requested.
    double halving_error = 0.0;
};

/// Integrates Ẇ = 8KW Re(ε/β), K̇ = [(1-W²)/4W² - 4K²] Re(ε/β) + (|β|²/2) dω/dn,
/// β̇ = -i ω(|β|²) β - i ε, with ε replaced by the effective drive.
/// Throws std::out_of_range when |β|² leaves the profile.
ReducedTrajectory evolve_reduced(const LadderProfile& profile, const DriveEnvelope& envelope,
                                 const EffectiveDrive& drive, const ReducedState& state0, double t_end,
                                 double dt_out, const ReducedOptions& options = {});

SqueezeOptical to_squeezed(const ReducedState& state);

/// β(t) of a linear resonator detuned by δ (rad/ns) under constant drive ε
/// (rad/ns) from vacuum.
cplx linear_resonator_beta(cplx eps, double delta, double t);

}  // namespace dressq

#endif  // DRESSQ_REDUCED_H
