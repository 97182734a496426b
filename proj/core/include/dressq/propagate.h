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

#ifndef DRESSQ_PROPAGATE_H
#define DRESSQ_PROPAGATE_H

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "dressq/model.h"
#include "dressq/spectrum.h"

namespace dressq {

struct StateVector {
    std::vector<cplx> amps;  // flat bare-basis amplitudes, length 7N
    double t = 0.0;          // ns
};

struct SnapshotDiagnostics {
    double norm = 1.0;            // ‖ψ‖²
    double top_population = 0.0;  // population in the top resonator levels
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<SnapshotDiagnostics> aux;
};

enum class Integrator {
    kAdaptive,  // embedded Runge-Kutta-Fehlberg 7(8)
    kFixedRk4,  // classical RK4 with a fixed step, for refinement checks
};

struct PropagateOptions {
    double tol = 1e-10;
    double dt_out = 0.5;
    Integrator integrator = Integrator::kAdaptive;
    double fixed_dt = 1e-3;  // kFixedRk4 only
    int breach_levels = 5;
    double breach_threshold = 1e-6;
};

class TruncationBreach : public std::runtime_error {
   public:
    TruncationBreach(double t, double population);
    double t() const { return t_; }
    double population() const { return population_; }

   private:
    double t_;
    double population_;
};

/// Population in the top `levels` resonator Fock levels of a bare-basis state.
double top_level_population(std::span<const cplx> psi, int n_res, int levels);

double norm_squared(std::span<const cplx> psi);

/// Integrates iψ̇ = [H0 + ε(t)D + ε*(t)D†]ψ in the rotating frame.
class Propagator {
   public:
    Propagator(const RotatingHamiltonian& h0, const DriveOperator& drive, DriveEnvelope envelope,
               PropagateOptions options = {});

    /// Moves psi from t0 to t1. t1 < t0 integrates backward in time.
    void advance(std::vector<cplx>& psi, double t0, double t1) const;

    const PropagateOptions& options() const { return options_; }

   private:
    const RotatingHamiltonian& h0_;
    const DriveOperator& drive_;
    DriveEnvelope envelope_;
    PropagateOptions options_;
};

using SnapshotObserver = std::function<void(const StateVector&, const SnapshotDiagnostics&)>;

/// Streams snapshots at t = 0, dt_out, 2 dt_out, ..., t_end to the observer.
/// Throws TruncationBreach when the top-level population exceeds the threshold.
void evolve_observed(const RotatingHamiltonian& h0, const DriveOperator& drive, const DriveEnvelope& envelope,
                     std::span<const cplx> psi0, double t_end, const PropagateOptions& options,
                     const SnapshotObserver& observer);

Trajectory evolve(const RotatingHamiltonian& h0, const DriveOperator& drive, const DriveEnvelope& envelope,
                  std::span<const cplx> psi0, double t_end, double dt_out = 0.5, double tol = 1e-10);

cplx expectation(const Eigen::SparseMatrix<double>& op, std::span<const cplx> psi);
cplx expectation(const Eigen::MatrixXcd& op, std::span<const cplx> psi);

/// ⟨ā†ā⟩ summed over all ladders.
double photon_number(std::span<const cplx> psi, const DressedBasis& basis);

/// ⟨ā⟩ of a bare-basis state.
cplx dressed_lowering_mean(std::span<const cplx> psi, const DressedBasis& basis);

}  // namespace dressq

#endif  // DRESSQ_PROPAGATE_H
