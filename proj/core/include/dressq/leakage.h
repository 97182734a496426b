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

#ifndef DRESSQ_LEAKAGE_H
#define DRESSQ_LEAKAGE_H

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dressq/spectrum.h"

namespace dressq {

/// Perturbative leakage from ladder `source` into neighboring ladder `target`.
struct LeakagePrediction {
    int source = 0;
    int target = 1;
    double p_ss = 0.0;       // steady-state stray population at the requested n̄
    double p_ss0 = 0.0;      // same at n̄ = 0
    double p_max = 0.0;      // first oscillation maximum after a sudden drive, 4 p_ss0
    double omega_osc = 0.0;  // oscillation frequency at n̄, rad/ns
    double delta = 0.0;      // ladder detuning at n̄, rad/ns
    double t_decay = 0.0;    // ns, decay of the oscillation amplitude to 1/3
    bool valid = true;       // false when p_ss > 0.01
    bool stressed = false;   // |εg/(ΩΔ)| > 0.1
};

inline constexpr double kDecayPrefactor = 1.23;

/// Leakage from ladder 0 into ladder 1. eps is ε/2π in GHz.
LeakagePrediction predict_ground(const SystemParams& params, const DressedBasis& basis, cplx eps, double nbar);

/// Leakage from ladder 1 into ladders 0 and 2.
std::pair<LeakagePrediction, LeakagePrediction> predict_excited(const SystemParams& params,
                                                                const DressedBasis& basis, cplx eps,
                                                                double nbar);

/// Low-n closed form for the ladder 1 -> 2 leakage with Δ_n ≈ Δ+η-2χ'n.
double p_ss_excited_linearized(const SystemParams& params, const DressedBasis& basis, cplx eps, double nbar);

/// Order-of-magnitude estimate (εg/Δ²)² with all inputs in GHz.
double crude_stray_estimate(double eps, double g, double delta);

/// Oscillation frequency Ē_{n,k} - Ē_{n,k+1} of the leaked amplitude, linearly
/// interpolated in n, rad/ns.
double oscillation_frequency(const DressedBasis& basis, double nbar, int lower_k = 0);

/// Ladder detuning Ē_{n+1,k} - Ē_{n,k+1}, linearly interpolated in n, rad/ns.
double ladder_detuning_interp(const DressedBasis& basis, double nbar, int lower_k = 0);

/// Integrates ċ = i ε(t) g'/Δ_n̄ + i Ω_n̄ c from c(0) = 0 for the pair
/// (lower_k, lower_k+1), with g' = √(lower_k+1) g. Returns c on t_grid.
std::vector<cplx> integrate_c(const DressedBasis& basis, const DriveEnvelope& envelope,
                              const std::function<double(double)>& nbar_of_t, std::span<const double> t_grid,
                              int lower_k = 0);

struct DecayFit {
    double t_decay = 0.0;  // ns
    double period = 0.0;   // ns
    double initial_amplitude = 0.0;
    std::vector<double> window_times;
    std::vector<double> amplitudes;
};

/// Measures when the oscillation amplitude of a uniformly sampled trace first
/// drops to 1/3 of its initial value. The amplitude is the per-period
/// half-range of the trace minus its one-period moving average.
/// Throws std::runtime_error when fewer than 5 periods are present or the
/// amplitude never decays.
DecayFit fit_decay_time(std::span<const double> times, std::span<const double> trace);

struct FrequencySample {
    double t = 0.0;      // window center, ns
    double omega = 0.0;  // rad/ns
};

/// Windowed zero-crossing count of the detrended trace, `window_periods`
/// oscillation periods per window.
std::vector<FrequencySample> extract_oscillation_frequency(std::span<const double> times,
                                                           std::span<const double> trace, int window_periods = 10);

}  // namespace dressq

#endif  // DRESSQ_LEAKAGE_H
