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

#include "dressq/leakage.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dressq {
namespace {

template <typename F>
double interpolate_in_n(const DressedBasis& basis, double nbar, F&& at_integer) {
    const int top = basis.n_res() - 2;
    if (!(nbar >= 0.0)) nbar = 0.0;
    if (nbar > top) {
        throw std::out_of_range("leakage: n = " + std::to_string(nbar) + " is beyond the resonator truncation");
    }
    const int lo = std::min(static_cast<int>(nbar), std::max(top - 1, 0));
    if (lo >= top) return at_integer(top);
    const double w = nbar - lo;
    return (1.0 - w) * at_integer(lo) + w * at_integer(lo + 1);
}

double ladder_frequency0(const DressedBasis& basis, int k) { return basis.energy(1, k) - basis.energy(0, k); }

LeakagePrediction predict_pair(const DressedBasis& basis, double eps_rad, double g_eff, double chi, int lower_k,
                               double nbar) {
    LeakagePrediction p;
    p.source = lower_k;
    p.target = lower_k + 1;
    p.delta = ladder_detuning_interp(basis, nbar, lower_k);
    p.omega_osc = oscillation_frequency(basis, nbar, lower_k);
    const double delta0 = ladder_detuning_interp(basis, 0.0, lower_k);
    const double omega0 = oscillation_frequency(basis, 0.0, lower_k);
    if (std::abs(p.omega_osc) < 1e-12 || std::abs(omega0) < 1e-12) {
        throw std::domain_error("leakage: oscillation frequency vanishes (inter-ladder resonance); model invalid");
    }
    const double amp = eps_rad * g_eff / (p.omega_osc * p.delta);
    const double amp0 = eps_rad * g_eff / (omega0 * delta0);
    p.p_ss = amp * amp;
    p.p_ss0 = amp0 * amp0;
    p.p_max = 4.0 * p.p_ss0;
    p.t_decay = eps_rad > 0.0 ? kDecayPrefactor / std::sqrt(std::abs(chi * eps_rad))
                              : std::numeric_limits<double>::infinity();
    p.valid = p.p_ss <= 0.01;
    p.stressed = std::abs(amp) > 0.1;
    return p;
}

std::vector<double> uniform_check(std::span<const double> times, std::span<const double> trace) {
    if (times.size() != trace.size()) throw std::invalid_argument("trace and time grid differ in length");
    if (times.size() < 8) throw std::runtime_error("insufficient oscillations: trace too short");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) throw std::invalid_argument("time grid must be increasing");
    for (size_t i = 1; i < times.size(); ++i) {
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt + 1e-12) {
            throw std::invalid_argument("time grid must be uniform");
        }
    }
    return {dt};
}

double estimate_period(std::span<const double> times, std::span<const double> trace) {
    std::vector<double> peaks;
    for (size_t i = 1; i + 1 < trace.size() && peaks.size() < 6; ++i) {
        if (trace[i] > trace[i - 1] && trace[i] >= trace[i + 1]) peaks.push_back(times[i]);
    }
    if (peaks.size() < 6) throw std::runtime_error("insufficient oscillations: fewer than 5 periods detected");
    std::vector<double> gaps;
    for (size_t i = 1; i < peaks.size(); ++i) gaps.push_back(peaks[i] - peaks[i - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    return gaps[gaps.size() / 2];
}

std::vector<double> detrend(std::span<const double> trace, int window) {
    const int n = static_cast<int>(trace.size());
    std::vector<double> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + trace[i];
    std::vector<double> out(n);
    const int half = window / 2;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n, lo + window);
        out[i] = trace[i] - (prefix[hi] - prefix[lo]) / (hi - lo);
    }
    return out;
}

}  // namespace

double oscillation_frequency(const DressedBasis& basis, double nbar, int lower_k) {
    if (lower_k < 0 || lower_k + 1 >= kTransmonLevels) throw std::out_of_range("oscillation_frequency: bad ladder");
    return interpolate_in_n(basis, nbar,
                            [&](int n) { return basis.energy(n, lower_k) - basis.energy(n, lower_k + 1); });
}

double ladder_detuning_interp(const DressedBasis& basis, double nbar, int lower_k) {
    return interpolate_in_n(basis, nbar, [&](int n) { return ladder_detuning(basis, n, lower_k); });
}

LeakagePrediction predict_ground(const SystemParams& params, const DressedBasis& basis, cplx eps, double nbar) {
    return predict_pair(basis, angular(std::abs(eps)), params.g_rad(), chi_approx(params), 0, nbar);
}

std::pair<LeakagePrediction, LeakagePrediction> predict_excited(const SystemParams& params,
                                                                const DressedBasis& basis, cplx eps,
                                                                double nbar) {
    LeakagePrediction down = predict_ground(params, basis, eps, nbar);
    down.source = 1;
    down.target = 0;
    const double chi_prime = 0.5 * (ladder_frequency0(basis, 2) - ladder_frequency0(basis, 1));
    LeakagePrediction up =
        predict_pair(basis, angular(std::abs(eps)), std::sqrt(2.0) * params.g_rad(), chi_prime, 1, nbar);
    return {down, up};
}

double p_ss_excited_linearized(const SystemParams& params, const DressedBasis& basis, cplx eps, double nbar) {
    const double two_chi_prime = ladder_frequency0(basis, 2) - ladder_frequency0(basis, 1);
    const double omega0 = oscillation_frequency(basis, 0.0, 0);
    const double shift = two_chi_prime * nbar;
    const double num = std::sqrt(2.0) * angular(std::abs(eps)) * params.g_rad();
    const double den = (params.detuning() + params.eta_rad() - shift) * (omega0 + params.eta_rad() - shift);
    return (num / den) * (num / den);
}

double crude_stray_estimate(double eps, double g, double delta) {
    const double x = eps * g / (delta * delta);
    return x * x;
}

std::vector<cplx> integrate_c(const DressedBasis& basis, const DriveEnvelope& envelope,
                              const std::function<double(double)>& nbar_of_t, std::span<const double> t_grid,
                              int lower_k) {
    constexpr double kMaxSubstep = 0.01;
    const double g_eff = std::sqrt(lower_k + 1.0) * basis.params().g_rad();
    std::vector<cplx> out;
    out.reserve(t_grid.size());
    cplx c = 0.0;
    double t = 0.0;
    for (double target : t_grid) {
        if (target < t) throw std::invalid_argument("integrate_c: t_grid must be nondecreasing and start at >= 0");
        const int steps = static_cast<int>(std::ceil((target - t) / kMaxSubstep - 1e-9));
        const double h = steps > 0 ? (target - t) / steps : 0.0;
        for (int s = 0; s < steps; ++s) {
            // Coefficients frozen at the substep midpoint; the linear ODE is then solved exactly.
            const double tm = t + (s + 0.5) * h;
            const double nbar = nbar_of_t(tm);
            const cplx a = cplx(0.0, 1.0) * envelope.angular_at(tm) * g_eff / ladder_detuning_interp(basis, nbar, lower_k);
            const double omega = oscillation_frequency(basis, nbar, lower_k);
            const cplx rot = std::polar(1.0, omega * h);
            c = c * rot + a * (rot - 1.0) / cplx(0.0, omega);
        }
        t = target;
        out.push_back(c);
    }
    return out;
}

DecayFit fit_decay_time(std::span<const double> times, std::span<const double> trace) {
    const double dt = uniform_check(times, trace)[0];
    DecayFit fit;
    fit.period = estimate_period(times, trace);
    if (times.back() - times.front() < 5.0 * fit.period) {
        throw std::runtime_error("insufficient oscillations: trace shorter than 5 periods");
    }
    const int w = std::max(2, static_cast<int>(std::lround(fit.period / dt)));
    const auto x = detrend(trace, w);
    for (size_t i = 0; i + w <= x.size(); i += w) {
        const auto [lo, hi] = std::minmax_element(x.begin() + i, x.begin() + i + w);
        fit.amplitudes.push_back(0.5 * (*hi - *lo));
        fit.window_times.push_back(times[i] + 0.5 * (w - 1) * dt);
    }
    if (fit.amplitudes.size() < 5) throw std::runtime_error("insufficient oscillations: fewer than 5 windows");
    const auto first = std::max_element(fit.amplitudes.begin(), fit.amplitudes.begin() + 3);
    fit.initial_amplitude = *first;
    const double threshold = fit.initial_amplitude / 3.0;
    for (size_t j = static_cast<size_t>(first - fit.amplitudes.begin()) + 1; j < fit.amplitudes.size(); ++j) {
        if (fit.amplitudes[j] < threshold) {
            const double a0 = fit.amplitudes[j - 1];
            const double a1 = fit.amplitudes[j];
            const double frac = (a0 - threshold) / (a0 - a1);
            fit.t_decay = fit.window_times[j - 1] + frac * (fit.window_times[j] - fit.window_times[j - 1]);
            return fit;
        }
    }
    throw std::runtime_error("insufficient decay: oscillation amplitude never falls to 1/3");
}

std::vector<FrequencySample> extract_oscillation_frequency(std::span<const double> times,
                                                           std::span<const double> trace, int window_periods) {
    if (window_periods < 2) throw std::invalid_argument("extract_oscillation_frequency: need >= 2 periods per window");
    const double dt = uniform_check(times, trace)[0];
    const double period = estimate_period(times, trace);
    const int w = std::max(2, static_cast<int>(std::lround(period / dt)));
    const auto x = detrend(trace, w);

    std::vector<double> crossings;
    for (size_t i = 1; i < x.size(); ++i) {
        if (x[i - 1] < 0.0 && x[i] >= 0.0) {
            crossings.push_back(times[i - 1] + dt * (-x[i - 1]) / (x[i] - x[i - 1]));
        }
    }
    std::vector<FrequencySample> out;
    const double span = window_periods * period;
    size_t i = 0;
    while (i < crossings.size()) {
        size_t j = i;
        while (j + 1 < crossings.size() && crossings[j + 1] - crossings[i] < span) ++j;
        if (j - i + 1 < static_cast<size_t>(window_periods) / 2 + 1) {
            i = j + 1;
            continue;
        }
        if (crossings[j] - crossings[i] > 0.0) {
            out.push_back({0.5 * (crossings[i] + crossings[j]),
                           2.0 * std::numbers::pi * static_cast<double>(j - i) / (crossings[j] - crossings[i])});
        }
        i = j + 1;
    }
    if (out.empty()) throw std::runtime_error("insufficient oscillations: no full frequency window");
    return out;
}

}  // namespace dressq
