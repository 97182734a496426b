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

#include "dressq/reduced.h"

#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

namespace dressq {
namespace {

using Vec4 = std::array<double, 4>;  // Re β, Im β, K, W

struct ReducedRhs {
    const LadderProfile& profile;
    const DriveEnvelope& envelope;
    const EffectiveDrive& drive;
    bool zero_nonlinearity;

    void operator()(const Vec4& y, Vec4& dy, double t) const {
        const cplx beta(y[0], y[1]);
        const double K = y[2];
        const double W = y[3];
        const double n = std::norm(beta);
        const cplx eps = envelope.angular_at(t) * drive.factor(n);
        // At β -> 0 from vacuum β ≈ -iεt, so Re(ε/β) -> 0.
        const double re = std::abs(beta) < 1e-8 ? 0.0 : (eps / beta).real();
        const double shear = zero_nonlinearity ? 0.0 : 0.5 * n * profile.domega_at(n);
        const cplx dbeta = cplx(0.0, -1.0) * profile.omega_at(n) * beta - cplx(0.0, 1.0) * eps;
        dy[0] = dbeta.real();
        dy[1] = dbeta.imag();
        dy[2] = ((1.0 - W * W) / (4.0 * W * W) - 4.0 * K * K) * re + shear;
        dy[3] = 8.0 * K * W * re;
    }
};

std::vector<ReducedState> integrate(const ReducedRhs& rhs, const ReducedState& s0, double t_end, double dt_out,
                                    double dt) {
    boost::numeric::odeint::runge_kutta4<Vec4> stepper;
    Vec4 y{s0.beta.real(), s0.beta.imag(), s0.K, s0.W};
    std::vector<ReducedState> out;
    const auto n_out = static_cast<long>(std::floor(t_end / dt_out + 1e-9));
    double t = s0.t;
    auto record = [&](double time) {
        if (!(y[3] > 0.0)) throw std::runtime_error("evolve_reduced: W left the positive range");
        out.push_back({cplx(y[0], y[1]), y[2], y[3], s0.k, time});
    };
    record(t);
    for (long i = 1; i <= n_out + 1; ++i) {
        double target = s0.t + static_cast<double>(i) * dt_out;
        if (i == n_out + 1) {
            if (s0.t + t_end - t <= 1e-9 * std::max(1.0, t_end)) break;
            target = s0.t + t_end;
        }
        const auto steps = static_cast<long>(std::ceil((target - t) / dt - 1e-9));
        const double h = (target - t) / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) stepper.do_step(rhs, y, t + static_cast<double>(s) * h, h);
        t = target;
        record(t);
    }
    return out;
}

}  // namespace

EffectiveDrive EffectiveDrive::bare() { return EffectiveDrive(); }

EffectiveDrive EffectiveDrive::analytic(const SystemParams& params, int k) {
    EffectiveDrive d;
    d.mode_ = DriveMode::kAnalytic;
    d.constant_ = effective_drive_factor_analytic(params, k);
    return d;
}

EffectiveDrive EffectiveDrive::matrix_element(const DressedBasis& basis, int k) {
    EffectiveDrive d;
    d.mode_ = DriveMode::kMatrixElement;
    d.table_.resize(basis.n_res() - 1);
    for (int n = 1; n < basis.n_res(); ++n) d.table_[n - 1] = effective_drive(basis, n, k, 1.0).real();
    return d;
}

EffectiveDrive EffectiveDrive::from_mode(DriveMode mode, const SystemParams& params, const DressedBasis* basis,
                                         int k) {
    switch (mode) {
        case DriveMode::kBare:
            return bare();
        case DriveMode::kAnalytic:
            return analytic(params, k);
        case DriveMode::kMatrixElement:
            if (basis == nullptr) throw std::invalid_argument("matrix-element drive mode requires a DressedBasis");
            return matrix_element(*basis, k);
    }
    throw std::invalid_argument("unknown drive mode");
}

double EffectiveDrive::factor(double n) const {
    if (mode_ != DriveMode::kMatrixElement) return constant_;
    const double x = std::max(n, 1.0) - 1.0;
    const double top = static_cast<double>(table_.size() - 1);
    if (x >= top) return table_.back();
    const auto lo = static_cast<size_t>(x);
    const double w = x - static_cast<double>(lo);
    return (1.0 - w) * table_[lo] + w * table_[lo + 1];
}

ReducedTrajectory evolve_reduced(const LadderProfile& profile, const DriveEnvelope& envelope,
                                 const EffectiveDrive& drive, const ReducedState& state0, double t_end,
                                 double dt_out, const ReducedOptions& options) {
    if (!(state0.W > 0.0)) throw std::invalid_argument("evolve_reduced: W must be positive");
    if (!(options.dt > 0.0) || !(dt_out > 0.0) || !(t_end >= 0.0)) {
        throw std::invalid_argument("evolve_reduced: steps and duration must be positive");
    }
    const ReducedRhs rhs{profile, envelope, drive, options.zero_nonlinearity};
    ReducedTrajectory traj;
    traj.states = integrate(rhs, state0, t_end, dt_out, options.dt);
    if (options.check_halving) {
        const auto fine = integrate(rhs, state0, t_end, dt_out, 0.5 * options.dt);
        for (size_t i = 0; i < fine.size(); ++i) {
            const auto& a = traj.states[i];
            const auto& b = fine[i];
            traj.halving_error = std::max({traj.halving_error, std::abs(a.beta - b.beta), std::abs(a.K - b.K),
                                           std::abs(a.W - b.W)});
        }
    }
    return traj;
}

SqueezeOptical to_squeezed(const ReducedState& state) {
    return shear_to_squeeze(ShearedParams{state.beta, state.K, state.W, state.k});
}

cplx linear_resonator_beta(cplx eps, double delta, double t) {
    if (delta == 0.0) return cplx(0.0, -1.0) * eps * t;
    return eps / delta * (std::polar(1.0, -delta * t) - 1.0);
}

}  // namespace dressq
