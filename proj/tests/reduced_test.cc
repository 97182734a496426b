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

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.h"

namespace dressq {
namespace {

using testing::resonant_params;

LadderProfile linear_profile(double omega0, double slope, int points) {
    std::vector<double> omega(points), domega(points, slope);
    for (int n = 0; n < points; ++n) omega[n] = omega0 + slope * n;
    return LadderProfile(0, omega, domega);
}

TEST(Reduced, FreeEvolutionRotatesBeta) {
    const double w = 0.05;
    const ReducedState s0{cplx(3.0, 1.0), 0.2, 0.7, 0, 0.0};
    const auto traj = evolve_reduced(LadderProfile::constant(0, w, 50), DriveEnvelope::sudden(0.0),
                                     EffectiveDrive::bare(), s0, 40.0, 1.0);
    ASSERT_EQ(traj.states.size(), 41u);
    for (const ReducedState& s : traj.states) {
        EXPECT_EQ(s.K, s0.K);
        EXPECT_EQ(s.W, s0.W);
        EXPECT_LT(std::abs(s.beta - s0.beta * std::polar(1.0, -w * s.t)), 1e-9) << s.t;
    }
}

TEST(Reduced, ShortTimeFromVacuum) {
    const double eps = 0.01, slope = -0.003;
    const double e = angular(eps);
    const auto traj = evolve_reduced(linear_profile(0.0, slope, 50), DriveEnvelope::sudden(eps),
                                     EffectiveDrive::bare(), ReducedState{}, 5.0, 1.0);
    for (const ReducedState& s : traj.states) {
        ASSERT_TRUE(std::isfinite(s.K) && std::isfinite(s.W)) << s.t;
        if (s.t == 0.0) continue;
        EXPECT_LT(std::abs(s.beta - cplx(0.0, -e * s.t)), 1e-3 * e * s.t) << s.t;
        EXPECT_NEAR(s.W, 1.0, 1e-6);
        EXPECT_NEAR(s.K / (slope * e * e * std::pow(s.t, 3) / 6.0), 1.0, 1e-2) << s.t;
    }
}

TEST(Reduced, DriveConservesSqueezeWithoutNonlinearity) {
    const ReducedState s0{cplx(5.0, 0.0), 0.3, 0.8, 0, 0.0};
    ReducedOptions opt;
    opt.zero_nonlinearity = true;
    const auto traj = evolve_reduced(LadderProfile::constant(0, 0.0, 400), DriveEnvelope::sudden(cplx(0.01, 0.004)),
                                     EffectiveDrive::bare(), s0, 100.0, 2.0, opt);
    const SqueezeOptical first = to_squeezed(s0);
    EXPECT_GT(first.r, 0.1);
    EXPECT_GT(std::abs(traj.states.back().beta - s0.beta), 5.0);
    for (const ReducedState& s : traj.states) {
        const SqueezeOptical sq = to_squeezed(s);
        EXPECT_NEAR(sq.r, first.r, 1e-6) << s.t;
        EXPECT_NEAR(std::remainder(sq.theta - first.theta, kTwoPi), 0.0, 1e-6) << s.t;
        EXPECT_GT(s.W, 0.0);
    }
}

TEST(Reduced, LinearResonator) {
    const double delta = 0.037;
    const cplx eps(0.012, -0.005);
    const cplx e = angular(1.0) * eps;
    ReducedOptions opt;
    opt.zero_nonlinearity = true;
    const auto traj = evolve_reduced(LadderProfile::constant(0, delta, 300), DriveEnvelope::sudden(eps),
                                     EffectiveDrive::bare(), ReducedState{}, 200.0, 5.0, opt);
    for (const ReducedState& s : traj.states) {
        // β̇ = -iδβ - iε from β(0) = 0.
        const cplx exact = -cplx(0.0, 1.0) * e * (1.0 - std::polar(1.0, -delta * s.t)) / cplx(0.0, delta);
        EXPECT_LT(std::abs(s.beta - exact), 1e-8) << s.t;
        EXPECT_LT(std::abs(linear_resonator_beta(e, delta, s.t) - exact), 1e-12);
    }
    EXPECT_LT(std::abs(linear_resonator_beta(e, 0.0, 3.0) - cplx(0.0, -3.0) * e), 1e-15);
}

TEST(Reduced, DriveModesDifferAtSecondOrder) {
    const SystemParams p = resonant_params(120);
    const DressedBasis basis = diagonalize(p);
    const LadderProfile profile = ladder_profile(basis, 0);
    const auto env = DriveEnvelope::sudden(0.01);
    std::vector<cplx> beta;
    for (DriveMode mode : {DriveMode::kBare, DriveMode::kAnalytic, DriveMode::kMatrixElement}) {
        const auto drive = EffectiveDrive::from_mode(mode, p, &basis, 0);
        EXPECT_EQ(drive.mode(), mode);
        beta.push_back(evolve_reduced(profile, env, drive, ReducedState{}, 60.0, 60.0).states.back().beta);
    }
    const double g_over_delta = p.g / (p.f_r - p.f_q);
    const double scale = std::abs(beta[0]) * g_over_delta * g_over_delta;
    EXPECT_GT(std::abs(beta[1] - beta[0]), 0.05 * scale);
    EXPECT_LT(std::abs(beta[1] - beta[0]), 5.0 * scale);
    EXPECT_LT(std::abs(beta[2] - beta[0]), 5.0 * scale);
    EXPECT_LT(std::abs(beta[2] - beta[1]), std::abs(beta[1] - beta[0]));
}

TEST(Reduced, EffectiveDriveFactors) {
    const SystemParams p = resonant_params(40);
    EXPECT_EQ(EffectiveDrive::bare().factor(10.0), 1.0);
    const auto analytic = EffectiveDrive::analytic(p, 0);
    EXPECT_EQ(analytic.factor(3.0), analytic.factor(30.0));
    EXPECT_THROW(EffectiveDrive::from_mode(DriveMode::kMatrixElement, p, nullptr, 0), std::invalid_argument);
    const DressedBasis basis = diagonalize(p);
    const auto m = EffectiveDrive::matrix_element(basis, 0);
    EXPECT_EQ(m.factor(0.3), m.factor(1.0));
    EXPECT_NEAR(m.factor(1.0), analytic.factor(1.0), 0.01);
}

TEST(Reduced, InitialStateIsCoherent) {
    const SqueezeOptical sq = to_squeezed(ReducedState{});
    EXPECT_EQ(sq.r, 0.0);
    EXPECT_EQ(to_squeezed(ReducedState{cplx(4.0, 2.0), 0.0, 1.0, 1, 0.0}).r, 0.0);
}

TEST(Reduced, HalvingCheckAndErrors) {
    ReducedOptions opt;
    opt.check_halving = true;
    const auto profile = linear_profile(0.0, -0.003, 200);
    const auto traj = evolve_reduced(profile, DriveEnvelope::sudden(0.01), EffectiveDrive::bare(), ReducedState{},
                                     100.0, 10.0, opt);
    EXPECT_GT(traj.halving_error, 0.0);
    EXPECT_LT(traj.halving_error, 1e-8);
    EXPECT_THROW(evolve_reduced(linear_profile(0.0, -0.003, 20), DriveEnvelope::sudden(0.01), EffectiveDrive::bare(),
                                ReducedState{}, 200.0, 10.0),
                 std::out_of_range);
    EXPECT_THROW(evolve_reduced(profile, DriveEnvelope::sudden(0.01), EffectiveDrive::bare(),
                                ReducedState{0.0, 0.0, 0.0, 0, 0.0}, 10.0, 1.0),
                 std::invalid_argument);
}

}  // namespace
}  // namespace dressq
