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

#include "dressq/shearfit.h"

#include <cmath>
#include <stdexcept>

namespace dressq {
namespace {

std::vector<double> trapezoid(const LadderProfile& profile, const std::function<double(double)>& nbar_of_t,
                              std::span<const double> t_grid) {
    auto rate = [&](double t) {
        const double n = nbar_of_t(t);
        return 0.5 * n * profile.domega_at(n);
    };
    std::vector<double> out(t_grid.size(), 0.0);
    double prev_rate = rate(t_grid[0]);
    for (size_t i = 1; i < t_grid.size(); ++i) {
        const double h = t_grid[i] - t_grid[i - 1];
        if (!(h > 0.0)) throw std::invalid_argument("integrate_qbeta2: t_grid must be strictly increasing");
        const double r = rate(t_grid[i]);
        out[i] = out[i - 1] + 0.5 * h * (prev_rate + r);
        prev_rate = r;
    }
    return out;
}

}  // namespace

double shear_infidelity(double q_beta2) { return 3.0 * q_beta2 * q_beta2; }

double infidelity_closed_form(double eps, double t, double domega_dn) {
    const double e = angular(eps);
    const double x = e * e * t * t * t * domega_dn;
    return x * x / 12.0;
}

QBetaTrace integrate_qbeta2(const LadderProfile& profile, const std::function<double(double)>& nbar_of_t,
                            std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("integrate_qbeta2: empty time grid");
    QBetaTrace trace;
    trace.times.assign(t_grid.begin(), t_grid.end());
    const auto coarse = trapezoid(profile, nbar_of_t, t_grid);

    std::vector<double> fine_grid;
    fine_grid.reserve(2 * t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0) fine_grid.push_back(0.5 * (t_grid[i - 1] + t_grid[i]));
        fine_grid.push_back(t_grid[i]);
    }
    const auto fine = trapezoid(profile, nbar_of_t, fine_grid);
    for (size_t i = 0; i < t_grid.size(); ++i) {
        trace.refinement_error = std::max(trace.refinement_error, std::abs(fine[2 * i] - coarse[i]));
        trace.estimates.push_back({coarse[i], shear_infidelity(coarse[i])});
    }
    return trace;
}

}  // namespace dressq
