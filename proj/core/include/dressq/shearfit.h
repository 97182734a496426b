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

#ifndef DRESSQ_SHEARFIT_H
#define DRESSQ_SHEARFIT_H

#include <functional>
#include <span>
#include <vector>

#include "dressq/spectrum.h"

namespace dressq {

struct ShearEstimate {
    double q_beta2 = 0.0;
    double infidelity = 0.0;  // 3 (q|β|²)²
};

/// Small-shear infidelity 3 (q|β|²)².
double shear_infidelity(double q_beta2);

/// (1/12)(ε² t³ dω/dn)² for a resonant drive; eps is ε/2π in GHz, t in ns,
/// domega_dn in rad/ns.
double infidelity_closed_form(double eps, double t, double domega_dn);

struct QBetaTrace {
    std::vector<double> times;
    std::vector<ShearEstimate> estimates;
    /// Largest change of q|β|² when the grid is refined by midpoint insertion.
    double refinement_error = 0.0;
};

/// Trapezoidal integral of d(q|β|²)/dt = (n̄/2) dω/dn|_n̄ from t_grid[0].
QBetaTrace integrate_qbeta2(const LadderProfile& profile, const std::function<double(double)>& nbar_of_t,
                            std::span<const double> t_grid);

}  // namespace dressq

#endif  // DRESSQ_SHEARFIT_H
