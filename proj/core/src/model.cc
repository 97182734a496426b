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

#include "dressq/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dressq {

void SystemParams::validate() const {
    if (!(f_q > 0.0)) {
        throw std::invalid_argument("f_q must be positive, got " + std::to_string(f_q));
    }
    if (!(f_r > f_q)) {
        throw std::invalid_argument("f_r must exceed f_q (resonator above qubit)");
    }
    if (!(eta > 0.0)) {
        throw std::invalid_argument("eta must be positive, got " + std::to_string(eta));
    }
    if (!(g > 0.0)) {
        throw std::invalid_argument("g must be positive, got " + std::to_string(g));
    }
    if (n_res < 2) {
        throw std::invalid_argument("n_res must be at least 2, got " + std::to_string(n_res));
    }
    if (n_tr != kTransmonLevels) {
        throw std::invalid_argument("n_tr is fixed at 7, got " + std::to_string(n_tr));
    }
    if (!std::isfinite(f_d) || !std::isfinite(e0)) {
        throw std::invalid_argument("f_d and e0 must be finite");
    }
}

SystemParams default_params() { return SystemParams{}; }

DriveEnvelope DriveEnvelope::sudden(cplx eps) {
    DriveEnvelope env;
    env.kind_ = Kind::kSuddenConstant;
    env.eps_ = eps;
    return env;
}

DriveEnvelope DriveEnvelope::linear_ramp(cplx eps, double ramp_ns) {
    if (!(ramp_ns > 0.0)) {
        throw std::invalid_argument("ramp_ns must be positive");
    }
    DriveEnvelope env;
    env.kind_ = Kind::kLinearRamp;
    env.eps_ = eps;
    env.ramp_ns_ = ramp_ns;
    return env;
}

DriveEnvelope DriveEnvelope::tabulated(std::vector<Sample> table) {
    if (table.empty()) {
        throw std::invalid_argument("tabulated envelope needs at least one sample");
    }
    for (size_t i = 1; i < table.size(); ++i) {
        if (!(table[i].t_ns > table[i - 1].t_ns)) {
            throw std::invalid_argument("tabulated envelope times must be strictly increasing");
        }
    }
    DriveEnvelope env;
    env.kind_ = Kind::kTabulated;
    env.eps_ = table.back().eps;
    env.table_ = std::move(table);
    return env;
}

cplx DriveEnvelope::at(double t_ns) const {
    switch (kind_) {
        case Kind::kSuddenConstant:
            return t_ns >= 0.0 ? eps_ : cplx{0.0};
        case Kind::kLinearRamp:
            if (t_ns <= 0.0) return 0.0;
            return eps_ * std::min(t_ns / ramp_ns_, 1.0);
        case Kind::kTabulated: {
            if (t_ns <= table_.front().t_ns) return table_.front().eps;
            if (t_ns >= table_.back().t_ns) return table_.back().eps;
            auto hi = std::upper_bound(table_.begin(), table_.end(), t_ns,
                                       [](double t, const Sample& s) { return t < s.t_ns; });
            auto lo = hi - 1;
            double w = (t_ns - lo->t_ns) / (hi->t_ns - lo->t_ns);
            return (1.0 - w) * lo->eps + w * hi->eps;
        }
    }
    return 0.0;
}

double DriveEnvelope::peak() const {
    if (kind_ != Kind::kTabulated) return std::abs(eps_);
    double best = 0.0;
    for (const auto& s : table_) best = std::max(best, std::abs(s.eps));
    return best;
}

DriveEnvelope DriveEnvelope::scaled(cplx factor) const {
    DriveEnvelope env = *this;
    env.eps_ *= factor;
    for (auto& s : env.table_) s.eps *= factor;
    return env;
}

std::array<double, kTransmonLevels> bare_energies(const SystemParams& params) {
    std::array<double, kTransmonLevels> e{};
    for (int k = 0; k < kTransmonLevels; ++k) {
        e[k] = params.e0_rad() + params.omega_q() * k - params.eta_rad() * k * (k - 1) / 2.0;
    }
    return e;
}

RotatingHamiltonian::RotatingHamiltonian(int n_res, std::vector<double> diag, std::vector<double> hop)
    : n_res_(n_res), diag_(std::move(diag)), hop_(std::move(hop)) {
    if (diag_.size() != static_cast<size_t>(n_res_) * kTransmonLevels || hop_.size() != diag_.size()) {
        throw std::invalid_argument("RotatingHamiltonian: band sizes do not match 7*n_res");
    }
}

double RotatingHamiltonian::element(int row, int col) const {
    if (row == col) return diag_[row];
    if (row == col - 6) return hop_[col];
    if (col == row - 6) return hop_[row];
    return 0.0;
}

Eigen::MatrixXd RotatingHamiltonian::dense() const {
    const int d = dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        h(i, i) = diag_[i];
        if (i >= 6 && hop_[i] != 0.0) {
            h(i - 6, i) = hop_[i];
            h(i, i - 6) = hop_[i];
        }
    }
    return h;
}

double RotatingHamiltonian::norm_bound() const {
    const int d = dim();
    double best = 0.0;
    for (int i = 0; i < d; ++i) {
        double row = std::abs(diag_[i]) + std::abs(hop_[i]);
        if (i + 6 < d) row += std::abs(hop_[i + 6]);
        best = std::max(best, row);
    }
    return best;
}

DriveOperator::DriveOperator(int n_res) : n_res_(n_res), raise_(static_cast<size_t>(n_res) * kTransmonLevels) {
    for (int n = 0; n + 1 < n_res; ++n) {
        for (int k = 0; k < kTransmonLevels; ++k) {
            raise_[flat_index(n, k)] = std::sqrt(static_cast<double>(n + 1));
        }
    }
}

double DriveOperator::element(int row, int col) const {
    return row == col + kTransmonLevels ? raise_[col] : 0.0;
}

Eigen::MatrixXd DriveOperator::dense() const {
    const int d = dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i + kTransmonLevels < d; ++i) m(i + kTransmonLevels, i) = raise_[i];
    return m;
}

RotatingHamiltonian build_h0(const SystemParams& params) {
    params.validate();
    const int n_res = params.n_res;
    const int dim = params.dim();
    const auto e = bare_energies(params);
    const double wr = params.omega_r();
    const double wd = params.omega_d();
    const double g = params.g_rad();

    std::vector<double> diag(dim), hop(dim, 0.0);
    for (int n = 0; n < n_res; ++n) {
        for (int k = 0; k < kTransmonLevels; ++k) {
            const int i = flat_index(n, k);
            diag[i] = n * (wr - wd) + (e[k] - k * wd);
            if (n >= 1 && k + 1 < kTransmonLevels) {
                hop[i] = g * std::sqrt(static_cast<double>(n) * (k + 1));
            }
        }
    }
    return RotatingHamiltonian(n_res, std::move(diag), std::move(hop));
}

DriveOperator build_drive_op(const SystemParams& params) {
    params.validate();
    return DriveOperator(params.n_res);
}

void apply_hamiltonian(const RotatingHamiltonian& h0, const DriveOperator& drive, cplx eps,
                       std::span<const cplx> in, std::span<cplx> out) {
    const int d = h0.dim();
    if (static_cast<int>(in.size()) != d || static_cast<int>(out.size()) != d || drive.dim() != d) {
        throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
    }
    const double* diag = h0.diag().data();
    const double* hop = h0.hop().data();
    const double* up = drive.raise().data();
    const cplx eps_c = std::conj(eps);
    constexpr int kHop = 6;
    constexpr int kUp = kTransmonLevels;
    for (int i = 0; i < d; ++i) {
        cplx acc = diag[i] * in[i];
        if (i >= kHop) acc += hop[i] * in[i - kHop];
        if (i + kHop < d) acc += hop[i + kHop] * in[i + kHop];
        if (i >= kUp) acc += eps * up[i - kUp] * in[i - kUp];
        if (i + kUp < d) acc += eps_c * up[i] * in[i + kUp];
        out[i] = acc;
    }
}

Eigen::MatrixXcd dense_hamiltonian(const RotatingHamiltonian& h0, const DriveOperator& drive, cplx eps) {
    Eigen::MatrixXd d = drive.dense();
    Eigen::MatrixXcd h = h0.dense().cast<cplx>();
    h += eps * d.cast<cplx>() + std::conj(eps) * d.transpose().cast<cplx>();
    return h;
}

}  // namespace dressq
