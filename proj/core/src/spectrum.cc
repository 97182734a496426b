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

#include "dressq/spectrum.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dressq {
namespace {

struct StripMembers {
    int k_min;
    int k_max;
    int size() const { return k_max - k_min + 1; }
};

StripMembers strip_members(int strip, int n_res) {
    return StripMembers{std::max(0, strip - (n_res - 1)), std::min(kTransmonLevels - 1, strip)};
}

void hash_bytes(std::uint64_t& h, std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
        h ^= (word >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
}

}  // namespace

std::uint64_t params_hash(const SystemParams& params) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double v : {params.f_r, params.f_q, params.eta, params.g, params.f_d, params.e0}) {
        // +0.0 and -0.0 describe the same system.
        hash_bytes(h, std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v));
    }
    hash_bytes(h, static_cast<std::uint64_t>(params.n_res));
    hash_bytes(h, static_cast<std::uint64_t>(params.n_tr));
    return h;
}

DressedBasis::DressedBasis(SystemParams params, std::vector<double> energies, std::vector<StripVector> vectors)
    : params_(params), energies_(std::move(energies)), vectors_(std::move(vectors)) {
    if (energies_.size() != static_cast<size_t>(params_.dim()) || vectors_.size() != energies_.size()) {
        throw std::invalid_argument("DressedBasis: array sizes do not match 7*n_res");
    }
}

std::vector<cplx> DressedBasis::to_dressed(std::span<const cplx> bare) const {
    if (static_cast<int>(bare.size()) != dim()) throw std::invalid_argument("to_dressed: dimension mismatch");
    std::vector<cplx> out(dim());
    const int n_res = this->n_res();
    for (int n = 0; n < n_res; ++n) {
        for (int k = 0; k < kTransmonLevels; ++k) {
            const int s = n + k;
            const auto m = strip_members(s, n_res);
            const auto& v = vectors_[flat_index(n, k)];
            cplx acc = 0.0;
            for (int kp = m.k_min; kp <= m.k_max; ++kp) acc += v[kp] * bare[flat_index(s - kp, kp)];
            out[flat_index(n, k)] = acc;
        }
    }
    return out;
}

std::vector<cplx> DressedBasis::to_bare(std::span<const cplx> dressed) const {
    if (static_cast<int>(dressed.size()) != dim()) throw std::invalid_argument("to_bare: dimension mismatch");
    std::vector<cplx> out(dim(), 0.0);
    const int n_res = this->n_res();
    for (int n = 0; n < n_res; ++n) {
        for (int k = 0; k < kTransmonLevels; ++k) {
            const cplx c = dressed[flat_index(n, k)];
            if (c == 0.0) continue;
            const int s = n + k;
            const auto m = strip_members(s, n_res);
            const auto& v = vectors_[flat_index(n, k)];
            for (int kp = m.k_min; kp <= m.k_max; ++kp) out[flat_index(s - kp, kp)] += v[kp] * c;
        }
    }
    return out;
}

std::vector<cplx> DressedBasis::ladder(std::span<const cplx> dressed, int k) const {
    if (k < 0 || k >= kTransmonLevels) throw std::out_of_range("ladder index out of range");
    std::vector<cplx> c(n_res());
    for (int n = 0; n < n_res(); ++n) c[n] = dressed[flat_index(n, k)];
    return c;
}

std::vector<cplx> DressedBasis::embed_ladder(std::span<const cplx> ladder_amps, int k) const {
    if (static_cast<int>(ladder_amps.size()) > n_res()) {
        throw std::invalid_argument("embed_ladder: more amplitudes than resonator levels");
    }
    std::vector<cplx> dressed(dim(), 0.0);
    for (size_t n = 0; n < ladder_amps.size(); ++n) dressed[flat_index(static_cast<int>(n), k)] = ladder_amps[n];
    return to_bare(dressed);
}

double DressedBasis::bare_lowering_element(int n1, int k1, int n2, int k2) const {
    const int s1 = n1 + k1;
    const int s2 = n2 + k2;
    if (s1 != s2 - 1) return 0.0;
    const auto& v1 = vectors_[flat_index(n1, k1)];
    const auto& v2 = vectors_[flat_index(n2, k2)];
    double acc = 0.0;
    for (int kp = 0; kp < kTransmonLevels; ++kp) {
        const int n_bare = s2 - kp;
        if (n_bare < 1) continue;
        acc += v1[kp] * v2[kp] * std::sqrt(static_cast<double>(n_bare));
    }
    return acc;
}

Eigen::MatrixXd DressedBasis::dense_u() const {
    const int d = dim();
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(d, d);
    for (int n = 0; n < n_res(); ++n) {
        for (int k = 0; k < kTransmonLevels; ++k) {
            const int s = n + k;
            const auto m = strip_members(s, n_res());
            for (int kp = m.k_min; kp <= m.k_max; ++kp) {
                u(flat_index(s - kp, kp), flat_index(n, k)) = component(n, k, kp);
            }
        }
    }
    return u;
}

std::vector<int> identify_strip(std::span<const double> bare_diag, std::span<const StripEigenpair> pairs) {
    const size_t m = bare_diag.size();
    if (pairs.size() != m) throw std::invalid_argument("identify_strip: pair count differs from strip size");
    std::vector<int> bare_order(m), eig_order(m);
    std::iota(bare_order.begin(), bare_order.end(), 0);
    std::iota(eig_order.begin(), eig_order.end(), 0);
    std::stable_sort(bare_order.begin(), bare_order.end(),
                     [&](int a, int b) { return bare_diag[a] < bare_diag[b]; });
    std::stable_sort(eig_order.begin(), eig_order.end(),
                     [&](int a, int b) { return pairs[a].energy < pairs[b].energy; });
    double scale = 1.0;
    for (const auto& p : pairs) scale = std::max(scale, std::abs(p.energy));
    for (size_t r = 1; r < m; ++r) {
        if (pairs[eig_order[r]].energy - pairs[eig_order[r - 1]].energy < 1e-12 * scale) {
            throw std::runtime_error("identify_strip: degenerate eigenvalues within an RWA strip");
        }
    }
    std::vector<int> assignment(m);
    for (size_t r = 0; r < m; ++r) assignment[bare_order[r]] = eig_order[r];
    return assignment;
}

DressedBasis diagonalize(const RotatingHamiltonian& h0, const SystemParams& params) {
    const int n_res = h0.n_res();
    if (n_res != params.n_res) throw std::invalid_argument("diagonalize: h0 and params disagree on n_res");
    const auto diag = h0.diag();
    const auto hop = h0.hop();
    const double h_norm = std::max(h0.norm_bound(), 1.0);

    std::vector<double> energies(h0.dim(), 0.0);
    std::vector<DressedBasis::StripVector> vectors(h0.dim());

    const int last_strip = n_res - 1 + kTransmonLevels - 1;
    for (int s = 0; s <= last_strip; ++s) {
        const auto m = strip_members(s, n_res);
        const int size = m.size();
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(size, size);
        std::vector<double> bare(size);
        for (int j = 0; j < size; ++j) {
            const int kp = m.k_min + j;
            const int i = flat_index(s - kp, kp);
            block(j, j) = diag[i];
            bare[j] = diag[i];
            if (j + 1 < size) {
                block(j, j + 1) = hop[i];
                block(j + 1, j) = hop[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("diagonalize: eigensolver failed on strip " + std::to_string(s));
        }
        std::vector<StripEigenpair> pairs(size);
        for (int j = 0; j < size; ++j) {
            pairs[j].energy = solver.eigenvalues()(j);
            const Eigen::VectorXd v = solver.eigenvectors().col(j);
            const double residual = (block * v - pairs[j].energy * v).norm();
            if (residual > 1e-9 * h_norm) {
                throw std::runtime_error("diagonalize: eigenpair residual too large on strip " + std::to_string(s));
            }
            pairs[j].vector.assign(v.data(), v.data() + size);
        }
        const auto assignment = identify_strip(bare, pairs);
        for (int j = 0; j < size; ++j) {
            const int k = m.k_min + j;
            const int n = s - k;
            const auto& p = pairs[assignment[j]];
            energies[flat_index(n, k)] = p.energy;
            auto& out = vectors[flat_index(n, k)];
            out.fill(0.0);
            for (int jj = 0; jj < size; ++jj) out[m.k_min + jj] = p.vector[jj];
        }
    }

    DressedBasis basis(params, std::move(energies), std::move(vectors));

    // Orient the eigenvectors. DressedBasis is immutable, so work on a copy of
    // the vectors and rebuild once.
    std::vector<DressedBasis::StripVector> oriented(basis.dim());
    for (int n = 0; n < n_res; ++n)
        for (int k = 0; k < kTransmonLevels; ++k) oriented[flat_index(n, k)] = basis.strip_vector(n, k);
    std::vector<double> final_energies(basis.energies().begin(), basis.energies().end());

    auto flip = [&](int n, int k) {
        for (double& x : oriented[flat_index(n, k)]) x = -x;
    };
    auto lowering = [&](int n1, int n2, int k) {
        const int s2 = n2 + k;
        double acc = 0.0;
        for (int kp = 0; kp < kTransmonLevels; ++kp) {
            if (s2 - kp < 1) continue;
            acc += oriented[flat_index(n1, k)][kp] * oriented[flat_index(n2, k)][kp] *
                   std::sqrt(static_cast<double>(s2 - kp));
        }
        return acc;
    };
    for (int k = 0; k < kTransmonLevels; ++k) {
        const auto& v0 = oriented[flat_index(0, k)];
        const auto dominant = std::max_element(v0.begin(), v0.end(),
                                               [](double a, double b) { return std::abs(a) < std::abs(b); });
        if (*dominant < 0.0) flip(0, k);
        for (int n = 1; n < n_res; ++n) {
            if (lowering(n - 1, n, k) < 0.0) flip(n, k);
        }
    }
    return DressedBasis(params, std::move(final_energies), std::move(oriented));
}

DressedBasis diagonalize(const SystemParams& params) { return diagonalize(build_h0(params), params); }

double resonant_drive_frequency(const SystemParams& params, int k) {
    if (k < 0 || k + 1 >= kTransmonLevels) throw std::out_of_range("resonant_drive_frequency: ladder out of range");
    SystemParams lab = params;
    lab.f_d = 0.0;
    lab.n_res = kTransmonLevels + 2;
    const DressedBasis basis = diagonalize(lab);
    return (basis.energy(1, k) - basis.energy(0, k)) / kTwoPi;
}

LadderProfile::LadderProfile(int k, std::vector<double> omega, std::vector<double> domega_dn)
    : k_(k), omega_(std::move(omega)), domega_(std::move(domega_dn)) {
    if (omega_.size() < 2 || domega_.size() != omega_.size()) {
        throw std::invalid_argument("LadderProfile: need at least two points and matching derivative grid");
    }
}

LadderProfile LadderProfile::constant(int k, double omega, int n_points) {
    return LadderProfile(k, std::vector<double>(n_points, omega), std::vector<double>(n_points, 0.0));
}

namespace {
double interpolate(std::span<const double> grid, double n) {
    if (!(n >= 0.0)) n = 0.0;
    const double max_n = static_cast<double>(grid.size() - 1);
    if (n > max_n) {
        throw std::out_of_range("LadderProfile: n = " + std::to_string(n) + " beyond profile range " +
                                std::to_string(max_n));
    }
    const size_t lo = std::min(static_cast<size_t>(n), grid.size() - 2);
    const double w = n - static_cast<double>(lo);
    return (1.0 - w) * grid[lo] + w * grid[lo + 1];
}
}  // namespace

double LadderProfile::omega_at(double n) const { return interpolate(omega_, n); }
double LadderProfile::domega_at(double n) const { return interpolate(domega_, n); }

LadderProfile ladder_profile(const DressedBasis& basis, int k) {
    const int n_res = basis.n_res();
    if (n_res < 3) throw std::invalid_argument("ladder_profile: need n_res >= 3");
    std::vector<double> omega(n_res - 1);
    for (int n = 0; n + 1 < n_res; ++n) omega[n] = basis.energy(n + 1, k) - basis.energy(n, k);
    const size_t m = omega.size();
    std::vector<double> d(m);
    d[0] = omega[1] - omega[0];
    d[m - 1] = omega[m - 1] - omega[m - 2];
    for (size_t i = 1; i + 1 < m; ++i) d[i] = 0.5 * (omega[i + 1] - omega[i - 1]);
    return LadderProfile(k, std::move(omega), std::move(d));
}

double critical_photon_number(const SystemParams& params) {
    const double delta = params.f_r - params.f_q;
    if (delta == 0.0) throw std::invalid_argument("critical_photon_number: zero detuning");
    return delta * delta / (4.0 * params.g * params.g);
}

double ladder_detuning(const DressedBasis& basis, int n, int lower_k) {
    if (n < 0 || n > basis.n_res() - 2) throw std::out_of_range("ladder_detuning: n out of range");
    if (lower_k < 0 || lower_k + 1 >= kTransmonLevels) throw std::out_of_range("ladder_detuning: bad ladder");
    return basis.energy(n + 1, lower_k) - basis.energy(n, lower_k + 1);
}

double detuning_n(const DressedBasis& basis, int n) { return ladder_detuning(basis, n, 0); }

double detuning_at(const DressedBasis& basis, double nbar, int lower_k) {
    const int n = std::clamp(static_cast<int>(std::lround(nbar)), 0, basis.n_res() - 2);
    return ladder_detuning(basis, n, lower_k);
}

double detuning_weighted(const DressedBasis& basis, std::span<const double> weights, int lower_k) {
    double num = 0.0, den = 0.0;
    const int top = std::min(static_cast<int>(weights.size()), basis.n_res() - 1);
    for (int n = 0; n < top; ++n) {
        num += weights[n] * ladder_detuning(basis, n, lower_k);
        den += weights[n];
    }
    if (!(den > 0.0)) throw std::invalid_argument("detuning_weighted: weights sum to zero");
    return num / den;
}

double chi_approx(const SystemParams& params) {
    const double delta = params.detuning();
    const double eta = params.eta_rad();
    const double denom = delta * (delta + eta);
    if (delta == 0.0 || delta + eta == 0.0) throw std::invalid_argument("chi_approx: singular detuning");
    const double g = params.g_rad();
    return -(params.omega_r() / params.omega_q()) * g * g * eta / denom;
}

Eigen::SparseMatrix<double> dressed_lowering(const DressedBasis& basis) {
    const int n_res = basis.n_res();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(n_res) * kTransmonLevels * 49);
    for (int n = 0; n + 1 < n_res; ++n) {
        const double amp = std::sqrt(static_cast<double>(n + 1));
        for (int k = 0; k < kTransmonLevels; ++k) {
            const int s = n + k;
            const auto row_m = strip_members(s, n_res);
            const auto col_m = strip_members(s + 1, n_res);
            for (int kr = row_m.k_min; kr <= row_m.k_max; ++kr) {
                const double vr = basis.component(n, k, kr);
                if (vr == 0.0) continue;
                for (int kc = col_m.k_min; kc <= col_m.k_max; ++kc) {
                    const double vc = basis.component(n + 1, k, kc);
                    if (vc == 0.0) continue;
                    triplets.emplace_back(flat_index(s - kr, kr), flat_index(s + 1 - kc, kc), amp * vr * vc);
                }
            }
        }
    }
    Eigen::SparseMatrix<double> m(basis.dim(), basis.dim());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

std::vector<cplx> apply_dressed_lowering(std::span<const cplx> dressed, int n_res) {
    if (static_cast<int>(dressed.size()) != n_res * kTransmonLevels) {
        throw std::invalid_argument("apply_dressed_lowering: dimension mismatch");
    }
    std::vector<cplx> out(dressed.size(), 0.0);
    for (int n = 0; n + 1 < n_res; ++n) {
        const double amp = std::sqrt(static_cast<double>(n + 1));
        for (int k = 0; k < kTransmonLevels; ++k) out[flat_index(n, k)] = amp * dressed[flat_index(n + 1, k)];
    }
    return out;
}

cplx effective_drive(const DressedBasis& basis, int n, int k, cplx eps) {
    if (n < 1 || n > basis.n_res() - 1) throw std::out_of_range("effective_drive: n must be in [1, N-1]");
    return eps * basis.bare_lowering_element(n - 1, k, n, k) / std::sqrt(static_cast<double>(n));
}

double effective_drive_factor_analytic(const SystemParams& params, int k) {
    const double x = params.g / (params.f_r - params.f_q);
    switch (k) {
        case 0:
            return 1.0 - 0.5 * x * x;
        case 1: {
            const double y = std::sqrt(2.0) * params.g / (params.f_r - params.f_q + params.eta);
            return 1.0 + 0.5 * x * x - 0.5 * y * y;
        }
        default:
            throw std::invalid_argument("effective_drive_factor_analytic: only ladders 0 and 1 are supported");
    }
}

}  // namespace dressq
