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

#include "dressq/entangle.h"

#include <cmath>
#include <stdexcept>

namespace dressq {

std::array<double, kTransmonLevels> eigen_coeffs(const DressedBasis& basis, int n, int k) {
    if (n < 0 || n >= basis.n_res() || k < 0 || k >= kTransmonLevels) {
        throw std::out_of_range("eigen_coeffs: (n, k) outside the basis");
    }
    return basis.strip_vector(n, k);
}

cplx shifted_overlap(std::span<const cplx> c, int l) {
    cplx acc = 0.0;
    const int len = static_cast<int>(c.size());
    for (int n = std::max(0, -l); n < len && n + l < len; ++n) acc += std::conj(c[n]) * c[n + l];
    return acc;
}

ProductApprox product_approx(const DressedBasis& basis, std::span<const cplx> c, int k) {
    if (static_cast<int>(c.size()) != basis.n_res()) throw std::invalid_argument("product_approx: ladder length mismatch");
    ProductApprox p;
    p.k = k;
    p.resonator_amps.assign(c.begin(), c.end());
    p.d.fill(0.0);
    double weight = 0.0;
    for (int n = 0; n < basis.n_res(); ++n) {
        const double w = std::norm(c[n]);
        if (w == 0.0) continue;
        weight += w;
        const auto& v = basis.strip_vector(n, k);
        for (int kp = 0; kp < kTransmonLevels; ++kp) p.d[kp] += w * v[kp];
    }
    if (weight <= 0.0) throw std::invalid_argument("product_approx: zero state");
    double norm = 0.0;
    for (double x : p.d) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : p.d) x /= norm;

    for (int kp = 0; kp < kTransmonLevels; ++kp) {
        const cplx s = shifted_overlap(c, kp - k);
        p.phases[kp] = std::arg(s);
        p.transmon_amps[kp] = std::polar(p.d[kp], p.phases[kp]);
    }
    const auto exact = basis.embed_ladder(c, k);
    const auto approx = product_state(p, basis.n_res());
    cplx ov = 0.0;
    for (size_t i = 0; i < exact.size(); ++i) ov += std::conj(approx[i]) * exact[i];
    p.infidelity = std::max(0.0, 1.0 - std::norm(ov) / weight);
    return p;
}

std::vector<cplx> product_state(const ProductApprox& product, int n_res) {
    std::vector<cplx> psi(static_cast<size_t>(n_res) * kTransmonLevels, 0.0);
    const int len = std::min(n_res, static_cast<int>(product.resonator_amps.size()));
    for (int n = 0; n < len; ++n) {
        for (int kp = 0; kp < kTransmonLevels; ++kp) {
            psi[flat_index(n, kp)] = product.resonator_amps[n] * product.transmon_amps[kp];
        }
    }
    return psi;
}

Eigen::Matrix<cplx, kTransmonLevels, kTransmonLevels> transmon_density(std::span<const cplx> psi, int n_res) {
    if (static_cast<int>(psi.size()) != n_res * kTransmonLevels) {
        throw std::invalid_argument("transmon_density: dimension mismatch");
    }
    Eigen::Matrix<cplx, kTransmonLevels, kTransmonLevels> rho = Eigen::Matrix<cplx, kTransmonLevels, kTransmonLevels>::Zero();
    for (int n = 0; n < n_res; ++n) {
        for (int a = 0; a < kTransmonLevels; ++a) {
            const cplx pa = psi[flat_index(n, a)];
            if (pa == 0.0) continue;
            for (int b = 0; b < kTransmonLevels; ++b) rho(a, b) += pa * std::conj(psi[flat_index(n, b)]);
        }
    }
    return rho;
}

namespace {
Eigen::VectorXd transmon_spectrum(std::span<const cplx> psi, int n_res) {
    const Eigen::MatrixXcd rho = transmon_density(psi, n_res);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
    return solver.eigenvalues();
}
}  // namespace

double entanglement_of_formation(std::span<const cplx> psi, int n_res) {
    const auto lambda = transmon_spectrum(psi, n_res);
    double s = 0.0;
    for (int i = 0; i < kTransmonLevels; ++i) {
        const double x = lambda(i);
        if (x > 1e-300) s -= x * std::log2(x);
    }
    return std::max(0.0, s);
}

double best_product_infidelity(std::span<const cplx> psi, int n_res) {
    const auto lambda = transmon_spectrum(psi, n_res);
    return std::max(0.0, 1.0 - lambda.maxCoeff());
}

TransmonAmps transmon_lab_frame_state(const ProductApprox& product, double omega_r, double t) {
    TransmonAmps out;
    for (int kp = 0; kp < kTransmonLevels; ++kp) {
        const int l = kp - product.k;
        out[kp] = std::polar(product.d[kp], product.phases[kp] - l * omega_r * t);
    }
    return out;
}

}  // namespace dressq
