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

#include "dressq/dressed.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <gsl/gsl_multimin.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace dressq {
namespace {

constexpr double kPi = std::numbers::pi;

void normalize(std::vector<cplx>& c) {
    double s = 0.0;
    for (const cplx& x : c) s += std::norm(x);
    if (s <= 0.0) throw std::runtime_error("normalize: zero vector");
    const double inv = 1.0 / std::sqrt(s);
    for (cplx& x : c) x *= inv;
}

double tail_population(std::span<const cplx> c, int levels) {
    double p = 0.0;
    for (size_t n = c.size() > static_cast<size_t>(levels) ? c.size() - levels : 0; n < c.size(); ++n) {
        p += std::norm(c[n]);
    }
    return p;
}

void check_headroom(std::span<const cplx> c, const char* what) {
    const double tail = tail_population(c, 5);
    if (tail > 1e-10) {
        throw std::invalid_argument(std::string(what) + ": state reaches the resonator truncation (top-level population " +
                                    std::to_string(tail) + ")");
    }
}

cplx overlap_coherent(std::span<const cplx> c, cplx alpha) {
    const auto a = coherent_amplitudes(alpha, static_cast<int>(c.size()));
    cplx acc = 0.0;
    for (size_t n = 0; n < c.size(); ++n) acc += std::conj(a[n]) * c[n];
    return acc;
}

struct FitObjective {
    std::span<const cplx> c;
    int evals = 0;
};

double neg_fidelity(const gsl_vector* x, void* p) {
    auto* obj = static_cast<FitObjective*>(p);
    ++obj->evals;
    return -std::norm(overlap_coherent(obj->c, cplx(gsl_vector_get(x, 0), gsl_vector_get(x, 1))));
}

constexpr int kMaxFitEvaluations = 200;

CoherentFit fit_coherent_from(std::span<const cplx> c, cplx seed) {
    FitObjective obj{c};
    const double f_seed = std::norm(overlap_coherent(c, seed));

    gsl_multimin_function fn{&neg_fidelity, 2, &obj};
    gsl_vector* x = gsl_vector_alloc(2);
    gsl_vector* step = gsl_vector_alloc(2);
    gsl_vector_set(x, 0, seed.real());
    gsl_vector_set(x, 1, seed.imag());
    gsl_vector_set_all(step, 0.05);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_multimin_fminimizer_set(s, &fn, x, step);

    bool converged = false;
    while (obj.evals < kMaxFitEvaluations) {
        if (gsl_multimin_fminimizer_iterate(s) != 0) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-6) == GSL_SUCCESS) {
            converged = true;
            break;
        }
    }
    CoherentFit fit{f_seed, seed, converged};
    if (converged && -s->fval >= f_seed) {
        fit.fidelity = -s->fval;
        fit.alpha = cplx(gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1));
    }
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return fit;
}

}  // namespace

std::vector<cplx> coherent_amplitudes(cplx alpha, int n_max) {
    if (n_max < 1) throw std::invalid_argument("coherent_amplitudes: n_max must be positive");
    std::vector<cplx> a(n_max, 0.0);
    const double m = std::norm(alpha);
    if (m == 0.0) {
        a[0] = 1.0;
        return a;
    }
    if (m < 600.0) {
        a[0] = std::exp(-0.5 * m);
        for (int n = 0; n + 1 < n_max; ++n) a[n + 1] = a[n] * alpha / std::sqrt(static_cast<double>(n + 1));
        return a;
    }
    // Large |α|: e^{-|α|²/2} underflows, so work with logarithms.
    const double log_abs = std::log(std::abs(alpha));
    const double phase = std::arg(alpha);
    for (int n = 0; n < n_max; ++n) {
        const double log_mag = -0.5 * m + n * log_abs - 0.5 * std::lgamma(n + 1.0);
        a[n] = std::polar(std::exp(log_mag), n * phase);
    }
    return a;
}

std::vector<cplx> squeezed_amplitudes(const SqueezeOptical& opt, int n_max) {
    if (n_max < 1) throw std::invalid_argument("squeezed_amplitudes: n_max must be positive");
    if (!(opt.r >= 0.0)) throw std::invalid_argument("squeezed_amplitudes: r must be nonnegative");
    const double ch = std::cosh(opt.r);
    const cplx es = std::polar(std::sinh(opt.r), opt.theta);
    const cplx gamma = opt.beta * ch + std::conj(opt.beta) * es;

    // (ā cosh r + ā† e^{iθ} sinh r)|β,ξ> = γ|β,ξ> gives a three-term recurrence.
    // The vacuum amplitude can sit far below the double range, so the working
    // pair is rescaled and each entry remembers its log scale.
    constexpr double kChunk = 1e100;
    const double log_chunk = std::log(kChunk);
    std::vector<cplx> mant(n_max, 0.0);
    std::vector<double> log_scale(n_max, 0.0);
    cplx prev = 0.0;
    cplx cur = 1.0;
    double lscale = 0.0;
    mant[0] = cur;
    for (int n = 0; n + 1 < n_max; ++n) {
        cplx next = gamma * cur;
        if (n > 0) next -= es * std::sqrt(static_cast<double>(n)) * prev;
        next /= ch * std::sqrt(static_cast<double>(n + 1));
        prev = cur;
        cur = next;
        if (std::abs(cur) > kChunk) {
            prev /= kChunk;
            cur /= kChunk;
            lscale += log_chunk;
        }
        mant[n + 1] = cur;
        log_scale[n + 1] = lscale;
    }
    double log_peak = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < n_max; ++n) {
        if (mant[n] != 0.0) log_peak = std::max(log_peak, std::log(std::abs(mant[n])) + log_scale[n]);
    }
    // Match the phase of the closed form, whose vacuum amplitude is
    // exp(-|β|²/2 - β*² e^{iθ} tanh(r)/2)/√cosh r.
    const double phase0 =
        -0.5 * std::tanh(opt.r) * (std::conj(opt.beta) * std::conj(opt.beta) * std::polar(1.0, opt.theta)).imag();
    const cplx rot = std::polar(1.0, phase0);
    std::vector<cplx> c(n_max, 0.0);
    for (int n = 0; n < n_max; ++n) {
        if (mant[n] == 0.0) continue;
        const double mag = std::exp(std::log(std::abs(mant[n])) + log_scale[n] - log_peak);
        c[n] = rot * std::polar(mag, std::arg(mant[n]));
    }
    normalize(c);
    return c;
}

std::vector<cplx> squeezed_amplitudes_expm(const SqueezeOptical& opt, int n_max) {
    const int dim = 2 * n_max + 40;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXcd ad = a.adjoint();
    const cplx xi = std::polar(opt.r, opt.theta);
    const Eigen::MatrixXcd disp = (opt.beta * ad - std::conj(opt.beta) * a).exp();
    const Eigen::MatrixXcd sq = (0.5 * (std::conj(xi) * a * a - xi * ad * ad)).exp();
    const Eigen::VectorXcd v = disp * sq.col(0);
    return std::vector<cplx>(v.data(), v.data() + n_max);
}

std::vector<cplx> sheared_gaussian_amplitudes(const ShearedParams& params, int n_max, bool renormalize) {
    if (!(params.W > 0.0)) throw std::invalid_argument("sheared Gaussian: W must be positive");
    if (n_max < 1) throw std::invalid_argument("sheared Gaussian: n_max must be positive");
    std::vector<cplx> c(n_max, 0.0);
    const double m = std::norm(params.beta);
    if (m == 0.0) {
        c[0] = 1.0;
        return c;
    }
    const double prefactor = std::pow(2.0 * kPi * params.W * m, -0.25);
    const double arg_beta = std::arg(params.beta);
    for (int n = 0; n < n_max; ++n) {
        const double d = n - m;
        const double mag = prefactor * std::exp(-d * d / (4.0 * params.W * m));
        c[n] = std::polar(mag, n * arg_beta - params.K * d * d / m);
    }
    if (renormalize) normalize(c);
    return c;
}

std::vector<cplx> make_dressed_coherent(const DressedBasis& basis, cplx alpha, int k) {
    if (std::norm(alpha) >= 0.5 * basis.n_res()) {
        throw std::invalid_argument("make_dressed_coherent: |alpha|^2 must stay below n_res/2");
    }
    auto c = coherent_amplitudes(alpha, basis.n_res());
    normalize(c);
    return basis.embed_ladder(c, k);
}

std::vector<cplx> make_sheared_gaussian(const DressedBasis& basis, const ShearedParams& params) {
    const double m = std::norm(params.beta);
    const bool guaranteed = m > std::max(20.0 * params.W, 1.0 / params.W);
    auto c = sheared_gaussian_amplitudes(params, basis.n_res(), !guaranteed);
    check_headroom(c, "make_sheared_gaussian");
    return basis.embed_ladder(c, params.k);
}

std::vector<cplx> make_dressed_squeezed(const DressedBasis& basis, const SqueezeOptical& opt, int k) {
    auto c = squeezed_amplitudes(opt, basis.n_res());
    check_headroom(c, "make_dressed_squeezed");
    return basis.embed_ladder(c, k);
}

double shear_s_parameter(double K, double W) {
    if (!(W > 0.0)) throw std::invalid_argument("shear_s_parameter: W must be positive");
    return 8.0 * K * K * W + 0.5 * (W + 1.0 / W - 2.0);
}

SqueezeOptical shear_to_squeeze(const ShearedParams& params) {
    const double K = params.K;
    const double W = params.W;
    const double S = shear_s_parameter(K, W);
    const double den = 16.0 * K * K * W - W + 1.0 / W;
    double angle;
    if (den == 0.0) {
        angle = std::copysign(0.5 * kPi, K * W);
    } else {
        angle = std::atan(8.0 * K * W / den) + (den < 0.0 ? kPi : 0.0);
    }
    SqueezeOptical out;
    out.beta = params.beta;
    out.r = 0.5 * std::acosh(S + 1.0);
    out.theta = 2.0 * std::arg(params.beta) + angle;
    return out;
}

cplx sheared_mean_a(const ShearedParams& p) {
    const cplx bc = std::conj(p.beta);
    return p.beta + (2.0 - p.W - 1.0 / p.W) / (8.0 * bc) - cplx(0.0, 1.0) * p.K * p.W / bc -
           2.0 * p.K * p.K * p.W / bc;
}

cplx sheared_mean_a2(const ShearedParams& p) {
    const cplx b2 = p.beta * p.beta;
    const cplx bracket = cplx(0.5 - 0.5 / p.W - 8.0 * p.K * p.K * p.W, -4.0 * p.K * p.W);
    return b2 + b2 / std::norm(p.beta) * bracket;
}

double sheared_quadrature_variance(const ShearedParams& p, double phi) {
    const double x = 2.0 * std::arg(p.beta) - 2.0 * phi;
    return (p.W + 1.0 / p.W) / 8.0 + 2.0 * p.K * p.K * p.W + p.K * p.W * std::sin(x) +
           ((p.W - 1.0 / p.W) / 8.0 - 2.0 * p.K * p.K * p.W) * std::cos(x);
}

std::array<double, 2> sheared_variance_extrema(const ShearedParams& p) {
    const double s1 = 1.0 + shear_s_parameter(p.K, p.W);
    const double root = std::sqrt(s1 * s1 - 1.0);
    return {(s1 - root) / 4.0, (s1 + root) / 4.0};
}

LadderMoments ladder_moments(std::span<const cplx> c) {
    LadderMoments m;
    for (const cplx& x : c) m.norm += std::norm(x);
    if (m.norm <= 0.0) throw std::invalid_argument("ladder_moments: zero state");
    const size_t len = c.size();
    for (size_t n = 0; n < len; ++n) {
        m.n += n * std::norm(c[n]);
        if (n + 1 < len) m.a += std::sqrt(n + 1.0) * std::conj(c[n]) * c[n + 1];
        if (n + 2 < len) m.a2 += std::sqrt((n + 1.0) * (n + 2.0)) * std::conj(c[n]) * c[n + 2];
    }
    m.n /= m.norm;
    m.a /= m.norm;
    m.a2 /= m.norm;
    return m;
}

double QuadratureStats::fitted_r() const { return 0.25 * std::log(var_max / var_min); }

QuadratureStats quadrature_stats(std::span<const cplx> c) {
    const auto m = ladder_moments(c);
    // σ²(φ) = A + Re(B e^{-2iφ}).
    const double A = (2.0 * m.n + 1.0) / 4.0 - 0.5 * std::norm(m.a);
    const cplx B = 0.5 * (m.a2 - m.a * m.a);
    QuadratureStats q;
    q.var_min = A - std::abs(B);
    q.var_max = A + std::abs(B);
    double phi = 0.5 * (std::arg(B) - kPi);
    if (phi <= -0.5 * kPi) phi += kPi;
    q.phi_min = phi;
    return q;
}

double quadrature_variance(std::span<const cplx> c, double phi) {
    const auto m = ladder_moments(c);
    const double A = (2.0 * m.n + 1.0) / 4.0 - 0.5 * std::norm(m.a);
    const cplx B = 0.5 * (m.a2 - m.a * m.a);
    return A + (B * std::polar(1.0, -2.0 * phi)).real();
}

SplitState split_state(std::span<const cplx> psi, int k, const DressedBasis& basis) {
    auto d = basis.to_dressed(psi);
    SplitState out;
    out.psi_k = basis.ladder(d, k);
    double total = 0.0;
    for (const cplx& x : d) total += std::norm(x);
    double in_ladder = 0.0;
    for (const cplx& x : out.psi_k) in_ladder += std::norm(x);
    out.p_stray = std::max(0.0, 1.0 - in_ladder / total);
    if (in_ladder > 0.0) normalize(out.psi_k);
    for (int n = 0; n < basis.n_res(); ++n) d[flat_index(n, k)] = 0.0;
    if (out.p_stray > 0.0) {
        normalize(d);
    }
    out.psi_perp = std::move(d);
    return out;
}

CoherentFit fit_coherent(std::span<const cplx> c) { return fit_coherent_from(c, ladder_moments(c).a); }

CoherentFit fidelity_dressed_coherent(std::span<const cplx> psi, int k, const DressedBasis& basis) {
    const auto d = basis.to_dressed(psi);
    const auto c = basis.ladder(d, k);
    return fit_coherent_from(c, ladder_moments(c).a);
}

CoherentFit fidelity_bare_coherent(std::span<const cplx> psi, int k, int n_res) {
    if (static_cast<int>(psi.size()) != n_res * kTransmonLevels) {
        throw std::invalid_argument("fidelity_bare_coherent: dimension mismatch");
    }
    std::vector<cplx> b(n_res);
    for (int n = 0; n < n_res; ++n) b[n] = psi[flat_index(n, k)];
    cplx seed = 0.0;
    for (int n = 0; n + 1 < n_res; ++n) {
        for (int kk = 0; kk < kTransmonLevels; ++kk) {
            seed += std::sqrt(n + 1.0) * std::conj(psi[flat_index(n, kk)]) * psi[flat_index(n + 1, kk)];
        }
    }
    return fit_coherent_from(b, seed);
}

double fidelity_dressed_squeezed(std::span<const cplx> c, const SqueezeOptical& opt) {
    const auto s = squeezed_amplitudes(opt, static_cast<int>(c.size()));
    cplx acc = 0.0;
    for (size_t n = 0; n < c.size(); ++n) acc += std::conj(s[n]) * c[n];
    return std::norm(acc);
}

cplx QGrid::at(int i_re, int i_im) const {
    const double step = points > 1 ? 2.0 * half_width / (points - 1) : 0.0;
    return center + cplx(-half_width + i_re * step, -half_width + i_im * step);
}

QGrid default_q_grid(std::span<const cplx> c, double r) {
    QGrid g;
    g.center = ladder_moments(c).a;
    g.half_width = 4.0 + 2.0 * std::max(1.0, std::exp(r));
    g.points = 201;
    return g;
}

std::vector<double> husimi_q(std::span<const cplx> c, const QGrid& grid) {
    if (grid.points < 1) throw std::invalid_argument("husimi_q: grid needs at least one point");
    std::vector<double> q(static_cast<size_t>(grid.points) * grid.points);
    for (int j = 0; j < grid.points; ++j) {
        for (int i = 0; i < grid.points; ++i) {
            q[static_cast<size_t>(j) * grid.points + i] = std::norm(overlap_coherent(c, grid.at(i, j))) / kPi;
        }
    }
    return q;
}

std::array<double, 8> husimi_contour_levels() {
    std::array<double, 8> levels{};
    for (int i = 0; i < 8; ++i) levels[i] = 0.1 * (i + 1) / kPi;
    return levels;
}

}  // namespace dressq
