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

#include "dressq/propagate.h"

#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace dressq {
namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<cplx>;

struct Schrodinger {
    const RotatingHamiltonian& h0;
    const DriveOperator& drive;
    const DriveEnvelope& envelope;

    void operator()(const State& psi, State& dpsi, double t) const {
        apply_hamiltonian(h0, drive, envelope.angular_at(t), psi, dpsi);
        for (cplx& x : dpsi) x = cplx(x.imag(), -x.real());  // multiply by -i
    }
};

std::vector<double> snapshot_times(double t_end, double dt_out) {
    if (!(dt_out > 0.0)) throw std::invalid_argument("evolve: dt_out must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("evolve: t_end must be nonnegative");
    std::vector<double> times;
    const auto steps = static_cast<long>(std::floor(t_end / dt_out + 1e-9));
    for (long i = 0; i <= steps; ++i) times.push_back(static_cast<double>(i) * dt_out);
    if (t_end - times.back() > 1e-9 * std::max(1.0, t_end)) times.push_back(t_end);
    return times;
}

}  // namespace

TruncationBreach::TruncationBreach(double t, double population)
    : std::runtime_error("truncation breach at t = " + std::to_string(t) + " ns: top-level population " +
                         std::to_string(population) + "; increase n_res"),
      t_(t),
      population_(population) {}

double top_level_population(std::span<const cplx> psi, int n_res, int levels) {
    double p = 0.0;
    for (int n = std::max(0, n_res - levels); n < n_res; ++n) {
        for (int k = 0; k < kTransmonLevels; ++k) p += std::norm(psi[flat_index(n, k)]);
    }
    return p;
}

double norm_squared(std::span<const cplx> psi) {
    double s = 0.0;
    for (const cplx& x : psi) s += std::norm(x);
    return s;
}

Propagator::Propagator(const RotatingHamiltonian& h0, const DriveOperator& drive, DriveEnvelope envelope,
                       PropagateOptions options)
    : h0_(h0), drive_(drive), envelope_(std::move(envelope)), options_(options) {
    if (h0.n_res() != drive.n_res()) throw std::invalid_argument("Propagator: h0 and drive truncations differ");
    if (!(options_.tol >= 1e-12 && options_.tol <= 1e-6)) {
        throw std::invalid_argument("Propagator: tol must lie in [1e-12, 1e-6]");
    }
    if (options_.integrator == Integrator::kFixedRk4 && !(options_.fixed_dt > 0.0)) {
        throw std::invalid_argument("Propagator: fixed_dt must be positive");
    }
}

void Propagator::advance(std::vector<cplx>& psi, double t0, double t1) const {
    if (static_cast<int>(psi.size()) != h0_.dim()) throw std::invalid_argument("advance: state dimension mismatch");
    if (t0 == t1) return;
    Schrodinger rhs{h0_, drive_, envelope_};
    const double span = t1 - t0;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    if (options_.integrator == Integrator::kFixedRk4) {
        const auto steps = static_cast<long>(std::ceil(std::abs(span) / options_.fixed_dt - 1e-9));
        const double dt = span / static_cast<double>(steps);
        odeint::runge_kutta4<State> stepper;
        for (long i = 0; i < steps; ++i) stepper.do_step(rhs, psi, t0 + static_cast<double>(i) * dt, dt);
        return;
    }
    auto stepper = odeint::make_controlled(options_.tol, 0.0, odeint::runge_kutta_fehlberg78<State>());
    const double dt0 = dir * std::min(std::abs(span), 0.01);
    odeint::integrate_adaptive(stepper, rhs, psi, t0, t1, dt0);
}

void evolve_observed(const RotatingHamiltonian& h0, const DriveOperator& drive, const DriveEnvelope& envelope,
                     std::span<const cplx> psi0, double t_end, const PropagateOptions& options,
                     const SnapshotObserver& observer) {
    if (static_cast<int>(psi0.size()) != h0.dim()) throw std::invalid_argument("evolve: psi0 dimension mismatch");
    const double n0 = norm_squared(psi0);
    if (std::abs(n0 - 1.0) > 1e-8) throw std::invalid_argument("evolve: psi0 is not normalized");
    const Propagator prop(h0, drive, envelope, options);
    StateVector snap{State(psi0.begin(), psi0.end()), 0.0};
    const auto times = snapshot_times(t_end, options.dt_out);
    for (size_t i = 0; i < times.size(); ++i) {
        if (i > 0) prop.advance(snap.amps, times[i - 1], times[i]);
        snap.t = times[i];
        SnapshotDiagnostics diag{norm_squared(snap.amps),
                                 top_level_population(snap.amps, h0.n_res(), options.breach_levels)};
        if (diag.top_population > options.breach_threshold) throw TruncationBreach(snap.t, diag.top_population);
        observer(snap, diag);
    }
}

Trajectory evolve(const RotatingHamiltonian& h0, const DriveOperator& drive, const DriveEnvelope& envelope,
                  std::span<const cplx> psi0, double t_end, double dt_out, double tol) {
    PropagateOptions options;
    options.dt_out = dt_out;
    options.tol = tol;
    Trajectory traj;
    evolve_observed(h0, drive, envelope, psi0, t_end, options,
                    [&](const StateVector& s, const SnapshotDiagnostics& d) {
                        traj.times.push_back(s.t);
                        traj.states.push_back(s);
                        traj.aux.push_back(d);
                    });
    return traj;
}

cplx expectation(const Eigen::SparseMatrix<double>& op, std::span<const cplx> psi) {
    if (op.rows() != static_cast<Eigen::Index>(psi.size()) || op.cols() != op.rows()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    const Eigen::Map<const Eigen::VectorXcd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
    const Eigen::VectorXcd w = op.cast<cplx>() * v;
    return v.dot(w);
}

cplx expectation(const Eigen::MatrixXcd& op, std::span<const cplx> psi) {
    if (op.rows() != static_cast<Eigen::Index>(psi.size()) || op.cols() != op.rows()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    const Eigen::Map<const Eigen::VectorXcd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
    return v.dot(op * v);
}

double photon_number(std::span<const cplx> psi, const DressedBasis& basis) {
    const auto c = basis.to_dressed(psi);
    double nbar = 0.0;
    for (int n = 1; n < basis.n_res(); ++n) {
        for (int k = 0; k < kTransmonLevels; ++k) nbar += n * std::norm(c[flat_index(n, k)]);
    }
    return nbar;
}

cplx dressed_lowering_mean(std::span<const cplx> psi, const DressedBasis& basis) {
    const auto c = basis.to_dressed(psi);
    cplx acc = 0.0;
    for (int n = 0; n + 1 < basis.n_res(); ++n) {
        const double amp = std::sqrt(static_cast<double>(n + 1));
        for (int k = 0; k < kTransmonLevels; ++k) {
            acc += std::conj(c[flat_index(n, k)]) * amp * c[flat_index(n + 1, k)];
        }
    }
    return acc;
}

}  // namespace dressq
