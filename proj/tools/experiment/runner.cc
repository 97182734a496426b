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

#include "experiment/runner.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "dressq/basis_cache.h"
#include "dressq/dressed.h"
#include "dressq/entangle.h"
#include "dressq/leakage.h"
#include "dressq/propagate.h"
#include "dressq/reduced.h"
#include "dressq/shearfit.h"
#include "dressq/spectrum.h"

#ifndef DRESSQ_VERSION
#define DRESSQ_VERSION "unknown"
#endif

namespace dressq::experiment {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* mode_name(DriveMode m) {
    switch (m) {
        case DriveMode::kBare:
            return "bare";
        case DriveMode::kAnalytic:
            return "analytic";
        case DriveMode::kMatrixElement:
            return "matrix_element";
    }
    return "?";
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

// Piecewise-linear interpolation on sorted abscissae, clamped at both ends.
double interp(const std::vector<double>& x, const std::vector<double>& y, double at) {
    if (x.empty()) return kNaN;
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

bool leakage_pair_supported(int source, int target) {
    return (source == 0 && target == 1) || (source == 1 && (target == 0 || target == 2));
}

LeakagePrediction predict(const SystemParams& params, const DressedBasis& basis, cplx eps, double nbar, int source,
                          int target) {
    if (source == 0) return predict_ground(params, basis, eps, nbar);
    const auto [down, up] = predict_excited(params, basis, eps, nbar);
    return target == 0 ? down : up;
}

// Per-snapshot quantities from the full simulation.
struct Series {
    std::vector<double> t, norm, nbar, p_stray, p_target, top_pop;
    std::vector<double> infid_bare, infid_dressed, infid_correct;
    std::vector<double> var_min, var_max, phi_min, r_fit;
    std::vector<cplx> mean_a;
    std::vector<std::vector<double>> dss;  // one row per snapshot, columns as dss_header
    std::vector<std::pair<double, std::vector<cplx>>> husimi_states;  // (t, normalized ladder amplitudes)
    std::vector<double> husimi_r;
};

class Pipeline {
   public:
    Pipeline(ExperimentConfig config, const RunOptions& options) : c_(std::move(config)), opt_(options) {}

    RunResult execute();

   private:
    void log(const std::string& msg) const {
        if (opt_.log) opt_.log(c_.name + ": " + msg);
    }
    void metric(const std::string& name, double v) { result_.metrics.emplace_back(name, v); }

    void run_reduced();
    void simulate();
    void analyze_trajectory();
    void analyze_leakage();
    void write_leakage_table(const LeakagePrediction& pred0, const std::function<double(double)>& nbar_of_t,
                             int lower);
    void analyze_shear();
    void analyze_squeeze();
    void analyze_husimi();
    void analyze_entangle();
    void analyze_spectrum();
    const ReducedState* reduced_at(std::size_t mode, double t) const;
    bool husimi_due(double t) const {
        const double k = std::round(t / c_.husimi_interval);
        return std::abs(t - k * c_.husimi_interval) < 1e-9;
    }

    ExperimentConfig c_;
    RunOptions opt_;
    RunResult result_;
    std::optional<DressedBasis> basis_;
    std::optional<LadderProfile> profile_;
    std::vector<ReducedTrajectory> reduced_;
    Series s_;
    std::vector<std::string> dss_header_;
};

const ReducedState* Pipeline::reduced_at(std::size_t mode, double t) const {
    const auto& states = reduced_[mode].states;
    const auto it = std::lower_bound(states.begin(), states.end(), t - 1e-9,
                                     [](const ReducedState& s, double v) { return s.t < v; });
    if (it == states.end() || std::abs(it->t - t) > 1e-9) return nullptr;
    return &*it;
}

void Pipeline::run_reduced() {
    const DriveEnvelope env = c_.envelope();
    const int k = c_.start_ladder();
    ReducedOptions ro;
    ro.check_halving = true;
    ReducedState s0;
    s0.k = k;
    for (DriveMode mode : c_.drive_modes) {
        const auto drive = EffectiveDrive::from_mode(mode, c_.params, &*basis_, k);
        reduced_.push_back(evolve_reduced(*profile_, env, drive, s0, c_.t_end, c_.dt_out, ro));
        metric(std::string("reduced_halving_error_") + mode_name(mode), reduced_.back().halving_error);
    }
    if (c_.wants(Output::kReduced)) {
        for (std::size_t m = 0; m < reduced_.size(); ++m) {
            Table t({"t_ns", "re_beta", "im_beta", "K", "W", "r", "theta", "nbar"});
            for (const auto& st : reduced_[m].states) {
                const SqueezeOptical sq = to_squeezed(st);
                t.add_row({st.t, st.beta.real(), st.beta.imag(), st.K, st.W, sq.r, sq.theta, std::norm(st.beta)});
            }
            result_.tables[std::string("reduced_") + mode_name(c_.drive_modes[m])] = std::move(t);
        }
    }
}

void Pipeline::simulate() {
    const SystemParams& p = c_.params;
    const RotatingHamiltonian h0 = build_h0(p);
    const DriveOperator drive = build_drive_op(p);
    const int k0 = c_.start_ladder();
    const int target = c_.target_ladder();

    std::vector<cplx> psi0(p.dim(), 0.0);
    if (c_.initial == InitialKind::kBareGround) {
        psi0[0] = 1.0;
    } else {
        std::vector<cplx> ladder(p.n_res, 0.0);
        ladder[0] = 1.0;
        psi0 = basis_->embed_ladder(ladder, k0);
    }

    const bool fits = c_.wants(Output::kTrajectory) || c_.wants(Output::kShear);
    const bool quad = c_.wants(Output::kSqueeze) || c_.wants(Output::kHusimi);
    const bool dss = c_.wants(Output::kDss) && !reduced_.empty();
    if (dss) {
        dss_header_ = {"t_ns", "coherent_measured"};
        for (DriveMode m : c_.drive_modes) {
            for (const char* fam : {"coherent_integrated_", "squeezed_measured_", "squeezed_integrated_"}) {
                dss_header_.push_back(fam + std::string(mode_name(m)));
            }
        }
    }

    PropagateOptions po;
    po.tol = c_.tol;
    po.dt_out = c_.dt_out;
    const double log_every = std::max(c_.t_end / 10.0, c_.dt_out);
    double next_log = log_every;

    evolve_observed(h0, drive, c_.envelope(), psi0, c_.t_end, po,
                    [&](const StateVector& sv, const SnapshotDiagnostics& diag) {
                        const std::vector<cplx> dressed = basis_->to_dressed(sv.amps);
                        double pk = 0.0, pt = 0.0, n = 0.0;
                        std::vector<cplx> c = basis_->ladder(dressed, k0);
                        for (int i = 0; i < p.n_res; ++i) {
                            const double w = std::norm(c[i]);
                            pk += w;
                            n += i * w;
                            if (target >= 0 && target < kTransmonLevels) pt += std::norm(dressed[flat_index(i, target)]);
                        }
                        const double ladder_norm = std::sqrt(pk);
                        for (auto& x : c) x /= ladder_norm;

                        s_.t.push_back(sv.t);
                        s_.norm.push_back(diag.norm);
                        s_.nbar.push_back(n / pk);
                        s_.p_stray.push_back(1.0 - pk / diag.norm);
                        s_.p_target.push_back(pt);
                        s_.top_pop.push_back(diag.top_population);

                        const LadderMoments mom = ladder_moments(c);
                        s_.mean_a.push_back(mom.a);
                        if (fits) {
                            s_.infid_bare.push_back(1.0 - fidelity_bare_coherent(sv.amps, k0, p.n_res).fidelity);
                            s_.infid_dressed.push_back(1.0 - fidelity_dressed_coherent(sv.amps, k0, *basis_).fidelity);
                            s_.infid_correct.push_back(1.0 - fit_coherent(c).fidelity);
                        }
                        if (quad) {
                            const QuadratureStats q = quadrature_stats(c);
                            s_.var_min.push_back(q.var_min);
                            s_.var_max.push_back(q.var_max);
                            s_.phi_min.push_back(q.phi_min);
                            s_.r_fit.push_back(q.fitted_r());
                        }
                        if (dss) {
                            std::vector<double> row{sv.t, 1.0 - fidelity_dressed_squeezed(c, SqueezeOptical{mom.a, 0.0, 0.0})};
                            for (std::size_t m = 0; m < reduced_.size(); ++m) {
                                const ReducedState* st = reduced_at(m, sv.t);
                                if (!st) {
                                    row.insert(row.end(), {kNaN, kNaN, kNaN});
                                    continue;
                                }
                                SqueezeOptical sq = to_squeezed(*st);
                                row.push_back(1.0 - fidelity_dressed_squeezed(c, SqueezeOptical{st->beta, 0.0, 0.0}));
                                const double integrated = 1.0 - fidelity_dressed_squeezed(c, sq);
                                sq.beta = mom.a;
                                row.push_back(1.0 - fidelity_dressed_squeezed(c, sq));
                                row.push_back(integrated);
                            }
                            s_.dss.push_back(std::move(row));
                        }
                        if (c_.wants(Output::kHusimi) && (husimi_due(sv.t) || sv.t >= c_.t_end)) {
                            s_.husimi_states.emplace_back(sv.t, c);
                            s_.husimi_r.push_back(s_.r_fit.back());
                        }
                        if (sv.t >= next_log) {
                            log(fmt("t=%.1f ns  nbar=%.2f  P_stray=%.3g", sv.t, s_.nbar.back(), s_.p_stray.back()));
                            next_log += log_every;
                        }
                    });

    double drift = 0.0;
    for (double x : s_.norm) drift = std::max(drift, std::abs(x - 1.0));
    metric("norm_drift", drift);
    metric("nbar_end", s_.nbar.back());
    metric("p_stray_end", s_.p_stray.back());
    double top = 0.0;
    for (double x : s_.top_pop) top = std::max(top, x);
    metric("top_population_max", top);
}

void Pipeline::analyze_trajectory() {
    if (!c_.wants(Output::kTrajectory)) return;
    Table t({"t_ns", "norm", "nbar", "P_stray", "infid_bare", "infid_dressed", "infid_correct", "top_pop"});
    for (std::size_t i = 0; i < s_.t.size(); ++i) {
        t.add_row({s_.t[i], s_.norm[i], s_.nbar[i], s_.p_stray[i], s_.infid_bare[i], s_.infid_dressed[i],
                   s_.infid_correct[i], s_.top_pop[i]});
    }
    metric("infid_bare_end", s_.infid_bare.back());
    metric("infid_dressed_end", s_.infid_dressed.back());
    metric("infid_correct_end", s_.infid_correct.back());
    result_.tables["trajectory"] = std::move(t);
}

// Leakage summary: always computed when the pair has a model, since sweeps
// report it regardless of the requested outputs.
void Pipeline::analyze_leakage() {
    const int source = c_.start_ladder();
    const int target = c_.target_ladder();
    if (!leakage_pair_supported(source, target)) {
        for (const char* m : {"p_max_model", "p_max_sim", "omega0_model", "t_decay_model", "t_decay_sim",
                              "decay_prefactor", "freq_max_rel_err"}) {
            metric(m, kNaN);
        }
        return;
    }
    const SystemParams& p = c_.params;
    const DriveEnvelope env = c_.envelope();
    const cplx eps = std::polar(env.peak(), c_.phase);
    const auto nbar_of_t = [&](double t) { return interp(s_.t, s_.nbar, t); };
    const LeakagePrediction pred0 = predict(p, *basis_, eps, 0.0, source, target);
    const int lower = std::min(source, target);
    const double omega0 = std::abs(oscillation_frequency(*basis_, 0.0, lower));

    metric("p_max_model", pred0.p_max);
    metric("omega0_model", omega0);
    metric("t_decay_model", pred0.t_decay);

    // The simulated observables need the stray oscillation resolved in time.
    const double period = kTwoPi / omega0;
    if (c_.dt_out > period / 8.0) {
        log(fmt("dt_out=%.3g ns does not resolve the %.3g ns stray oscillation; skipping fits", c_.dt_out, period));
        for (const char* m : {"p_max_sim", "t_decay_sim", "decay_prefactor", "freq_max_rel_err"}) metric(m, kNaN);
        if (c_.wants(Output::kLeakage)) write_leakage_table(pred0, nbar_of_t, lower);
        return;
    }
    double p_max_sim = 0.0;
    for (std::size_t i = 0; i < s_.t.size() && s_.t[i] <= 1.5 * period; ++i) {
        p_max_sim = std::max(p_max_sim, s_.p_target[i]);
    }
    metric("p_max_sim", p_max_sim);

    double t_decay_sim = kNaN;
    std::optional<DecayFit> fit;
    try {
        fit = fit_decay_time(s_.t, s_.p_target);
        t_decay_sim = fit->t_decay;
    } catch (const std::exception& e) {
        log(std::string("decay fit skipped: ") + e.what());
    }
    metric("t_decay_sim", t_decay_sim);
    metric("decay_prefactor", kDecayPrefactor * t_decay_sim / pred0.t_decay);

    std::vector<FrequencySample> freq;
    try {
        freq = extract_oscillation_frequency(s_.t, s_.p_target);
    } catch (const std::exception& e) {
        log(std::string("frequency extraction skipped: ") + e.what());
    }
    double worst = freq.empty() ? kNaN : 0.0;
    Table ft({"t_ns", "nbar", "omega_sim", "delta_model", "omega_model", "rel_err"});
    for (const auto& f : freq) {
        const double nb = nbar_of_t(f.t);
        const double delta = std::abs(ladder_detuning_interp(*basis_, nb, lower));
        const double om = std::abs(oscillation_frequency(*basis_, nb, lower));
        const double rel = f.omega / delta - 1.0;
        worst = std::max(worst, std::abs(rel));
        ft.add_row({f.t, nb, f.omega, delta, om, rel});
    }
    metric("freq_max_rel_err", worst);
    if (c_.wants(Output::kFrequency)) result_.tables["frequency"] = std::move(ft);

    if (c_.wants(Output::kDecay) && fit) {
        Table dt({"t_ns", "amplitude", "threshold"});
        for (std::size_t i = 0; i < fit->window_times.size(); ++i) {
            dt.add_row({fit->window_times[i], fit->amplitudes[i], fit->initial_amplitude / 3.0});
        }
        result_.tables["decay"] = std::move(dt);
    }

    if (c_.wants(Output::kLeakage)) write_leakage_table(pred0, nbar_of_t, lower);
}

void Pipeline::write_leakage_table(const LeakagePrediction& pred0, const std::function<double(double)>& nbar_of_t,
                                   int lower) {
    const DriveEnvelope env = c_.envelope();
    const std::vector<cplx> cint = integrate_c(*basis_, env, nbar_of_t, s_.t, lower);
    Table lt({"t_ns", "nbar", "P_stray", "P_target", "P_ss", "P_ss0_plus_ss", "P_integrated"});
    for (std::size_t i = 0; i < s_.t.size(); ++i) {
        const cplx eps_t = std::polar(std::abs(env.at(s_.t[i])), c_.phase);
        const double pss = predict(c_.params, *basis_, eps_t, s_.nbar[i], pred0.source, pred0.target).p_ss;
        lt.add_row({s_.t[i], s_.nbar[i], s_.p_stray[i], s_.p_target[i], pss, pred0.p_ss0 + pss, std::norm(cint[i])});
    }
    result_.tables["leakage"] = std::move(lt);
}

void Pipeline::analyze_shear() {
    if (!c_.wants(Output::kShear)) return;
    const auto nbar_of_t = [&](double t) { return interp(s_.t, s_.nbar, t); };
    const QBetaTrace q = integrate_qbeta2(*profile_, nbar_of_t, s_.t);
    const double eps = c_.envelope().peak();
    const double domega0 = profile_->domega_at(0.0);
    Table t({"t_ns", "qbeta2", "infid_est_integrated", "infid_est_closed", "infid_sim"});
    for (std::size_t i = 0; i < s_.t.size(); ++i) {
        t.add_row({s_.t[i], q.estimates[i].q_beta2, q.estimates[i].infidelity,
                   infidelity_closed_form(eps, s_.t[i], domega0), s_.infid_correct[i]});
    }
    metric("qbeta2_refinement_error", q.refinement_error);
    result_.tables["shear"] = std::move(t);
}

void Pipeline::analyze_squeeze() {
    if (!c_.wants(Output::kSqueeze)) return;
    Table t({"t_ns", "var_min", "var_max", "ratio_min", "ratio_max", "phi_min", "r_fit"});
    for (std::size_t i = 0; i < s_.t.size(); ++i) {
        t.add_row({s_.t[i], s_.var_min[i], s_.var_max[i], s_.var_min[i] / 0.25, s_.var_max[i] / 0.25, s_.phi_min[i],
                   s_.r_fit[i]});
    }
    metric("var_ratio_min_end", s_.var_min.back() / 0.25);
    metric("var_ratio_max_end", s_.var_max.back() / 0.25);
    metric("r_fit_end", s_.r_fit.back());
    result_.tables["squeeze"] = std::move(t);
}

void Pipeline::analyze_husimi() {
    if (!c_.wants(Output::kHusimi)) return;
    Table t({"t_ns", "re_alpha", "im_alpha", "q_sim", "q_model"});
    for (std::size_t h = 0; h < s_.husimi_states.size(); ++h) {
        const auto& [time, c] = s_.husimi_states[h];
        // Skip the t_end snapshot when it already landed on the interval grid.
        if (h > 0 && std::abs(time - s_.husimi_states[h - 1].first) < 1e-9) continue;
        const QGrid grid = default_q_grid(c, s_.husimi_r[h]);
        const std::vector<double> q_sim = husimi_q(c, grid);
        std::vector<double> q_model;
        if (!reduced_.empty()) {
            if (const ReducedState* st = reduced_at(0, time)) {
                q_model = husimi_q(squeezed_amplitudes(to_squeezed(*st), c_.params.n_res), grid);
            }
        }
        for (int im = 0; im < grid.points; ++im) {
            for (int re = 0; re < grid.points; ++re) {
                const std::size_t idx = static_cast<std::size_t>(im) * grid.points + re;
                const cplx a = grid.at(re, im);
                t.add_row({time, a.real(), a.imag(), q_sim[idx], q_model.empty() ? kNaN : q_model[idx]});
            }
        }
    }
    result_.tables["husimi"] = std::move(t);
    Table levels({"level"});
    for (double l : husimi_contour_levels()) levels.add_row({l});
    result_.tables["husimi_levels"] = std::move(levels);
}

void Pipeline::analyze_spectrum() {
    if (!c_.wants(Output::kSpectrum)) return;
    const LadderProfile p0 = ladder_profile(*basis_, 0);
    const LadderProfile p1 = ladder_profile(*basis_, 1);
    const double omega_r = c_.params.omega_r();
    const double omega_d = c_.params.omega_d();
    Table t({"n", "domega_r_0", "domega_r_1", "domega_d"});
    for (int n = 0; n <= std::min(p0.max_n(), p1.max_n()); ++n) {
        // Rotating-frame ladder frequency plus ω_d gives the lab-frame effective frequency.
        t.add_row({static_cast<double>(n), (p0.omega_at(n) + omega_d - omega_r) / kTwoPi,
                   (p1.omega_at(n) + omega_d - omega_r) / kTwoPi, (omega_d - omega_r) / kTwoPi});
    }
    result_.tables["spectrum"] = std::move(t);
}

void Pipeline::analyze_entangle() {
    if (!c_.wants(Output::kEntangle)) return;
    const int k = c_.start_ladder();
    const int n_res = c_.params.n_res;
    const double nc = critical_photon_number(c_.params);
    metric("n_crit", nc);
    Table t({"n", "n_over_nc", "fock_product_infidelity", "fock_best_product_infidelity", "fock_e_f",
             "coherent_product_infidelity", "coherent_best_product_infidelity", "coherent_e_f"});
    for (int n = c_.entangle.n_min; n <= c_.entangle.n_max; n += c_.entangle.step) {
        std::vector<cplx> fock(n_res, 0.0);
        fock[n] = 1.0;
        const std::vector<cplx> coh = coherent_amplitudes(std::sqrt(static_cast<double>(n)), n_res);
        std::vector<double> row{static_cast<double>(n), n / nc};
        for (const std::vector<cplx>* c : std::array<const std::vector<cplx>*, 2>{&fock, &coh}) {
            const std::vector<cplx> psi = basis_->embed_ladder(*c, k);
            row.push_back(product_approx(*basis_, *c, k).infidelity);
            row.push_back(best_product_infidelity(psi, n_res));
            row.push_back(entanglement_of_formation(psi, n_res));
        }
        t.add_row(row);
    }
    result_.tables["entangle"] = std::move(t);
}

RunResult Pipeline::execute() {
    const auto start = std::chrono::steady_clock::now();
    auto issues = validate(c_);
    const int source = c_.start_ladder();
    const int target = c_.target_ladder();
    if ((c_.wants(Output::kLeakage) || c_.wants(Output::kFrequency) || c_.wants(Output::kDecay)) &&
        !leakage_pair_supported(source, target)) {
        issues.push_back({"leakage_target", "leakage model covers ladder 0 -> 1 and 1 -> 0, 2 only"});
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    c_ = resolve(std::move(c_));
    result_.config = c_;

    log(fmt("N=%.0f  f_d=%.9f GHz", c_.params.n_res, c_.params.f_d));
    basis_ = cached_diagonalize(c_.params, c_.cache_dir);
    profile_ = ladder_profile(*basis_, source);

    if (c_.wants(Output::kReduced) || c_.wants(Output::kDss) || c_.wants(Output::kHusimi)) run_reduced();
    if (c_.needs_simulation()) {
        simulate();
        analyze_trajectory();
        analyze_leakage();
        analyze_shear();
        analyze_squeeze();
        analyze_husimi();
        if (c_.wants(Output::kDss) && !s_.dss.empty()) {
            Table t(dss_header_);
            std::vector<double> worst(dss_header_.size(), 0.0);
            for (const auto& row : s_.dss) {
                t.add_row(row);
                for (std::size_t i = 1; i < row.size(); ++i) worst[i] = std::max(worst[i], row[i]);
            }
            for (std::size_t i = 1; i < dss_header_.size(); ++i) metric(dss_header_[i] + "_max", worst[i]);
            for (std::size_t i = 1; i < dss_header_.size(); ++i) metric(dss_header_[i] + "_end", s_.dss.back()[i]);
            result_.tables["dss"] = std::move(t);
        }
    }
    analyze_entangle();
    analyze_spectrum();

    result_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (opt_.write_files) {
        std::filesystem::create_directories(c_.output_dir);
        for (const auto& [stem, table] : result_.tables) {
            const auto path = c_.output_dir / (stem + ".csv");
            table.write_csv(path);
            result_.files.push_back(path);
        }
        result_.files.push_back(write_manifest(result_));
    }
    return std::move(result_);
}

nlohmann::json params_json(const SystemParams& p) {
    return {{"f_r", p.f_r}, {"f_q", p.f_q}, {"eta", p.eta}, {"g", p.g},
            {"f_d", p.f_d}, {"e0", p.e0},   {"n_res", p.n_res}};
}

// JSON has no NaN; analyses that did not apply are written as null.
nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

double RunResult::metric(const std::string& name) const {
    for (const auto& [k, v] : metrics) {
        if (k == name) return v;
    }
    throw std::out_of_range("no metric '" + name + "'");
}

std::string params_hash_hex(const SystemParams& params) {
    SystemParams p = params;
    p.n_res = 0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(params_hash(p)));
    return buf;
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
    return Pipeline(config, options).execute();
}

std::filesystem::path write_manifest(const RunResult& result) {
    const ExperimentConfig& c = result.config;
    nlohmann::json j;
    j["name"] = c.name;
    j["version"] = DRESSQ_VERSION;
    j["schema"] = kCsvSchema;
    j["config"] = c.source.string();
    j["params"] = params_json(c.params);
    j["params_hash"] = params_hash_hex(c.params);
    j["envelope"] = {{"eps", c.eps}, {"phase", c.phase}, {"ramp_ns", c.ramp_ns}};
    j["t_end"] = c.t_end;
    j["dt_out"] = c.dt_out;
    j["tol"] = c.tol;
    nlohmann::json outputs = nlohmann::json::array();
    for (Output o : c.outputs) outputs.push_back(output_name(o));
    j["outputs"] = outputs;
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [k, v] : result.metrics) metrics[k] = number_or_null(v);
    j["metrics"] = metrics;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : result.files) files.push_back(f.filename().string());
    j["files"] = files;
    j["wall_seconds"] = result.wall_seconds;

    const auto path = c.output_dir / "manifest.json";
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return path;
}

SweepResult sweep(const ExperimentConfig& config, const std::string& axis, const std::vector<double>& values,
                  const SweepOptions& options) {
    {
        ExperimentConfig probe = config;
        if (!set_axis(probe, axis, 0.0)) {
            std::string known;
            for (const auto& a : axis_names()) known += (known.empty() ? "" : ", ") + a;
            throw ConfigError(std::vector<ConfigIssue>{{"--axis", "unknown axis '" + axis + "' (known: " + known + ")"}});
        }
    }
    if (values.empty()) throw ConfigError(std::vector<ConfigIssue>{{"--values", "empty value list"}});

    const auto start = std::chrono::steady_clock::now();
    std::vector<ExperimentConfig> points;
    std::vector<ConfigIssue> issues;
    for (double v : values) {
        ExperimentConfig pc = config;
        set_axis(pc, axis, v);
        for (auto& issue : validate(pc)) {
            issue.location = axis + "=" + fmt("%.6g", v) + " " + issue.location;
            issues.push_back(std::move(issue));
        }
        points.push_back(std::move(pc));
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));

    SweepResult out;
    out.axis = axis;
    out.points.resize(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                out.points[i] = run(points[i], RunOptions{false, options.log});
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int jobs = std::clamp(options.jobs, 1, static_cast<int>(points.size()));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    out.summary = Table("scan_param", {"value", "n_res", "f_d", "nbar_end", "p_max_model", "p_max_sim",
                         "omega0_model", "t_decay_model", "t_decay_sim", "decay_prefactor", "freq_max_rel_err"});
    for (std::size_t i = 0; i < points.size(); ++i) {
        const RunResult& r = out.points[i];
        const auto m = [&](const char* name) {
            for (const auto& [k, v] : r.metrics) {
                if (k == name) return v;
            }
            return kNaN;
        };
        out.summary.add_row(axis, {values[i], static_cast<double>(r.config.params.n_res), r.config.params.f_d,
                             m("nbar_end"), m("p_max_model"), m("p_max_sim"), m("omega0_model"), m("t_decay_model"),
                             m("t_decay_sim"), m("decay_prefactor"), m("freq_max_rel_err")});
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (options.write_files) {
        std::filesystem::create_directories(config.output_dir);
        const auto csv = config.output_dir / ("sweep_" + axis + ".csv");
        out.summary.write_csv(csv);
        out.files.push_back(csv);

        nlohmann::json j;
        j["name"] = config.name;
        j["version"] = DRESSQ_VERSION;
        j["schema"] = kCsvSchema;
        j["axis"] = axis;
        j["values"] = values;
        nlohmann::json hashes = nlohmann::json::array();
        for (const auto& r : out.points) hashes.push_back(params_hash_hex(r.config.params));
        j["params_hashes"] = hashes;
        j["files"] = {csv.filename().string()};
        j["wall_seconds"] = out.wall_seconds;
        const auto path = config.output_dir / ("sweep_" + axis + ".manifest.json");
        std::ofstream f(path);
        f << j.dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write " + path.string());
        out.files.push_back(path);
    }
    return out;
}

}  // namespace dressq::experiment
