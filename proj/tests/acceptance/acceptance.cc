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

// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dressq/dressed.h"
#include "dressq/entangle.h"
#include "dressq/leakage.h"
#include "dressq/propagate.h"
#include "dressq/spectrum.h"
#include "experiment/config.h"
#include "experiment/runner.h"

namespace {

using namespace dressq;
using namespace dressq::experiment;
namespace fs = std::filesystem;

struct Line {
    std::string id;
    bool pass = false;
    std::string detail;
};

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

class Suite {
   public:
    Suite(fs::path scenarios, fs::path work, std::set<std::string> only)
        : scenarios_(std::move(scenarios)), work_(std::move(work)), only_(std::move(only)) {}

    bool selected(const std::string& group) const { return only_.empty() || only_.count(group) > 0; }

    void report(const std::string& id, bool pass, const std::string& detail) {
        lines_.push_back({id, pass, detail});
        std::printf("%s %-3s %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
        std::fflush(stdout);
    }

    void error(const std::string& id, const std::exception& e) { report(id, false, std::string("error: ") + e.what()); }

    ExperimentConfig scenario(const std::string& name) const {
        ExperimentConfig c = load_config(scenarios_ / (name + ".yaml"));
        c.output_dir = work_ / "out" / name;
        c.cache_dir = work_ / "cache";
        return c;
    }

    RunResult run_scenario(const ExperimentConfig& c) const { return run(c, RunOptions{false, {}}); }

    const std::vector<Line>& lines() const { return lines_; }

   private:
    fs::path scenarios_;
    fs::path work_;
    std::set<std::string> only_;
    std::vector<Line> lines_;
};

double at_time(const Table& t, const std::string& column, double time) {
    const auto& ts = t.column("t_ns");
    const auto it = std::lower_bound(ts.begin(), ts.end(), time - 1e-9);
    if (it == ts.end()) throw std::out_of_range("no sample at t = " + std::to_string(time));
    return t.column(column)[it - ts.begin()];
}

double mean_between(const Table& t, const std::string& column, double t0, double t1) {
    const auto& ts = t.column("t_ns");
    double s = 0.0;
    int n = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] >= t0 && ts[i] < t1) {
            s += t.column(column)[i];
            ++n;
        }
    }
    return n ? s / n : std::nan("");
}

double amp_fidelity(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    double na = 0.0, nb = 0.0;
    for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        s += std::conj(a[i]) * b[i];
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
    }
    return std::norm(s) / (na * nb);
}

void critical_photon_number_check(Suite& s) {
    SystemParams p = default_params();
    const double nc = critical_photon_number(p);
    p.g = 0.1414;
    const double nc7 = critical_photon_number(p);
    s.report("1", std::abs(nc - 25.0) < 1e-9 && std::abs(nc7 - 12.5) <= 0.1,
             format("n_c = %.6f (g = 0.1 GHz), %.4f (g = 0.1414 GHz); want 25 and 12.5 +- 0.1", nc, nc7));
}

void ring_up_checks(Suite& s) {
    const auto start = std::chrono::steady_clock::now();
    const RunResult r = s.run_scenario(s.scenario("fig2"));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Table& tr = r.tables.at("trajectory");
    const double nc = critical_photon_number(r.config.params);

    double worst = INFINITY, worst_n = 0.0, last_ok_n = 0.0;
    bool still_ok = true;
    for (size_t i = 0; i < tr.rows(); ++i) {
        const double n = tr.column("nbar")[i];
        if (n < nc) continue;
        const double ratio = tr.column("infid_bare")[i] / tr.column("infid_dressed")[i];
        if (ratio < worst) {
            worst = ratio;
            worst_n = n;
        }
        if (still_ok && ratio >= 10.0) last_ok_n = n;
        if (ratio < 10.0) still_ok = false;
    }
    s.report("2a", worst >= 10.0,
             format("min (1-F_b)/(1-F) for nbar >= n_c: %.2f at nbar = %.1f; >= 10 holds up to nbar = %.1f", worst,
                    worst_n, last_ok_n));

    const double t_end = r.config.t_end;
    const double plateau = mean_between(tr, "P_stray", 0.5 * t_end, t_end + 1.0);
    double peak = 0.0;
    for (double v : tr.column("P_stray")) peak = std::max(peak, v);
    s.report("2b", plateau >= 3e-6 && plateau <= 3e-5,
             format("P_stray plateau (mean over second half) = %.3g, peak = %.3g; want [3e-6, 3e-5]", plateau, peak));

    const double fc = at_time(tr, "infid_correct", t_end);
    s.report("2c", fc >= 3e-2 && fc <= 3e-1, format("1-F_c at %.0f ns = %.4f; want [0.03, 0.3]", t_end, fc));
    s.report("2d", wall < 300.0, format("simulation wall time %.1f s at N = %d; want < 300 s", wall, r.config.params.n_res));

    const double drift = r.metric("norm_drift");
    s.report("8a", drift < 1e-8, format("norm drift over %.0f ns = %.2e; want < 1e-8", t_end, drift));
}

void leakage_checks(Suite& s) {
    const RunResult r = s.run_scenario(s.scenario("fig3a"));
    const double p_sim = r.metric("p_max_sim"), p_model = r.metric("p_max_model");
    const double rel = std::abs(p_sim / p_model - 1.0);
    s.report("3a", rel <= 0.25,
             format("P_max simulated %.4g vs 4|eps g/(Omega0 Delta)|^2 = %.4g, off by %.1f%%; want <= 25%%", p_sim,
                    p_model, 100 * rel));

    // Period-averaged stray population after the oscillation has decayed.
    const Table& lk = r.tables.at("leakage");
    const double t_decay = r.metric("t_decay_sim");
    const double period = kTwoPi / r.metric("omega0_model");
    double worst = 0.0;
    int windows = 0;
    for (double t0 = t_decay; t0 + 2 * period <= r.config.t_end + 1e-9; t0 += 2 * period) {
        const double sim = mean_between(lk, "P_stray", t0, t0 + 2 * period);
        const double model = mean_between(lk, "P_ss0_plus_ss", t0, t0 + 2 * period);
        worst = std::max(worst, std::abs(std::log(sim / model)));
        ++windows;
    }
    s.report("3b", windows > 0 && worst <= std::log(2.0),
             format("after t_decay = %.1f ns, P_stray / (P_ss(0) + P_ss(t)) stays within x%.2f over %d windows; want "
                    "x2",
                    t_decay, std::exp(worst), windows));

    const double a = crude_stray_estimate(0.05, 0.1, 1.0), b = crude_stray_estimate(0.1, 0.1, 0.5);
    const double ea = std::abs(a / 3e-5 - 1.0), eb = std::abs(b / 2e-3 - 1.0);
    s.report("3c", ea <= 0.3 && eb <= 0.3,
             format("crude estimates %.3g (vs 3e-5, %.0f%%) and %.3g (vs 2e-3, %.0f%%); want <= 30%%", a, 100 * ea, b,
                    100 * eb));
}

void frequency_check(Suite& s) {
    const RunResult r = s.run_scenario(s.scenario("fig4e"));
    const Table& f = r.tables.at("frequency");
    double worst = 0.0, n_lo = INFINITY, n_hi = 0.0;
    for (size_t i = 0; i < f.rows(); ++i) {
        worst = std::max(worst, std::abs(f.column("rel_err")[i]));
        n_lo = std::min(n_lo, f.column("nbar")[i]);
        n_hi = std::max(n_hi, f.column("nbar")[i]);
    }
    s.report("4", f.rows() > 0 && worst <= 0.05,
             format("max |Omega_sim/Omega_model - 1| = %.2f%% over nbar in [%.1f, %.1f] (%zu windows); want <= 5%%",
                    100 * worst, n_lo, n_hi, f.rows()));
}

// Least-squares C in t_decay = C |chi eps|^{-1/2} through the origin.
void decay_sweep(Suite& s, const std::string& id, const std::string& name, const std::string& axis,
                 const std::vector<double>& values) {
    double sxy = 0.0, sxx = 0.0;
    std::ostringstream points;
    for (double v : values) {
        ExperimentConfig c = s.scenario(name);
        set_axis(c, axis, v);
        const ExperimentConfig probe = resolve(c);
        const double chi = chi_approx(probe.params);
        const double x = 1.0 / std::sqrt(std::abs(chi * angular(c.eps)));
        c.t_end = std::ceil(2.2 * kDecayPrefactor * x);
        c.auto_n_res = true;
        c.outputs = {Output::kLeakage, Output::kDecay};
        const RunResult r = s.run_scenario(c);
        const double t = r.metric("t_decay_sim");
        if (!std::isfinite(t)) throw std::runtime_error(axis + "=" + std::to_string(v) + ": no decay time measured");
        sxy += t * x;
        sxx += x * x;
        points << format(" %s=%g:%.2f", axis.c_str(), v, t / x);
    }
    const double C = sxy / sxx;
    s.report(id, values.size() >= 5 && std::abs(C - 1.23) <= 0.2,
             format("C = %.3f from %zu-point %s sweep (per point t/x:%s); want 1.23 +- 0.2", C, values.size(),
                    axis.c_str(), points.str().c_str()));
}

void squeeze_checks(Suite& s) {
    const RunResult r = s.run_scenario(s.scenario("fig5"));
    const double t_end = r.config.t_end;
    const Table& sq = r.tables.at("squeeze");
    const double r_fit = at_time(sq, "r_fit", t_end);
    s.report("6a", std::abs(r_fit - 0.550) <= 0.03, format("fitted r at %.0f ns = %.4f; want 0.550 +- 0.03", t_end, r_fit));

    const double lo = at_time(sq, "ratio_min", t_end), hi = at_time(sq, "ratio_max", t_end);
    const double elo = std::abs(lo / 0.340 - 1.0), ehi = std::abs(hi / 3.01 - 1.0);
    s.report("6b", elo <= 0.05 && ehi <= 0.05,
             format("variance ratios %.4f and %.4f (off %.1f%% and %.1f%%); want within 5%% of 0.340 and 3.01", lo, hi,
                    100 * elo, 100 * ehi));

    const Table& red = r.tables.at("reduced_analytic");
    const ShearedParams sp{cplx(at_time(red, "re_beta", t_end), at_time(red, "im_beta", t_end)),
                           at_time(red, "K", t_end), at_time(red, "W", t_end), 0};
    const auto ext = sheared_variance_extrema(sp);
    const double err = std::abs(ext[0] * ext[1] - 1.0 / 16);
    s.report("6c", err <= 1e-12,
             format("converted state at %.0f ns (K = %.4f, W = %.4f): |min*max - 1/16| = %.1e; want <= 1e-12", t_end,
                    sp.K, sp.W, err));
}

void reduced_check(Suite& s) {
    const RunResult r = s.run_scenario(s.scenario("fig6"));
    const Table& dss = r.tables.at("dss");
    double sq_max = 0.0;
    for (double v : dss.column("squeezed_measured_analytic")) sq_max = std::max(sq_max, v);
    const double t_end = r.config.t_end;
    const double coh_end = at_time(dss, "coherent_measured", t_end);
    const double sq_end = at_time(dss, "squeezed_measured_analytic", t_end);
    s.report("7", sq_max <= 2e-3 && coh_end > 3e-2 && coh_end >= 10 * sq_end,
             format("squeezed max %.3g (want <= 2e-3), coherent at %.0f ns %.3g (want > 3e-2), separation x%.0f (want "
                    ">= 10)",
                    sq_max, t_end, coh_end, coh_end / sq_end));
}

void property_checks(Suite& s) {
    {
        SystemParams p = default_params();
        p.f_d = resonant_drive_frequency(p, 0);
        const RotatingHamiltonian h0 = build_h0(p);
        const DriveOperator d = build_drive_op(p);
        std::vector<cplx> psi(p.dim(), 0.0);
        psi[0] = 1.0;
        const std::vector<cplx> psi0 = psi;
        const Propagator prop(h0, d, DriveEnvelope::sudden(0.010));
        prop.advance(psi, 0.0, 200.0);
        prop.advance(psi, 200.0, 0.0);
        const double f = amp_fidelity(psi0, psi);
        s.report("8b", f > 1.0 - 1e-8, format("forward then backward 200 ns at N = %d: 1-F = %.2e; want < 1e-8", p.n_res,
                                              1.0 - f));
    }
    {
        SystemParams p = default_params();
        p.n_res = 20;
        p.f_d = resonant_drive_frequency(p, 0);
        const RotatingHamiltonian h0 = build_h0(p);
        const DressedBasis basis = diagonalize(h0, p);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(h0.dense());
        std::vector<double> strip(basis.energies().begin(), basis.energies().end());
        std::sort(strip.begin(), strip.end());
        double e_err = 0.0;
        for (int i = 0; i < p.dim(); ++i) e_err = std::max(e_err, std::abs(strip[i] - dense.eigenvalues()[i]));
        const Eigen::MatrixXd u = basis.dense_u();
        Eigen::MatrixXd dd = u.transpose() * h0.dense() * u;
        for (int i = 0; i < p.dim(); ++i) dd(i, i) -= basis.energies()[i];
        const double v_err = dd.cwiseAbs().maxCoeff();
        s.report("8c", e_err <= 1e-10 && v_err <= 1e-10,
                 format("N = 20: max eigenvalue difference %.1e, max |U^T H U - E| %.1e; want <= 1e-10", e_err, v_err));
    }
    {
        // The whole region |K/beta| sqrt(W) < 0.05 at |beta|^2 = 100 for W in [0.5, 2].
        const double b = 10.0;
        double worst = 1.0, worst_k = 0.0, worst_w = 0.0;
        int points = 0, failing = 0;
        double ok_x = 0.05;
        for (double w : {0.5, 0.8, 1.0, 1.25, 2.0}) {
            for (double x : {0.0, 0.01, 0.02, 0.03, 0.04, 0.049}) {
                for (double sign : {1.0, -1.0}) {
                    if (x == 0.0 && sign < 0) continue;
                    const ShearedParams sp{std::polar(b, 0.4), sign * x * b / std::sqrt(w), w, 0};
                    const int n = 600;
                    const double f =
                        amp_fidelity(sheared_gaussian_amplitudes(sp, n), squeezed_amplitudes(shear_to_squeeze(sp), n));
                    ++points;
                    if (f <= 1.0 - 1e-3) {
                        ++failing;
                        ok_x = std::min(ok_x, x);
                    }
                    if (f < worst) {
                        worst = f;
                        worst_k = sp.K;
                        worst_w = w;
                    }
                }
            }
        }
        s.report("8d", failing == 0,
                 format("shear/squeeze round trip at |beta|^2 = 100: %d of %d points below 1-1e-3, worst 1-F = %.2e (K "
                        "= %.2f, W = %.2f), smallest failing |K/beta|sqrt(W) = %.2f",
                        failing, points, 1.0 - worst, worst_k, worst_w, ok_x));
    }
    {
        const ShearedParams sp{std::polar(20.0, 0.7), 0.2, 0.8, 0};
        const auto c = sheared_gaussian_amplitudes(sp, 900);
        cplx a2 = 0.0;
        for (size_t n = 2; n < c.size(); ++n) a2 += std::conj(c[n - 2]) * std::sqrt(double(n) * (n - 1)) * c[n];
        const double rel = std::abs(a2 - sheared_mean_a2(sp)) / std::abs(a2);
        s.report("8e", rel <= 2.0 / 20.0,
                 format("<a^2> Fock sum vs closed form at |beta|^2 = 400, K = 0.2, W = 0.8: relative %.2e; want <= %.2f",
                        rel, 2.0 / 20.0));
    }
}

void entanglement_checks(Suite& s) {
    SystemParams p = default_params();
    p.g = 0.1;
    const double nc = critical_photon_number(p);
    const double n_top = 64 * nc;
    p.n_res = 1900;
    p.f_d = resonant_drive_frequency(p, 0);
    const DressedBasis basis = diagonalize(p);

    double worst_prod = INFINITY, worst_ef = INFINITY;
    for (int n = static_cast<int>(nc); n <= static_cast<int>(4 * nc); ++n) {
        const auto coh = coherent_amplitudes(std::sqrt(double(n)), p.n_res);
        std::vector<cplx> fock(p.n_res, 0.0);
        fock[n] = 1.0;
        const double pc = product_approx(basis, coh, 0).infidelity;
        const double pf = product_approx(basis, fock, 0).infidelity;
        const double ec = entanglement_of_formation(basis.embed_ladder(coh, 0), p.n_res);
        const double ef = entanglement_of_formation(basis.embed_ladder(fock, 0), p.n_res);
        worst_prod = std::min(worst_prod, pf / pc);
        worst_ef = std::min(worst_ef, ef / ec);
    }
    s.report("9a", worst_prod >= 10.0,
             format("Fock/coherent product infidelity ratio >= %.0f on n in [n_c, 4n_c]; want >= 10", worst_prod));
    s.report("9b", worst_ef >= 10.0, format("Fock/coherent E_F ratio >= %.0f on n in [n_c, 4n_c]; want >= 10", worst_ef));

    // Local log-log slope over successive doublings from n_c.
    std::vector<double> ns, ef;
    for (double n = nc; n <= n_top * (1 + 1e-9); n *= 2) {
        ns.push_back(n);
        ef.push_back(entanglement_of_formation(basis.embed_ladder(coherent_amplitudes(std::sqrt(n), p.n_res), 0), p.n_res));
    }
    std::vector<double> slopes;
    for (size_t i = 1; i < ns.size(); ++i) slopes.push_back(std::log(ef[i] / ef[i - 1]) / std::log(ns[i] / ns[i - 1]));
    bool non_monotone = false, decreasing = true;
    for (size_t i = 0; i < slopes.size(); ++i) {
        if (slopes[i] < 0) non_monotone = true;
        if (i > 0 && slopes[i] > slopes[i - 1]) decreasing = false;
    }
    const bool saturating = decreasing && slopes.back() < 1.0;
    std::string list;
    for (double v : slopes) list += format(" %.2f", v);
    s.report("9c", non_monotone || saturating,
             format("coherent E_F slopes d log E_F / d log n over n = %.0f..%.0f:%s (%s%s)", ns.front(), ns.back(),
                    list.c_str(), non_monotone ? "non-monotone" : "monotone", saturating ? ", saturating" : ""));
}

void guarded(Suite& s, const std::string& first_id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        s.error(first_id, e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dressq acceptance suite"};
    std::string scenarios = DRESSQ_SCENARIO_DIR;
    std::string work = (fs::temp_directory_path() / "dressq_acceptance").string();
    std::vector<std::string> expect_fail, only;
    app.add_option("--scenarios", scenarios, "scenario directory");
    app.add_option("--work-dir", work, "cache and scratch directory");
    app.add_option("--expect-fail", expect_fail, "criteria known to fail; exit status ignores exactly these")
        ->delimiter(',');
    app.add_option("--only", only, "criterion groups to run (1-9)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    Suite s(scenarios, work, std::set<std::string>(only.begin(), only.end()));
    if (s.selected("1")) critical_photon_number_check(s);
    if (s.selected("2") || s.selected("8")) guarded(s, "2", [&] { ring_up_checks(s); });
    if (s.selected("3")) guarded(s, "3", [&] { leakage_checks(s); });
    if (s.selected("4")) guarded(s, "4", [&] { frequency_check(s); });
    if (s.selected("5")) {
        guarded(s, "5a", [&] { decay_sweep(s, "5a", "fig4f", "eps", {0.01, 0.015, 0.02, 0.025, 0.03}); });
        guarded(s, "5b", [&] { decay_sweep(s, "5b", "fig4g", "eta", {0.1, 0.15, 0.2, 0.25, 0.3}); });
    }
    if (s.selected("6")) guarded(s, "6", [&] { squeeze_checks(s); });
    if (s.selected("7")) guarded(s, "7", [&] { reduced_check(s); });
    if (s.selected("8")) guarded(s, "8", [&] { property_checks(s); });
    if (s.selected("9")) guarded(s, "9", [&] { entanglement_checks(s); });

    const std::set<std::string> expected(expect_fail.begin(), expect_fail.end());
    int passed = 0, failed = 0, unexpected = 0;
    std::string failures;
    for (const Line& l : s.lines()) {
        (l.pass ? passed : failed)++;
        if (!l.pass) failures += " " + l.id;
        if (l.pass == (expected.count(l.id) > 0)) ++unexpected;
    }
    std::printf("acceptance: %d passed, %d failed%s%s\n", passed, failed, failed ? ":" : "", failures.c_str());
    if (unexpected) std::printf("acceptance: %d result(s) differ from the expected-failure list\n", unexpected);
    return unexpected ? 1 : 0;
}
