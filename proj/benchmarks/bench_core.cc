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


#include <complex>
#include <vector>

#include <benchmark/benchmark.h>

#include "dressq/dressed.h"
#include "dressq/model.h"
#include "dressq/propagate.h"
#include "dressq/spectrum.h"

namespace {

using namespace dressq;

SystemParams params_with(int n_res) {
    SystemParams p = default_params();
    p.n_res = n_res;
    p.f_d = resonant_drive_frequency(p, 0);
    return p;
}

void BM_ApplyHamiltonian(benchmark::State& state) {
    const SystemParams p = params_with(static_cast<int>(state.range(0)));
    const RotatingHamiltonian h0 = build_h0(p);
    const DriveOperator d = build_drive_op(p);
    std::vector<cplx> in(p.dim(), cplx(1.0, 0.5)), out(p.dim());
    for (auto _ : state) {
        apply_hamiltonian(h0, d, cplx(0.06, 0.0), in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * p.dim());
}
BENCHMARK(BM_ApplyHamiltonian)->Arg(300)->Arg(1900);

void BM_Diagonalize(benchmark::State& state) {
    const SystemParams p = params_with(static_cast<int>(state.range(0)));
    const RotatingHamiltonian h0 = build_h0(p);
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(h0, p));
}
BENCHMARK(BM_Diagonalize)->Arg(300)->Arg(1900)->Unit(benchmark::kMillisecond);

// One nanosecond of driven evolution from a coherent-like state.
void BM_PropagateNanosecond(benchmark::State& state) {
    const SystemParams p = params_with(300);
    const RotatingHamiltonian h0 = build_h0(p);
    const DriveOperator d = build_drive_op(p);
    const Propagator prop(h0, d, DriveEnvelope::sudden(0.010));
    std::vector<cplx> psi0(p.dim(), 0.0);
    const auto c = coherent_amplitudes(7.0, p.n_res);
    for (int n = 0; n < p.n_res; ++n) psi0[flat_index(n, 0)] = c[n];
    for (auto _ : state) {
        std::vector<cplx> psi = psi0;
        prop.advance(psi, 50.0, 51.0);
        benchmark::DoNotOptimize(psi.data());
    }
}
BENCHMARK(BM_PropagateNanosecond)->Unit(benchmark::kMillisecond);

void BM_SqueezedAmplitudes(benchmark::State& state) {
    const double n = static_cast<double>(state.range(0));
    const SqueezeOptical opt{std::polar(std::sqrt(n), 0.4), 0.5, 1.1};
    const int n_max = static_cast<int>(n + 12 * std::sqrt(n) + 40);
    for (auto _ : state) benchmark::DoNotOptimize(squeezed_amplitudes(opt, n_max));
}
BENCHMARK(BM_SqueezedAmplitudes)->Arg(100)->Arg(1600);

}  // namespace

BENCHMARK_MAIN();
