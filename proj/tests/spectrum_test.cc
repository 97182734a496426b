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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "dressq/basis_cache.h"
#include "test_util.h"

namespace dressq {
namespace {

using testing::resonant_params;

TEST(Spectrum, MatchesDenseDiagonalization) {
    const SystemParams p = resonant_params(20);
    const RotatingHamiltonian h0 = build_h0(p);
    const DressedBasis basis = diagonalize(h0, p);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(h0.dense());
    std::vector<double> strip(basis.energies().begin(), basis.energies().end());
    std::sort(strip.begin(), strip.end());
    for (int i = 0; i < p.dim(); ++i) EXPECT_NEAR(strip[i], dense.eigenvalues()[i], 1e-10);

    const Eigen::MatrixXd u = basis.dense_u();
    EXPECT_LT((u.transpose() * u - Eigen::MatrixXd::Identity(p.dim(), p.dim())).norm(), 1e-12);
    const Eigen::MatrixXd d = u.transpose() * h0.dense() * u;
    for (int i = 0; i < p.dim(); ++i) {
        EXPECT_NEAR(d(i, i), basis.energies()[i], 1e-10);
        for (int j = 0; j < p.dim(); ++j) {
            if (i != j) EXPECT_NEAR(d(i, j), 0.0, 1e-10);
        }
    }
}

TEST(Spectrum, LowestStrips) {
    const SystemParams p = resonant_params(20);
    const DressedBasis basis = diagonalize(p);
    EXPECT_DOUBLE_EQ(basis.energy(0, 0), 0.0);
    const double delta = p.detuning(), g = p.g_rad();
    EXPECT_NEAR(basis.energy(1, 0) - basis.energy(0, 1), std::sqrt(delta * delta + 4 * g * g), 1e-10);
    // The resonator-like state sits above the qubit-like state for Δ > 0.
    EXPECT_GT(std::abs(basis.component(1, 0, 0)), std::abs(basis.component(1, 0, 1)));
}

TEST(Spectrum, ResonantDriveFrequency) {
    const SystemParams p = default_params();
    EXPECT_NEAR(resonant_drive_frequency(p, 0), 6.00990195, 1e-8);
    // In the frame of that drive, ladder 0 has zero frequency at n = 0.
    const SystemParams q = resonant_params(30);
    EXPECT_NEAR(ladder_profile(diagonalize(q), 0).omega_at(0.0), 0.0, 1e-10);
}

TEST(Spectrum, CriticalPhotonNumber) {
    SystemParams p = default_params();
    EXPECT_DOUBLE_EQ(critical_photon_number(p), 25.0);
    p.g = 0.1414;
    EXPECT_NEAR(critical_photon_number(p), 12.5, 0.1);
    p.g = 0.05;
    EXPECT_NEAR(critical_photon_number(p), 100.0, 1e-9);
}

TEST(Spectrum, DetuningWeakCouplingLimit) {
    SystemParams p = resonant_params(20);
    p.g = 1e-6;
    EXPECT_NEAR(detuning_n(diagonalize(p), 0), p.detuning(), 1e-8);
}

TEST(Spectrum, DetuningLinearModelBelowTwiceCritical) {
    const SystemParams p = resonant_params(120);
    const DressedBasis basis = diagonalize(p);
    const double chi = chi_approx(p);
    const double nc = critical_photon_number(p);
    double prev = detuning_n(basis, 0);
    for (int n = 0; n <= 2 * nc; ++n) {
        const double exact = detuning_n(basis, n);
        const double model = p.detuning() - 2 * chi * n;
        EXPECT_NEAR(exact / model, 1.0, 0.10) << "n=" << n;
        if (n > 0) EXPECT_GT(exact, prev) << "n=" << n;
        prev = exact;
    }
}

TEST(Spectrum, DetuningLookups) {
    const SystemParams p = resonant_params(60);
    const DressedBasis basis = diagonalize(p);
    EXPECT_DOUBLE_EQ(detuning_at(basis, 10.4), detuning_n(basis, 10));
    EXPECT_DOUBLE_EQ(detuning_at(basis, 10.6), detuning_n(basis, 11));
    std::vector<double> w(40, 0.0);
    w[17] = 3.0;
    EXPECT_NEAR(detuning_weighted(basis, w), detuning_n(basis, 17), 1e-12);
    w[18] = 3.0;
    EXPECT_NEAR(detuning_weighted(basis, w), 0.5 * (detuning_n(basis, 17) + detuning_n(basis, 18)), 1e-12);
    EXPECT_DOUBLE_EQ(ladder_detuning(basis, 7, 0), detuning_n(basis, 7));
}

TEST(Spectrum, ChiApproximation) {
    SystemParams p = default_params();
    EXPECT_NEAR(chi_approx(p) / kTwoPi, -0.002, 1e-12);
    p.eta = 1e-12;
    EXPECT_NEAR(chi_approx(p), 0.0, 1e-12);
    // Δ(Δ+η) < 0 once the qubit sits just above the resonator.
    p = default_params();
    p.f_q = 6.1;
    EXPECT_GT(chi_approx(p), 0.0);
}

TEST(Spectrum, DressedLoweringElements) {
    const SystemParams p = resonant_params(30);
    const DressedBasis basis = diagonalize(p);
    const Eigen::SparseMatrix<double> a = dressed_lowering(basis);
    const Eigen::MatrixXd u = basis.dense_u();
    const Eigen::MatrixXd a_dressed = u.transpose() * Eigen::MatrixXd(a) * u;
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(a_dressed(flat_index(0, k), flat_index(1, k)), 1.0, 1e-12);
    }
    for (int n = 0; n < 20; ++n) EXPECT_NEAR(a_dressed(flat_index(n, 0), flat_index(n + 1, 1)), 0.0, 1e-12);

    // [ā, ā†] = 1 away from the truncation edge.
    const Eigen::MatrixXd comm = a_dressed * a_dressed.transpose() - a_dressed.transpose() * a_dressed;
    for (int n = 0; n < p.n_res - 10; ++n) {
        for (int k = 0; k < kTransmonLevels; ++k) {
            EXPECT_NEAR(comm(flat_index(n, k), flat_index(n, k)), 1.0, 1e-10);
        }
    }

    std::vector<cplx> c(p.dim(), 0.0);
    c[flat_index(3, 2)] = 1.0;
    const auto lowered = apply_dressed_lowering(c, p.n_res);
    EXPECT_NEAR(std::abs(lowered[flat_index(2, 2)]), std::sqrt(3.0), 1e-15);
}

TEST(Spectrum, EffectiveDriveFactors) {
    const SystemParams p = resonant_params(40);
    EXPECT_NEAR(effective_drive_factor_analytic(p, 0), 0.995, 1e-12);
    const double g = p.g, d = p.f_r - p.f_q, eta = p.eta;
    EXPECT_NEAR(effective_drive_factor_analytic(p, 1),
                1 + 0.5 * (g / d) * (g / d) - 0.5 * std::pow(std::sqrt(2.0) * g / (d + eta), 2), 1e-12);
    const DressedBasis basis = diagonalize(p);
    for (int k = 0; k < 2; ++k) {
        const double matrix = effective_drive(basis, 5, k, 1.0).real();
        EXPECT_NEAR(matrix / effective_drive_factor_analytic(p, k), 1.0, 1e-3) << "k=" << k;
    }
}

TEST(Spectrum, LadderFrequencyShape) {
    const SystemParams p = resonant_params(120);
    const DressedBasis basis = diagonalize(p);
    const LadderProfile w0 = ladder_profile(basis, 0);
    const LadderProfile w1 = ladder_profile(basis, 1);
    EXPECT_EQ(w0.omega().size(), static_cast<std::size_t>(p.n_res - 1));
    for (int n = 1; n <= 5; ++n) EXPECT_GT(std::abs(w0.domega_at(n)), std::abs(w1.domega_at(n))) << n;

    int sign_changes = 0;
    for (int n = 10; n < 35; ++n) {
        if (w1.domega_at(n) > 0 && w1.domega_at(n + 1) <= 0) ++sign_changes;
    }
    EXPECT_EQ(sign_changes, 1);
    EXPECT_GT(w1.domega_at(5), 0.0);
    EXPECT_THROW(w0.omega_at(w0.max_n() + 0.5), std::out_of_range);
}

TEST(Spectrum, IdentificationIgnoresEigenpairOrder) {
    const std::vector<double> bare{3.0, -1.0, 0.5, 2.0};
    std::vector<StripEigenpair> pairs{{-1.2, {}}, {0.4, {}}, {2.2, {}}, {3.1, {}}};
    const auto base = identify_strip(bare, pairs);
    std::vector<int> perm(pairs.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<StripEigenpair> shuffled;
        for (int i : perm) shuffled.push_back(pairs[i]);
        const auto got = identify_strip(bare, shuffled);
        for (std::size_t j = 0; j < bare.size(); ++j) {
            EXPECT_EQ(shuffled[got[j]].energy, pairs[base[j]].energy);
        }
    }
    // Rank matching: the lowest bare energy gets the lowest eigenvalue.
    EXPECT_EQ(pairs[base[1]].energy, -1.2);
    EXPECT_EQ(pairs[base[0]].energy, 3.1);

    std::vector<StripEigenpair> degenerate{{1.0, {}}, {1.0, {}}};
    EXPECT_THROW(identify_strip(std::vector<double>{0.0, 1.0}, degenerate), std::runtime_error);
}

TEST(Spectrum, EigenvectorOrientation) {
    const SystemParams p = resonant_params(80);
    const DressedBasis basis = diagonalize(p);
    for (int k = 0; k < 4; ++k) {
        for (int n = 1; n < p.n_res - 1; ++n) {
            EXPECT_GT(basis.bare_lowering_element(n - 1, k, n, k), 0.0) << n << "," << k;
            // The dominant component stays on the bare state the level connects to.
            const auto& v = basis.strip_vector(n, k);
            EXPECT_GT(v[k], 0.0) << n << "," << k;
        }
    }
}

TEST(Spectrum, ReliabilityGuard) {
    const DressedBasis basis = diagonalize(resonant_params(50));
    EXPECT_TRUE(basis.n_is_reliable(40));
    EXPECT_FALSE(basis.n_is_reliable(41));
}

TEST(Spectrum, ParamsHashSensitivity) {
    const SystemParams p = default_params();
    SystemParams q = p;
    EXPECT_EQ(params_hash(p), params_hash(q));
    q.e0 = -0.0;
    EXPECT_EQ(params_hash(p), params_hash(q));
    for (double SystemParams::*field : {&SystemParams::f_r, &SystemParams::f_q, &SystemParams::eta,
                                        &SystemParams::g, &SystemParams::f_d, &SystemParams::e0}) {
        q = p;
        q.*field += 1e-9;
        EXPECT_NE(params_hash(p), params_hash(q));
    }
}

class BasisCacheTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("dressq-cache-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::remove_all(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }
    std::filesystem::path dir_;
};

TEST_F(BasisCacheTest, RoundTrip) {
    const SystemParams p = resonant_params(25);
    const DressedBasis fresh = cached_diagonalize(p, dir_);
    const auto file = dir_ / basis_cache_name(p);
    ASSERT_TRUE(std::filesystem::exists(file));
    const auto loaded = load_basis(file, p);
    ASSERT_TRUE(loaded.has_value());
    for (int i = 0; i < p.dim(); ++i) {
        EXPECT_EQ(loaded->energies()[i], fresh.energies()[i]);
        const auto bi = BareIndex::from_flat(i);
        EXPECT_EQ(loaded->strip_vector(bi.n, bi.k), fresh.strip_vector(bi.n, bi.k));
    }
    SystemParams other = p;
    other.g = 0.11;
    EXPECT_FALSE(load_basis(file, other).has_value());
    EXPECT_FALSE(load_basis(dir_ / "missing.bin", p).has_value());
}

TEST_F(BasisCacheTest, RejectsCorruptFiles) {
    std::filesystem::create_directories(dir_);
    const SystemParams p = resonant_params(10);
    const auto file = dir_ / basis_cache_name(p);
    {
        std::ofstream f(file, std::ios::binary);
        f << "NOTABASIS-------------------";
    }
    EXPECT_THROW(load_basis(file, p), std::runtime_error);

    save_basis(diagonalize(p), file);
    std::filesystem::resize_file(file, std::filesystem::file_size(file) / 2);
    EXPECT_THROW(load_basis(file, p), std::runtime_error);
}

}  // namespace
}  // namespace dressq
