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

#include "dressq/basis_cache.h"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

namespace dressq {
namespace {

constexpr std::array<char, 8> kMagic = {'D', 'R', 'S', 'Q', 'B', 'A', 'S', '1'};

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t out = 0;
        for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return out;
    }
    return v;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    v = to_le(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in, const std::filesystem::path& path) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw std::runtime_error("basis cache " + path.string() + ": truncated file");
    }
    return to_le(v);
}

double get_f64(std::istream& in, const std::filesystem::path& path) {
    return std::bit_cast<double>(get_u64(in, path));
}

}  // namespace

std::string basis_cache_name(const SystemParams& params) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "basis-%016llx.bin", static_cast<unsigned long long>(params_hash(params)));
    return buf;
}

void save_basis(const DressedBasis& basis, const std::filesystem::path& path) {
    const auto tmp = std::filesystem::path(path.string() + "." +
                                           std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) +
                                           ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("basis cache: cannot write " + tmp.string());
        out.write(kMagic.data(), kMagic.size());
        put_u64(out, params_hash(basis.params()));
        put_u64(out, static_cast<std::uint64_t>(basis.n_res()));
        for (double e : basis.energies()) put_f64(out, e);
        for (int n = 0; n < basis.n_res(); ++n) {
            for (int k = 0; k < kTransmonLevels; ++k) {
                for (double v : basis.strip_vector(n, k)) put_f64(out, v);
            }
        }
        if (!out) throw std::runtime_error("basis cache: write failed for " + tmp.string());
    }
    // Rename so concurrent readers never see a partial file.
    std::filesystem::rename(tmp, path);
}

std::optional<DressedBasis> load_basis(const std::filesystem::path& path, const SystemParams& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw std::runtime_error("basis cache " + path.string() + ": bad magic");
    }
    if (get_u64(in, path) != params_hash(params)) return std::nullopt;
    const auto n_res = static_cast<std::int64_t>(get_u64(in, path));
    if (n_res != params.n_res) return std::nullopt;
    const int dim = params.dim();
    std::vector<double> energies(dim);
    for (double& e : energies) e = get_f64(in, path);
    std::vector<DressedBasis::StripVector> vectors(dim);
    for (auto& v : vectors)
        for (double& x : v) x = get_f64(in, path);
    return DressedBasis(params, std::move(energies), std::move(vectors));
}

DressedBasis cached_diagonalize(const SystemParams& params, const std::filesystem::path& cache_dir) {
    if (cache_dir.empty()) return diagonalize(params);
    const auto path = cache_dir / basis_cache_name(params);
    if (auto hit = load_basis(path, params)) return std::move(*hit);
    DressedBasis basis = diagonalize(params);
    std::filesystem::create_directories(cache_dir);
    save_basis(basis, path);
    return basis;
}

}  // namespace dressq
