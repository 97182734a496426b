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

#ifndef DRESSQ_BASIS_CACHE_H
#define DRESSQ_BASIS_CACHE_H

#include <filesystem>
#include <optional>
#include <string>

#include "dressq/spectrum.h"

namespace dressq {

/// File name used for a basis in a cache directory, keyed by params_hash.
std::string basis_cache_name(const SystemParams& params);

/// Binary layout: 8-byte magic, u64 params hash, i64 n_res, then dim energies
/// and 7*dim eigenvector components, all little-endian.
void save_basis(const DressedBasis& basis, const std::filesystem::path& path);

/// Returns nullopt when the file is missing or was written for different
/// parameters. Throws std::runtime_error on a malformed file.
std::optional<DressedBasis> load_basis(const std::filesystem::path& path, const SystemParams& params);

/// Loads from cache_dir when possible, otherwise diagonalizes and stores.
/// An empty cache_dir disables caching.
DressedBasis cached_diagonalize(const SystemParams& params, const std::filesystem::path& cache_dir);

}  // namespace dressq

#endif  // DRESSQ_BASIS_CACHE_H
