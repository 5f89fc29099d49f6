// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace safesieve {

using Rng = std::mt19937_64;

/// Seed splitting: every child stream is a splitmix64 mix of its parent seed
/// and a stream index, so adding a stream never perturbs a sibling.
///
///   root seed -> trial seed   = derive_seed(root, trial_index)
///   trial     -> episode seed = derive_seed(trial, episode_index)
///   trial     -> named stream = derive_seed(trial, stream_tag("name"))
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

/// Stable 64-bit tag for a named stream (FNV-1a).
std::uint64_t stream_tag(std::string_view name);

Rng make_rng(std::uint64_t seed);

/// Uniform double in [0, 1) from a 64-bit hash value.
double unit_interval(std::uint64_t bits);

} // namespace safesieve
