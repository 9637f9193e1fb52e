/*
   Copyright 2026 The spt-sim Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "spt/types.hpp"

namespace spt {

using RandomStream = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// Independent stream keyed on (seed, trial, label). The key words are mixed
/// with splitmix64 and fed through seed_seq so neighbouring trial indices do
/// not produce correlated engine states.
inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t trial_index, std::string_view substream)
{
    const std::uint64_t a = detail::splitmix64(seed);
    const std::uint64_t b = detail::splitmix64(a ^ detail::splitmix64(trial_index + 0x632be59bd9b4e019ULL));
    const std::uint64_t c = detail::splitmix64(b ^ detail::fnv1a(substream));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    return RandomStream(seq);
}

/// Circularly symmetric complex Gaussian with E|w|^2 = variance.
inline cplx complex_gaussian(RandomStream& rng, double variance)
{
    // One distribution object yields both components from a single polar pair.
    std::normal_distribution<double> normal;
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {scale * re, scale * im};
}

}  // namespace spt
