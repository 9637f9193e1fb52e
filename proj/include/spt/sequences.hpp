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

// Zadoff-Chu sequences with their cyclic-shift preambles. The circular
// correlation and convolution helpers live here as well.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>

#include "spt/fft.hpp"
#include "spt/types.hpp"

namespace spt {

constexpr bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

/// z_r[n] = exp(-j pi r n (n+1) / N_zc), n = 0..N_zc-1.
///
/// The phase index r n(n+1)/2 is reduced modulo N_zc in integer arithmetic,
/// so large n does not lose precision.
inline ComplexSequence zc_sequence(int root, int n_zc)
{
    require(is_prime(n_zc), "zc_sequence: N_zc=" + std::to_string(n_zc) + " is not prime");
    require(root >= 1 && root <= n_zc - 1,
            "zc_sequence: root " + std::to_string(root) + " outside 1..N_zc-1");

    const auto n_mod = static_cast<std::int64_t>(n_zc);
    ComplexSequence z(static_cast<std::size_t>(n_zc));
    for (std::int64_t n = 0; n < n_mod; ++n) {
        const std::int64_t tri = (n * (n + 1) / 2) % n_mod;
        const std::int64_t k = (static_cast<std::int64_t>(root) * tri) % n_mod;
        const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_zc);
        z[static_cast<std::size_t>(n)] = std::polar(1.0, phase);
    }
    return z;
}

/// Left rotation by `amount` samples: out[n] = x[(n + amount) mod N].
inline ComplexSequence rotate_left(std::span<const cplx> x, std::size_t amount)
{
    const std::size_t n = x.size();
    ComplexSequence out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[(i + amount) % n];
    return out;
}

inline void check_preamble(const PreambleId& id, int n_cs, int n_zc)
{
    require(n_cs >= 0, "preamble: N_cs must be non-negative");
    require(id.shift >= 1, "preamble: shift index must be >= 1");
    require(static_cast<std::int64_t>(id.shift) * n_cs < n_zc,
            "preamble: shift*N_cs = " + std::to_string(id.shift * n_cs) + " must be < N_zc = " +
                std::to_string(n_zc));
}

/// x[n] = z_root[(n + shift * N_cs) mod N_zc]
inline ComplexSequence generate_preamble(const PreambleId& id, int n_cs, int n_zc)
{
    check_preamble(id, n_cs, n_zc);
    const auto z = zc_sequence(id.root, n_zc);
    return rotate_left(z, static_cast<std::size_t>(id.shift) * static_cast<std::size_t>(n_cs));
}

/// Reference O(N^2) path: out[a] = sum_n a[n] conj(b[(n + a) mod N]).
inline ComplexSequence circular_correlation_direct(std::span<const cplx> a, std::span<const cplx> b)
{
    require(!a.empty() && a.size() == b.size(), "circular_correlation: length mismatch");
    const std::size_t n = a.size();
    ComplexSequence out(n);
    for (std::size_t lag = 0; lag < n; ++lag) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i)
            acc += a[i] * std::conj(b[(i + lag) % n]);
        out[lag] = acc;
    }
    return out;
}

/// Correlation with the spectrum of `b` already computed and conjugated.
/// With r = IDFT(A conj(B)) we have r[t] = sum_n a[n+t] conj(b[n]), and the
/// wanted lag convention is out[a] = r[-a].
inline ComplexSequence correlate_with_spectrum(std::span<const cplx> a_spectrum,
                                               std::span<const cplx> b_spectrum_conj)
{
    require(!a_spectrum.empty() && a_spectrum.size() == b_spectrum_conj.size(),
            "circular_correlation: length mismatch");
    const std::size_t n = a_spectrum.size();
    ComplexSequence prod(n);
    for (std::size_t k = 0; k < n; ++k)
        prod[k] = a_spectrum[k] * b_spectrum_conj[k];
    const auto r = fft::backward(prod);
    const double scale = 1.0 / static_cast<double>(n);
    ComplexSequence out(n);
    out[0] = r[0] * scale;
    for (std::size_t lag = 1; lag < n; ++lag)
        out[lag] = r[n - lag] * scale;
    return out;
}

/// FFT-accelerated circular correlation, same convention as the direct path.
inline ComplexSequence circular_correlation(std::span<const cplx> a, std::span<const cplx> b)
{
    require(!a.empty() && a.size() == b.size(), "circular_correlation: length mismatch");
    const auto fa = fft::forward(a);
    auto fb = fft::forward(b);
    for (auto& v : fb)
        v = std::conj(v);
    return correlate_with_spectrum(fa, fb);
}

/// out[n] = sum_l b[l] a[(n - l) mod N], with b zero-extended to len(a).
/// Direct summation; channel impulse responses are short.
inline ComplexSequence circular_convolution(std::span<const cplx> a, std::span<const cplx> b)
{
    require(!a.empty() && !b.empty(), "circular_convolution: empty input");
    require(b.size() <= a.size(), "circular_convolution: kernel longer than signal");
    const std::size_t n = a.size();
    ComplexSequence out(n);
    for (std::size_t l = 0; l < b.size(); ++l) {
        const cplx tap = b[l];
        if (tap == cplx{})
            continue;
        // out[i] += tap * a[i - l], split to avoid the modulo in the inner loop
        for (std::size_t i = 0; i < l; ++i)
            out[i] += tap * a[n - l + i];
        for (std::size_t i = l; i < n; ++i)
            out[i] += tap * a[i - l];
    }
    return out;
}

}  // namespace spt
