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

// Transmit side of one random-access slot: preamble choice and the
// superposed PRACH / PUSCH-SPT observations at every receive antenna.

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "spt/channel.hpp"
#include "spt/random.hpp"
#include "spt/sequences.hpp"
#include "spt/types.hpp"

namespace spt {

struct DeviceRealization {
    PreambleId preamble;
    BitVector payload;
    std::vector<Cir> cirs;  // one per receive antenna
};

/// Per-antenna observations; prach is time domain, spt is per subcarrier.
struct ReceivedGrid {
    std::vector<ComplexSequence> prach;
    std::vector<ComplexSequence> spt;
};

/// Independent uniform draws over roots x {1..N_P}. Collisions are allowed.
inline std::vector<PreambleId> select_preambles(int n_devices, std::span<const int> roots, int n_p,
                                                RandomStream& rng)
{
    require(n_devices >= 0, "select_preambles: N_I must be non-negative");
    require(!roots.empty(), "select_preambles: K must be >= 1");
    require(n_p >= 1, "select_preambles: N_P must be >= 1");
    // Single joint draw keeps the stream position independent of K.
    std::uniform_int_distribution<long long> pick(0, static_cast<long long>(roots.size()) * n_p - 1);
    std::vector<PreambleId> ids;
    ids.reserve(static_cast<std::size_t>(n_devices));
    for (int i = 0; i < n_devices; ++i) {
        const long long v = pick(rng);
        ids.push_back({roots[static_cast<std::size_t>(v / n_p)], static_cast<int>(v % n_p) + 1});
    }
    return ids;
}

inline std::size_t antenna_count(std::span<const DeviceRealization> devices)
{
    if (devices.empty())
        return 0;
    const std::size_t m = devices.front().cirs.size();
    for (const auto& d : devices)
        require(d.cirs.size() == m, "uplink: devices report inconsistent antenna counts");
    return m;
}

/// y_m[n] = sum_i sqrt(beta) (h_{m,i} * x_i)[n] + w_m[n]
///
/// `n_antennas` is needed for the empty-device case; when devices are given it
/// must agree with their CIR count.
inline std::vector<ComplexSequence> compose_prach(std::span<const DeviceRealization> devices, int n_antennas,
                                                  double beta, double sigma2, int n_cs, int n_zc,
                                                  RandomStream& rng)
{
    require(n_antennas >= 1, "compose_prach: M must be >= 1");
    require(beta >= 0.0, "compose_prach: beta must be non-negative");
    if (!devices.empty())
        require(antenna_count(devices) == static_cast<std::size_t>(n_antennas),
                "compose_prach: devices report inconsistent antenna counts");

    std::vector<ComplexSequence> y(static_cast<std::size_t>(n_antennas),
                                   ComplexSequence(static_cast<std::size_t>(n_zc)));
    for (const auto& dev : devices) {
        const auto x = generate_preamble(dev.preamble, n_cs, n_zc);
        for (std::size_t m = 0; m < y.size(); ++m) {
            require(dev.cirs[m].size() <= static_cast<std::size_t>(std::max(n_cs, 1)),
                    "compose_prach: CIR longer than N_cs");
            const auto rx = apply_channel(x, dev.cirs[m], beta);
            for (std::size_t n = 0; n < rx.size(); ++n)
                y[m][n] += rx[n];
        }
    }
    for (auto& ym : y)
        add_awgn_inplace(ym, sigma2, rng);
    return y;
}

/// Y_m[f] = sum_i sqrt(beta) H_{m,i}[f] s_i[f] + W, with BPSK 0 -> +1, 1 -> -1.
inline std::vector<ComplexSequence> compose_spt(std::span<const DeviceRealization> devices, int n_antennas,
                                                double beta, double sigma2, int n_sc, RandomStream& rng)
{
    require(n_antennas >= 1, "compose_spt: M must be >= 1");
    require(beta >= 0.0, "compose_spt: beta must be non-negative");
    if (!devices.empty())
        require(antenna_count(devices) == static_cast<std::size_t>(n_antennas),
                "compose_spt: devices report inconsistent antenna counts");

    const double amp = std::sqrt(beta);
    std::vector<ComplexSequence> y(static_cast<std::size_t>(n_antennas),
                                   ComplexSequence(static_cast<std::size_t>(n_sc)));
    for (const auto& dev : devices) {
        require(dev.payload.size() == static_cast<std::size_t>(n_sc),
                "compose_spt: payload length " + std::to_string(dev.payload.size()) + " != N_sc " +
                    std::to_string(n_sc));
        for (std::size_t m = 0; m < y.size(); ++m) {
            const auto h = frequency_response(dev.cirs[m], n_sc);
            for (std::size_t f = 0; f < h.size(); ++f) {
                const double s = dev.payload[f] ? -1.0 : 1.0;
                y[m][f] += amp * s * h[f];
            }
        }
    }
    for (auto& ym : y)
        add_awgn_inplace(ym, sigma2, rng);
    return y;
}

}  // namespace spt
