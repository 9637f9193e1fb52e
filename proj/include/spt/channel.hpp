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

// Tapped-delay-line multipath channels plus the AWGN helper.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "spt/random.hpp"
#include "spt/sequences.hpp"
#include "spt/types.hpp"

namespace spt {

/// PRACH sample period: 800 us sequence duration over 839 samples.
inline constexpr double kPrachSamplePeriod = 800e-6 / 839.0;

struct ChannelProfile {
    std::vector<double> tap_delays_ns;
    std::vector<double> tap_powers_db;
    double sample_period = kPrachSamplePeriod;  // seconds
};

/// ITU-R M.1225 Pedestrian B.
inline ChannelProfile pedestrian_b()
{
    return {{0.0, 200.0, 800.0, 1200.0, 2300.0, 3700.0}, {0.0, -0.9, -4.9, -8.0, -7.8, -23.9}, kPrachSamplePeriod};
}

inline void validate(const ChannelProfile& profile)
{
    require(!profile.tap_delays_ns.empty(), "channel_profile: no taps");
    require(profile.tap_delays_ns.size() == profile.tap_powers_db.size(),
            "channel_profile: tap_delays_ns and tap_powers_db differ in length");
    require(profile.sample_period > 0.0, "channel_profile: sample_period must be positive");
    for (std::size_t i = 0; i < profile.tap_delays_ns.size(); ++i) {
        require(std::isfinite(profile.tap_delays_ns[i]) && profile.tap_delays_ns[i] >= 0.0,
                "channel_profile: delays must be non-negative");
        require(std::isfinite(profile.tap_powers_db[i]), "channel_profile: powers must be finite");
        if (i > 0)
            require(profile.tap_delays_ns[i] > profile.tap_delays_ns[i - 1],
                    "channel_profile: delays must be strictly increasing");
    }
}

/// Channel impulse response for one (device, antenna) link.
struct Cir {
    ComplexSequence taps;

    std::size_t size() const { return taps.size(); }
};

/// Profile folded onto the sample grid: expected power per bin, normalized to
/// unit total. Taps sharing a bin add in power.
class BinnedProfile {
public:
    BinnedProfile(const ChannelProfile& profile, int max_length)
    {
        validate(profile);
        std::vector<double> linear(profile.tap_powers_db.size());
        std::transform(profile.tap_powers_db.begin(), profile.tap_powers_db.end(), linear.begin(),
                       [](double db) { return std::pow(10.0, db / 10.0); });
        const double total = std::accumulate(linear.begin(), linear.end(), 0.0);

        std::vector<std::size_t> bins(linear.size());
        for (std::size_t i = 0; i < linear.size(); ++i) {
            const double pos = profile.tap_delays_ns[i] * 1e-9 / profile.sample_period;
            bins[i] = static_cast<std::size_t>(std::llround(pos));
            require(static_cast<long long>(bins[i]) < max_length,
                    "channel_profile: tap delay " + std::to_string(profile.tap_delays_ns[i]) +
                        " ns maps to bin " + std::to_string(bins[i]) + " >= N_cs " +
                        std::to_string(max_length));
        }
        powers_.assign(*std::max_element(bins.begin(), bins.end()) + 1, 0.0);
        for (std::size_t i = 0; i < linear.size(); ++i)
            powers_[bins[i]] += linear[i] / total;
    }

    std::span<const double> bin_powers() const { return powers_; }
    std::size_t length() const { return powers_.size(); }

    Cir draw(RandomStream& rng) const
    {
        Cir h;
        h.taps.resize(powers_.size());
        // Empty bins still consume draws so the stream position is layout-independent.
        for (std::size_t l = 0; l < powers_.size(); ++l)
            h.taps[l] = complex_gaussian(rng, powers_[l]);
        return h;
    }

private:
    std::vector<double> powers_;
};

inline Cir draw_cir(const ChannelProfile& profile, int max_length, RandomStream& rng)
{
    return BinnedProfile(profile, max_length).draw(rng);
}

/// sqrt(beta) * (x circularly convolved with h)
inline ComplexSequence apply_channel(std::span<const cplx> x, const Cir& h, double beta)
{
    require(beta >= 0.0, "apply_channel: beta must be non-negative");
    require(h.size() <= x.size(), "apply_channel: CIR longer than signal");
    auto out = circular_convolution(x, h.taps);
    const double amp = std::sqrt(beta);
    for (auto& v : out)
        v *= amp;
    return out;
}

inline void add_awgn_inplace(std::span<cplx> x, double sigma2, RandomStream& rng)
{
    require(sigma2 >= 0.0, "add_awgn: sigma2 must be non-negative");
    if (sigma2 == 0.0)
        return;
    for (auto& v : x)
        v += complex_gaussian(rng, sigma2);
}

inline ComplexSequence add_awgn(std::span<const cplx> x, double sigma2, RandomStream& rng)
{
    ComplexSequence out(x.begin(), x.end());
    add_awgn_inplace(out, sigma2, rng);
    return out;
}

/// H[f] = sum_l h[l] exp(-j 2 pi f l / N_sc)
inline ComplexSequence frequency_response(std::span<const cplx> taps, int n_sc)
{
    require(n_sc >= 1, "frequency_response: N_sc must be positive");
    require(taps.size() <= static_cast<std::size_t>(n_sc), "frequency_response: CIR longer than N_sc");
    ComplexSequence padded(static_cast<std::size_t>(n_sc));
    std::copy(taps.begin(), taps.end(), padded.begin());
    return fft::forward(padded);
}

inline ComplexSequence frequency_response(const Cir& h, int n_sc)
{
    return frequency_response(h.taps, n_sc);
}

}  // namespace spt
