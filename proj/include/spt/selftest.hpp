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

// Quick invariant checks behind `spt_sim selftest`. Each check is small
// enough that the whole suite finishes in a few seconds.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "spt/analysis.hpp"
#include "spt/decoder.hpp"
#include "spt/detector.hpp"
#include "spt/simulator.hpp"

namespace spt {

struct SelfTestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline SelfTestResult check_zc_autocorrelation()
{
    double worst = 0.0, peak_err = 0.0;
    for (int r : {1, 129, 710}) {
        const auto z = zc_sequence(r, 839);
        const auto c = circular_correlation(z, z);
        peak_err = std::max(peak_err, std::abs(c[0] - cplx(839.0, 0.0)));
        for (std::size_t a = 1; a < c.size(); ++a)
            worst = std::max(worst, std::abs(c[a]));
    }
    return {"zc_autocorrelation", worst <= 1e-9 * 839 && peak_err <= 1e-9,
            "max off-peak " + std::to_string(worst)};
}

inline SelfTestResult check_zc_crosscorrelation()
{
    const auto c = circular_correlation(zc_sequence(129, 839), zc_sequence(710, 839));
    double worst = 0.0;
    for (const auto& v : c)
        worst = std::max(worst, std::abs(std::abs(v) / std::sqrt(839.0) - 1.0));
    return {"zc_crosscorrelation", worst <= 1e-6, "max relative deviation " + std::to_string(worst)};
}

inline SelfTestResult check_noise_free_round_trip()
{
    const BinnedProfile profile(pedestrian_b(), 13);
    RandomStream rng(2024);
    std::vector<DeviceRealization> devs(3);
    for (int i = 0; i < 3; ++i) {
        devs[i].preamble = {129, 5 * i + 1};
        devs[i].cirs.push_back(profile.draw(rng));
    }
    const auto y = compose_prach(devs, 1, 2.0, 0.0, 13, 839, rng);
    DetectorSettings s;
    s.roots = {129};
    s.beta = 2.0;
    std::vector<PreambleId> ids;
    for (const auto& d : devs)
        ids.push_back(d.preamble);
    const auto est = estimate_channels(y, s, std::span<const PreambleId>(ids));
    double worst = 0.0;
    for (std::size_t i = 0; i < devs.size(); ++i) {
        const auto& h = devs[i].cirs[0].taps;
        for (std::size_t l = 0; l < 13; ++l) {
            const cplx t = l < h.size() ? h[l] : cplx{};
            worst = std::max(worst, std::abs(t - est[i].cir_estimates[0][l]));
        }
    }
    return {"noise_free_round_trip", worst <= 1e-10, "max tap error " + std::to_string(worst)};
}

inline SelfTestResult check_zf_perfect_csi()
{
    const BinnedProfile profile(pedestrian_b(), 13);
    RandomStream rng(7);
    const int m = 4, n_sc = 64;
    std::vector<DeviceRealization> devs(3);
    std::vector<DetectedPreamble> dets(3);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int i = 0; i < 3; ++i) {
        devs[i].preamble = dets[i].id = {129, i + 1};
        for (int a = 0; a < m; ++a) {
            devs[i].cirs.push_back(profile.draw(rng));
            auto w = devs[i].cirs.back().taps;
            w.resize(13);
            dets[i].cir_estimates.push_back(w);
        }
        devs[i].payload.resize(n_sc);
        for (auto& b : devs[i].payload)
            b = static_cast<std::uint8_t>(bit(rng));
    }
    const auto y = compose_spt(devs, m, 1.0, 0.0, n_sc, rng);
    const auto r = zf_decode(y, dets, 1.0, n_sc);
    bool ok = !r.failed;
    for (int i = 0; ok && i < 3; ++i)
        ok = r.bits[i] == devs[i].payload;
    return {"zf_perfect_csi", ok, ok ? "all payloads recovered" : "decoding mismatch"};
}

inline SelfTestResult check_formulas()
{
    const bool ok = std::abs(analytical_collision_prob(1, 64, 2) - 0.015625) < 1e-15 &&
                    std::abs(deterioration_threshold(1, 64) + 1.0 / std::log(63.0 / 64.0)) < 1e-9 && latency_total() == 6.0 &&
                    success_prob(0.5, 0.0, 9, 8) == 0.0;
    return {"closed_forms", ok, ok ? "collision, threshold, latency, overload" : "mismatch"};
}

inline SelfTestResult check_determinism()
{
    ScenarioConfig c;
    c.K = 5;
    c.N_I = 6;
    c.trials = 8;
    const TrialRunner runner(c);
    bool ok = true;
    for (std::uint64_t t = 0; t < 8; ++t)
        ok = ok && runner.run(t) == runner.run(t);
    const auto a = run_scenario(c, 1), b = run_scenario(c, 2);
    for (std::size_t i = 0; ok && i < a.metrics.size(); ++i)
        ok = a.metrics[i].value == b.metrics[i].value && a.metrics[i].ci_halfwidth == b.metrics[i].ci_halfwidth;
    return {"determinism", ok, ok ? "trial and thread-count invariant" : "results differ"};
}

}  // namespace detail

inline std::vector<SelfTestResult> run_selftest()
{
    const std::vector<std::function<SelfTestResult()>> checks = {
        detail::check_zc_autocorrelation, detail::check_zc_crosscorrelation, detail::check_noise_free_round_trip,
        detail::check_zf_perfect_csi,     detail::check_formulas,            detail::check_determinism,
    };
    std::vector<SelfTestResult> out;
    for (const auto& check : checks) {
        try {
            out.push_back(check());
        } catch (const std::exception& e) {
            out.push_back({"exception", false, e.what()});
        }
    }
    return out;
}

}  // namespace spt
