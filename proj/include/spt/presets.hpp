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

// Experiment grids behind the fig5, fig6 and fig7 presets.

#include <string>
#include <string_view>
#include <vector>

#include "spt/simulator.hpp"

namespace spt {

struct Preset {
    std::string name;
    std::vector<ScenarioConfig> grid;
    std::vector<std::string_view> metrics;
};

inline constexpr long long kFig5Trials = 20000;
inline constexpr long long kFig6Trials = 20000;
inline constexpr long long kFig7Trials = 100000;

/// MSE versus SNR for 1, 2, 4, 8 multiplexed devices, K in {1, 5}.
inline Preset preset_fig5(const ScenarioConfig& base)
{
    Preset p{"fig5", {}, {"mse"}};
    for (int k : {1, 5})
        for (int n : {1, 2, 4, 8})
            for (int snr = 5; snr <= 25; snr += 2) {
                auto c = base;
                c.M = 8;
                c.K = k;
                c.roots.clear();
                c.N_I = n;
                c.snr_db = snr;
                p.grid.push_back(c);
            }
    return p;
}

/// Collision probability and BER versus N_I at M = 8, 23 dB.
inline Preset preset_fig6(const ScenarioConfig& base)
{
    Preset p{"fig6", {}, {"p_c_emp", "p_c_ana", "ber"}};
    for (int k : {1, 5})
        for (int n = 1; n <= 8; ++n) {
            auto c = base;
            c.M = 8;
            c.K = k;
            c.roots.clear();
            c.N_I = n;
            c.snr_db = 23.0;
            p.grid.push_back(c);
        }
    return p;
}

/// Success probability versus N_I at 23 dB for M in {8, 16}.
inline Preset preset_fig7(const ScenarioConfig& base)
{
    Preset p{"fig7", {}, {"p_s_emp", "p_s_ana"}};
    for (int m : {8, 16})
        for (int k : {1, 5})
            for (int n = 1; n <= 8; ++n) {
                auto c = base;
                c.M = m;
                c.K = k;
                c.roots.clear();
                c.N_I = n;
                c.snr_db = 23.0;
                p.grid.push_back(c);
            }
    return p;
}

inline long long default_trials(std::string_view preset)
{
    return preset == "fig7" ? kFig7Trials : preset == "fig6" ? kFig6Trials : kFig5Trials;
}

/// Throws InvalidParameter for an unknown name.
inline Preset make_preset(std::string_view name, const ScenarioConfig& base)
{
    if (name == "fig5")
        return preset_fig5(base);
    if (name == "fig6")
        return preset_fig6(base);
    if (name == "fig7")
        return preset_fig7(base);
    throw InvalidParameter("preset: unknown name '" + std::string(name) + "' (expected fig5, fig6, fig7)");
}

}  // namespace spt
