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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "spt/simulator.hpp"

namespace spt {

inline constexpr std::string_view kCsvHeader = "M,N_I,K,snr_db,mode,trials,seed,metric,value,ci,count";

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

/// One row per (scenario, metric). A non-empty `metrics` keeps only the
/// named metrics, in result order.
inline std::string to_csv(std::span<const ScenarioResult> results, std::span<const std::string_view> metrics = {})
{
    std::string out(kCsvHeader);
    out += "\r\n";
    for (const auto& r : results) {
        const auto& c = r.config;
        const std::string key = std::to_string(c.M) + "," + std::to_string(c.N_I) + "," + std::to_string(c.K) + "," +
                                format_double(c.snr_db) + "," + to_string(c.detector_mode) + "," +
                                std::to_string(c.trials) + "," + std::to_string(c.seed) + ",";
        for (const auto& m : r.metrics) {
            if (!metrics.empty() && std::find(metrics.begin(), metrics.end(), m.name) == metrics.end())
                continue;
            out += key;
            out += m.name + "," + format_double(m.value) + "," + format_double(m.ci_halfwidth) + "," +
                   std::to_string(m.count) + "\r\n";
        }
    }
    return out;
}

/// Writes to a sibling temporary and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f)
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

}  // namespace spt
