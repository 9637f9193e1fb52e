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

// Scenario configuration files: a flat JSON object whose keys are
// ScenarioConfig field names. A list value sweeps that key; several lists
// expand to their Cartesian product. Missing keys keep the defaults.
//
//   {"M": 8, "N_I": [1, 2], "K": [1, 5], "snr_db": 23, "trials": 20000}
//
// `roots` is itself a list, so sweeping it takes a list of lists.
// `channel_profile` is {"tap_delays_ns": [...], "tap_powers_db": [...]}.

#include <json.hpp>

#include <array>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spt/simulator.hpp"

namespace spt {

class ConfigError : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

namespace detail {

inline int line_of_key(std::string_view text, std::string_view key)
{
    const std::string quoted = "\"" + std::string(key) + "\"";
    const auto pos = text.find(quoted);
    if (pos == std::string_view::npos)
        return 0;
    int line = 1;
    for (std::size_t i = 0; i < pos; ++i)
        line += text[i] == '\n' ? 1 : 0;
    return line;
}

[[noreturn]] inline void config_fail(std::string_view text, std::string_view key, const std::string& what)
{
    const int line = line_of_key(text, key);
    std::string msg = "config key '" + std::string(key) + "'";
    if (line > 0)
        msg += " (line " + std::to_string(line) + ")";
    throw ConfigError(msg + ": " + what);
}

using Setter = std::function<void(ScenarioConfig&, const nlohmann::json&)>;

struct KeySpec {
    std::string_view name;
    bool value_is_list;  // a plain list is one value, a list of lists is a sweep
    Setter set;
};

template <typename T>
T get_integer(const nlohmann::json& v)
{
    if (!v.is_number_integer())
        throw std::invalid_argument("expected an integer, got " + std::string(v.type_name()));
    if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned())
            throw std::invalid_argument("expected a non-negative integer");
    }
    return v.get<T>();
}

inline double get_number(const nlohmann::json& v)
{
    if (!v.is_number())
        throw std::invalid_argument("expected a number, got " + std::string(v.type_name()));
    return v.get<double>();
}

inline const std::vector<KeySpec>& key_specs()
{
    using nlohmann::json;
    static const std::vector<KeySpec> specs = {
        {"M", false, [](ScenarioConfig& c, const json& v) { c.M = get_integer<int>(v); }},
        {"N_I", false, [](ScenarioConfig& c, const json& v) { c.N_I = get_integer<int>(v); }},
        {"K", false, [](ScenarioConfig& c, const json& v) { c.K = get_integer<int>(v); }},
        {"roots", true,
         [](ScenarioConfig& c, const json& v) {
             if (!v.is_array())
                 throw std::invalid_argument("expected a list of root indices");
             c.roots.clear();
             for (const auto& r : v)
                 c.roots.push_back(get_integer<int>(r));
         }},
        {"N_P", false, [](ScenarioConfig& c, const json& v) { c.N_P = get_integer<int>(v); }},
        {"N_cs", false, [](ScenarioConfig& c, const json& v) { c.N_cs = get_integer<int>(v); }},
        {"N_zc", false, [](ScenarioConfig& c, const json& v) { c.N_zc = get_integer<int>(v); }},
        {"N_sc", false, [](ScenarioConfig& c, const json& v) { c.N_sc = get_integer<int>(v); }},
        {"snr_db", false, [](ScenarioConfig& c, const json& v) { c.snr_db = get_number(v); }},
        {"detector_mode", false,
         [](ScenarioConfig& c, const json& v) {
             if (!v.is_string())
                 throw std::invalid_argument("expected \"genie\" or \"blind\"");
             const auto s = v.get<std::string>();
             if (s == "genie")
                 c.detector_mode = DetectorMode::genie;
             else if (s == "blind")
                 c.detector_mode = DetectorMode::blind;
             else
                 throw std::invalid_argument("expected \"genie\" or \"blind\", got \"" + s + "\"");
         }},
        {"pic_iterations", false, [](ScenarioConfig& c, const json& v) { c.pic_iterations = get_integer<int>(v); }},
        {"threshold_factor", false, [](ScenarioConfig& c, const json& v) { c.threshold_factor = get_number(v); }},
        {"trials", false, [](ScenarioConfig& c, const json& v) { c.trials = get_integer<long long>(v); }},
        {"seed", false, [](ScenarioConfig& c, const json& v) { c.seed = get_integer<std::uint64_t>(v); }},
        {"channel_profile", false,
         [](ScenarioConfig& c, const json& v) {
             if (!v.is_object())
                 throw std::invalid_argument("expected an object with tap_delays_ns and tap_powers_db");
             ChannelProfile p = pedestrian_b();
             p.tap_delays_ns.clear();
             p.tap_powers_db.clear();
             for (const auto& [k, val] : v.items()) {
                 if (k != "tap_delays_ns" && k != "tap_powers_db" && k != "sample_period")
                     throw std::invalid_argument("unknown channel_profile field '" + k + "'");
             }
             if (!v.contains("tap_delays_ns") || !v.contains("tap_powers_db"))
                 throw std::invalid_argument("tap_delays_ns and tap_powers_db are required");
             for (const auto& d : v.at("tap_delays_ns"))
                 p.tap_delays_ns.push_back(get_number(d));
             for (const auto& d : v.at("tap_powers_db"))
                 p.tap_powers_db.push_back(get_number(d));
             if (v.contains("sample_period"))
                 p.sample_period = get_number(v.at("sample_period"));
             c.channel_profile = std::move(p);
         }},
    };
    return specs;
}

inline bool is_sweep(const KeySpec& spec, const nlohmann::json& v)
{
    if (!v.is_array())
        return false;
    if (!spec.value_is_list)
        return true;
    return !v.empty() && v.front().is_array();
}

}  // namespace detail

/// Parses configuration text into the expanded scenario list. Every
/// scenario is validated; errors cite the key and its line.
inline std::vector<ScenarioConfig> parse_config(std::string_view text, const ScenarioConfig& base = {})
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: JSON syntax error: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config: top level must be a JSON object");

    const auto& specs = detail::key_specs();
    for (const auto& [key, value] : doc.items()) {
        const bool known = std::any_of(specs.begin(), specs.end(), [&](const auto& s) { return s.name == key; });
        if (!known)
            detail::config_fail(text, key, "unknown key");
    }

    std::vector<ScenarioConfig> grid{base};
    for (const auto& spec : specs) {
        if (!doc.contains(std::string(spec.name)))
            continue;
        const auto& value = doc.at(std::string(spec.name));
        std::vector<nlohmann::json> options;
        if (detail::is_sweep(spec, value)) {
            if (value.empty())
                detail::config_fail(text, spec.name, "empty sweep list");
            options.assign(value.begin(), value.end());
        } else {
            options.push_back(value);
        }
        std::vector<ScenarioConfig> next;
        next.reserve(grid.size() * options.size());
        for (const auto& cfg : grid) {
            for (const auto& opt : options) {
                auto c = cfg;
                try {
                    spec.set(c, opt);
                } catch (const std::exception& e) {
                    detail::config_fail(text, spec.name, e.what());
                }
                next.push_back(std::move(c));
            }
        }
        grid = std::move(next);
    }

    for (const auto& c : grid) {
        try {
            validate(c);
        } catch (const InvalidParameter& e) {
            const std::string msg = e.what();
            const auto colon = msg.find(':');
            const std::string key = colon == std::string::npos ? "config" : msg.substr(0, colon);
            detail::config_fail(text, key, colon == std::string::npos ? msg : msg.substr(colon + 2));
        }
    }
    return grid;
}

inline std::vector<ScenarioConfig> load_config(const std::string& path, const ScenarioConfig& base = {})
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

}  // namespace spt
