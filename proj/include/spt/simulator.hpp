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

// Monte Carlo engine. Every trial is a pure function of (seed, trial index):
// all randomness comes from streams derived from that pair, so results do
// not depend on how trials are spread over worker threads.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spt/analysis.hpp"
#include "spt/channel.hpp"
#include "spt/decoder.hpp"
#include "spt/detector.hpp"
#include "spt/random.hpp"
#include "spt/uplink.hpp"

namespace spt {

/// Leading entries of the LTE logical root sequence order for 839-length
/// preambles; used when a scenario gives K without an explicit root list.
inline constexpr std::array<int, 16> kDefaultRoots = {129, 710, 140, 699, 120, 719, 210, 629,
                                                       168, 671, 84,  755, 105, 734, 93,  746};

inline std::vector<int> default_roots(int k)
{
    require(k >= 1, "K must be >= 1");
    require(k <= static_cast<int>(kDefaultRoots.size()),
            "K=" + std::to_string(k) + " exceeds the built-in root table; give roots explicitly");
    return {kDefaultRoots.begin(), kDefaultRoots.begin() + k};
}

struct ScenarioConfig {
    int M = 8;
    int N_I = 4;
    int K = 1;
    std::vector<int> roots;  // empty: default_roots(K)
    int N_P = 64;
    int N_cs = 13;
    int N_zc = 839;
    int N_sc = 839;
    double snr_db = 23.0;
    DetectorMode detector_mode = DetectorMode::genie;
    int pic_iterations = 3;
    double threshold_factor = 10.0;
    long long trials = 1000;
    std::uint64_t seed = 1;
    ChannelProfile channel_profile = pedestrian_b();

    std::vector<int> effective_roots() const { return roots.empty() ? default_roots(K) : roots; }
    double beta() const { return std::pow(10.0, snr_db / 10.0); }
    static constexpr double sigma2() { return 1.0; }
};

/// Throws InvalidParameter naming the offending key.
inline void validate(const ScenarioConfig& c)
{
    auto key = [](const char* k, bool ok, const std::string& what) {
        if (!ok)
            throw InvalidParameter(std::string(k) + ": " + what);
    };
    key("M", c.M >= 1, "must be >= 1");
    key("N_I", c.N_I >= 0, "must be >= 0");
    key("K", c.K >= 1, "must be >= 1");
    key("N_zc", is_prime(c.N_zc), std::to_string(c.N_zc) + " is not prime");
    key("N_cs", c.N_cs >= 1, "must be >= 1");
    key("N_P", c.N_P >= 1, "must be >= 1");
    key("N_P", static_cast<long long>(c.N_P) * c.N_cs < c.N_zc,
        "N_P*N_cs = " + std::to_string(static_cast<long long>(c.N_P) * c.N_cs) + " must be < N_zc = " +
            std::to_string(c.N_zc));
    key("N_sc", c.N_sc >= c.N_cs, "must be >= N_cs");
    key("snr_db", std::isfinite(c.snr_db), "must be finite");
    key("pic_iterations", c.pic_iterations >= 1, "must be >= 1");
    key("threshold_factor", c.threshold_factor > 0.0 && std::isfinite(c.threshold_factor), "must be positive");
    key("trials", c.trials >= 1, "must be >= 1");
    if (c.roots.empty()) {
        key("K", c.K <= static_cast<int>(kDefaultRoots.size()),
            "exceeds the built-in root table; give roots explicitly");
    } else {
        key("roots", static_cast<int>(c.roots.size()) == c.K, "length must equal K");
        auto sorted = c.roots;
        std::sort(sorted.begin(), sorted.end());
        key("roots", std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "must be distinct");
        for (int r : c.roots)
            key("roots", r >= 1 && r < c.N_zc, "root " + std::to_string(r) + " outside 1..N_zc-1");
    }
    try {
        BinnedProfile(c.channel_profile, c.N_cs);
    } catch (const InvalidParameter& e) {
        throw InvalidParameter(std::string("channel_profile: ") + e.what());
    }
}

struct DeviceOutcome {
    PreambleId preamble;
    bool collided = false;
    bool detected = false;
    bool decoded = false;  // a ZF stream was attributed to this device
    long long bit_errors = 0;
    bool success = false;
    std::vector<double> mse_per_antenna;  // empty unless detected and not collided

    friend bool operator==(const DeviceOutcome&, const DeviceOutcome&) = default;
};

struct TrialOutcome {
    std::vector<DeviceOutcome> devices;
    bool any_collision = false;
    bool all_detected = true;
    bool decode_failed = false;
    int detections = 0;

    friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

/// Scenario-invariant state shared by all trials of one configuration.
class TrialRunner {
public:
    explicit TrialRunner(ScenarioConfig config)
        : config_((validate(config), std::move(config))),
          roots_(config_.effective_roots()),
          bank_(roots_, config_.N_zc),
          profile_(config_.channel_profile, config_.N_cs)
    {
        settings_.roots = roots_;
        settings_.n_zc = config_.N_zc;
        settings_.n_cs = config_.N_cs;
        settings_.n_p = config_.N_P;
        settings_.mode = config_.detector_mode;
        settings_.iterations = config_.pic_iterations;
        settings_.beta = config_.beta();
        settings_.threshold_factor = config_.threshold_factor;
    }

    const ScenarioConfig& config() const { return config_; }

    TrialOutcome run(std::uint64_t trial_index) const
    {
        const auto& c = config_;
        const double beta = c.beta();
        const double sigma2 = ScenarioConfig::sigma2();

        auto preamble_rng = derive_stream(c.seed, trial_index, "preamble");
        auto channel_rng = derive_stream(c.seed, trial_index, "channel");
        auto payload_rng = derive_stream(c.seed, trial_index, "payload");
        auto prach_noise = derive_stream(c.seed, trial_index, "noise_prach");
        auto spt_noise = derive_stream(c.seed, trial_index, "noise_spt");

        // Device draws: preambles, then per device its CIRs and payload.
        const auto ids = select_preambles(c.N_I, roots_, c.N_P, preamble_rng);
        std::vector<DeviceRealization> devices(ids.size());
        std::uniform_int_distribution<int> bit(0, 1);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            devices[i].preamble = ids[i];
            devices[i].cirs.reserve(static_cast<std::size_t>(c.M));
            for (int m = 0; m < c.M; ++m)
                devices[i].cirs.push_back(profile_.draw(channel_rng));
            devices[i].payload.resize(static_cast<std::size_t>(c.N_sc));
            for (auto& b : devices[i].payload)
                b = static_cast<std::uint8_t>(bit(payload_rng));
        }

        // One CIR per (device, antenna) serves both PRACH and PUSCH-SPT.
        const auto prach = compose_prach(devices, c.M, beta, sigma2, c.N_cs, c.N_zc, prach_noise);
        const auto spt = compose_spt(devices, c.M, beta, sigma2, c.N_sc, spt_noise);

        const auto detections = estimate_channels(bank_, prach, settings_, std::span<const PreambleId>(ids));

        TrialOutcome out;
        out.detections = static_cast<int>(detections.size());
        std::map<PreambleId, int> multiplicity;
        for (const auto& id : ids)
            ++multiplicity[id];
        std::map<PreambleId, std::size_t> detection_index;
        for (std::size_t d = 0; d < detections.size(); ++d)
            detection_index[detections[d].id] = d;

        ZfResult zf;
        if (!detections.empty())
            zf = zf_decode(spt, detections, beta, c.N_sc);
        // N_I streams cannot be separated by fewer antennas regardless of
        // how many distinct preambles reached the receiver.
        out.decode_failed = detections.empty() || zf.failed || c.N_I > c.M;

        out.devices.resize(devices.size());
        for (std::size_t i = 0; i < devices.size(); ++i) {
            auto& d = out.devices[i];
            const auto& dev = devices[i];
            d.preamble = dev.preamble;
            d.collided = multiplicity[dev.preamble] > 1;
            out.any_collision = out.any_collision || d.collided;
            const auto it = detection_index.find(dev.preamble);
            d.detected = it != detection_index.end();
            out.all_detected = out.all_detected && d.detected;
            if (!d.detected || d.collided)
                continue;
            const auto& det = detections[it->second];
            d.mse_per_antenna.reserve(dev.cirs.size());
            for (std::size_t m = 0; m < dev.cirs.size(); ++m)
                d.mse_per_antenna.push_back(mse(dev.cirs[m].taps, det.cir_estimates[m]));
            if (out.decode_failed)
                continue;
            d.decoded = true;
            d.bit_errors = bit_errors(dev.payload, zf.bits[it->second]);
            d.success = d.bit_errors == 0;
        }
        return out;
    }

private:
    ScenarioConfig config_;
    std::vector<int> roots_;
    RootBank bank_;
    BinnedProfile profile_;
    DetectorSettings settings_;
};

inline TrialOutcome run_trial(const ScenarioConfig& config, std::uint64_t trial_index)
{
    return TrialRunner(config).run(trial_index);
}

/// Per-trial reduction. Integer fields plus per-trial means, combined in
/// trial order so the floating-point sums are schedule independent.
struct TrialSummary {
    int devices = 0;
    int collided = 0;
    int successes = 0;
    int mse_devices = 0;
    double mse_mean = 0.0;  // over non-collided detected devices, antennas, bins
    bool ber_eligible = false;
    long long bit_errors = 0;
    long long bits = 0;
};

inline TrialSummary summarize(const TrialOutcome& t, int n_sc)
{
    TrialSummary s;
    s.devices = static_cast<int>(t.devices.size());
    double mse_sum = 0.0;
    for (const auto& d : t.devices) {
        s.collided += d.collided ? 1 : 0;
        s.successes += d.success ? 1 : 0;
        if (!d.mse_per_antenna.empty()) {
            double acc = 0.0;
            for (double v : d.mse_per_antenna)
                acc += v;
            mse_sum += acc / static_cast<double>(d.mse_per_antenna.size());
            ++s.mse_devices;
        }
    }
    if (s.mse_devices > 0)
        s.mse_mean = mse_sum / s.mse_devices;
    // Reliability is measured on collision-free, fully detected, decodable slots.
    s.ber_eligible = s.devices > 0 && !t.any_collision && t.all_detected && !t.decode_failed;
    if (s.ber_eligible) {
        for (const auto& d : t.devices)
            s.bit_errors += d.bit_errors;
        s.bits = static_cast<long long>(s.devices) * n_sc;
    }
    return s;
}

/// Mergeable accumulator over trial summaries.
struct CampaignAccumulator {
    long long trials = 0;
    long long devices = 0;
    long long collided = 0;
    long long successes = 0;
    long long mse_trials = 0;
    double mse_sum = 0.0;
    double mse_sum_sq = 0.0;
    long long ber_trials = 0;
    long long bit_errors = 0;
    long long bits = 0;
    double ber_sum = 0.0;
    double ber_sum_sq = 0.0;

    void add(const TrialSummary& s)
    {
        ++trials;
        devices += s.devices;
        collided += s.collided;
        successes += s.successes;
        if (s.mse_devices > 0) {
            ++mse_trials;
            mse_sum += s.mse_mean;
            mse_sum_sq += s.mse_mean * s.mse_mean;
        }
        if (s.ber_eligible) {
            ++ber_trials;
            bit_errors += s.bit_errors;
            bits += s.bits;
            const double b = static_cast<double>(s.bit_errors) / static_cast<double>(s.bits);
            ber_sum += b;
            ber_sum_sq += b * b;
        }
    }

    void merge(const CampaignAccumulator& o)
    {
        trials += o.trials;
        devices += o.devices;
        collided += o.collided;
        successes += o.successes;
        mse_trials += o.mse_trials;
        mse_sum += o.mse_sum;
        mse_sum_sq += o.mse_sum_sq;
        ber_trials += o.ber_trials;
        bit_errors += o.bit_errors;
        bits += o.bits;
        ber_sum += o.ber_sum;
        ber_sum_sq += o.ber_sum_sq;
    }
};

/// Metric set in output order: mse, ber, p_c_emp, p_c_ana, p_s_emp, p_s_ana.
/// A metric with no eligible samples is omitted.
inline std::vector<MetricEstimate> finalize(const CampaignAccumulator& acc, const ScenarioConfig& c)
{
    std::vector<MetricEstimate> out;
    if (acc.mse_trials > 0)
        out.push_back(mean_estimate("mse", acc.mse_sum, acc.mse_sum_sq, acc.mse_trials));

    std::optional<double> p_b;
    if (acc.ber_trials > 0) {
        // Every eligible trial carries N_I * N_sc bits, so the mean of per-trial
        // rates equals the pooled rate; the spread is taken across trials.
        auto e = mean_estimate("ber", acc.ber_sum, acc.ber_sum_sq, acc.ber_trials);
        e.value = static_cast<double>(acc.bit_errors) / static_cast<double>(acc.bits);
        e.count = acc.bits;
        p_b = e.value;
        out.push_back(e);
    }
    if (acc.devices > 0) {
        out.push_back(proportion_estimate("p_c_emp", acc.collided, acc.devices));
        out.push_back({"p_c_ana", analytical_collision_prob(c.K, c.N_P, c.N_I), acc.devices, 0.0});
        out.push_back(proportion_estimate("p_s_emp", acc.successes, acc.devices));
        out.push_back({"p_s_ana", success_prob(out[out.size() - 2].value, p_b.value_or(0.0), c.N_I, c.M), acc.devices,
                       0.0});
    }
    return out;
}

struct ScenarioResult {
    ScenarioConfig config;
    std::vector<MetricEstimate> metrics;

    const MetricEstimate* find(std::string_view name) const
    {
        for (const auto& m : metrics)
            if (m.name == name)
                return &m;
        return nullptr;
    }
};

inline unsigned resolve_threads(unsigned threads)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    return threads;
}

/// Runs all trials of one scenario and reduces them in trial order.
inline ScenarioResult run_scenario(const ScenarioConfig& config, unsigned threads = 0)
{
    const TrialRunner runner(config);
    const auto n = static_cast<std::size_t>(config.trials);
    std::vector<TrialSummary> summaries(n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < n; i = next++)
                summaries[i] = summarize(runner.run(i), config.N_sc);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error)
                error = std::current_exception();
            next = n;
        }
    };

    const unsigned count = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t)
            pool.emplace_back(worker);
    }
    if (error)
        std::rethrow_exception(error);

    CampaignAccumulator acc;
    for (const auto& s : summaries)
        acc.add(s);
    return {config, finalize(acc, config)};
}

/// Validates the whole grid before any trial runs; output order follows input.
inline std::vector<ScenarioResult> run_campaign(const std::vector<ScenarioConfig>& grid, unsigned threads = 0)
{
    require(!grid.empty(), "run_campaign: empty scenario grid");
    for (const auto& c : grid)
        validate(c);
    std::vector<ScenarioResult> out;
    out.reserve(grid.size());
    for (const auto& c : grid)
        out.push_back(run_scenario(c, threads));
    return out;
}

}  // namespace spt
