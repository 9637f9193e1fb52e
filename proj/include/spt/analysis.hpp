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

// Closed-form random-access formulas and the metric estimators used by
// the campaign aggregator.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>

#include "spt/types.hpp"

namespace spt {

/// Two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

struct MetricEstimate {
    std::string name;
    double value = 0.0;
    long long count = 0;
    double ci_halfwidth = 0.0;

    double lower() const { return value - ci_halfwidth; }
    double upper() const { return value + ci_halfwidth; }
    /// Standard error implied by the 95% half-width.
    double standard_error() const { return ci_halfwidth / kZ95; }
};

/// Per-bin channel-estimate error over the estimation window:
/// (1/N_cs) sum_l |h[l] - h_hat[l]|^2, h zero-padded to the window.
inline double mse(std::span<const cplx> h_true, std::span<const cplx> h_est)
{
    require(!h_est.empty(), "mse: empty estimate window");
    require(h_true.size() <= h_est.size(), "mse: true CIR longer than the estimation window");
    double acc = 0.0;
    for (std::size_t l = 0; l < h_est.size(); ++l) {
        const cplx t = l < h_true.size() ? h_true[l] : cplx{};
        acc += std::norm(t - h_est[l]);
    }
    return acc / static_cast<double>(h_est.size());
}

inline long long bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    require(tx.size() == rx.size(), "ber: length mismatch");
    long long errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i)
        errors += (tx[i] != rx[i]) ? 1 : 0;
    return errors;
}

inline double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    require(!tx.empty(), "ber: empty bit vectors");
    return static_cast<double>(bit_errors(tx, rx)) / static_cast<double>(tx.size());
}

/// p_c = 1 - (1 - 1/(K N_P))^(N_I - 1)
inline double analytical_collision_prob(int k_roots, int n_p, int n_devices)
{
    require(k_roots >= 1 && n_p >= 1, "collision_prob: K*N_P must be >= 1");
    require(n_devices >= 1, "collision_prob: N_I must be >= 1");
    const double q = 1.0 / (static_cast<double>(k_roots) * static_cast<double>(n_p));
    // 1 - exp((N_I-1) log1p(-q)) keeps precision when q is small.
    return -std::expm1(static_cast<double>(n_devices - 1) * std::log1p(-q));
}

/// (1 - p_c)(1 - p_b) when N_I <= M, otherwise 0.
inline double success_prob(double p_c, double p_b, int n_devices, int m_antennas)
{
    require(p_c >= 0.0 && p_c <= 1.0, "success_prob: p_c outside [0,1]");
    require(p_b >= 0.0 && p_b <= 1.0, "success_prob: p_b outside [0,1]");
    if (n_devices > m_antennas)
        return 0.0;
    return (1.0 - p_c) * (1.0 - p_b);
}

/// The high-reliability approximation 1 - p_c (same support condition).
inline double success_prob_approx(double p_c, int n_devices, int m_antennas)
{
    return n_devices > m_antennas ? 0.0 : 1.0 - p_c;
}

/// Devices contending per slot including backlog: N lambda T_P / (1 - p_c).
inline double offered_load(double population, double arrival_rate, double slot_period, double p_c)
{
    require(p_c < 1.0, "offered_load: p_c must be < 1");
    require(p_c >= 0.0, "offered_load: p_c must be >= 0");
    return population * arrival_rate * slot_period / (1.0 - p_c);
}

/// Load at which PRACH throughput starts to deteriorate: -1/ln(1 - 1/(K N_P)).
inline double deterioration_threshold(int k_roots, int n_p)
{
    require(static_cast<long long>(k_roots) * n_p >= 2, "deterioration_threshold: K*N_P must be >= 2");
    const double q = 1.0 / (static_cast<double>(k_roots) * static_cast<double>(n_p));
    return -1.0 / std::log1p(-q);
}

struct LatencyPhase {
    std::string_view phase;
    double milliseconds;
};

inline constexpr std::array<LatencyPhase, 4> latency_budget()
{
    return {{{"preamble transmission", 1.0},
             {"short-packet transmission", 1.0},
             {"eNodeB processing", 3.0},
             {"acknowledgement", 1.0}}};
}

inline double latency_total()
{
    double total = 0.0;
    for (const auto& p : latency_budget())
        total += p.milliseconds;
    return total;
}

/// Binomial proportion with a 95% normal-approximation half-width.
inline MetricEstimate proportion_estimate(std::string name, long long successes, long long trials)
{
    require(trials >= 1, "proportion_estimate: need at least one trial");
    require(successes >= 0 && successes <= trials, "proportion_estimate: successes outside [0, trials]");
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return {std::move(name), p, trials, half};
}

/// Mean of i.i.d. samples from running sum and sum of squares.
inline MetricEstimate mean_estimate(std::string name, double sum, double sum_sq, long long n)
{
    require(n >= 1, "mean_estimate: need at least one sample");
    const double dn = static_cast<double>(n);
    const double mean = sum / dn;
    double half = 0.0;
    if (n > 1) {
        const double var = std::max(0.0, (sum_sq - dn * mean * mean) / (dn - 1.0));
        half = kZ95 * std::sqrt(var / dn);
    }
    return {std::move(name), mean, n, half};
}

}  // namespace spt
