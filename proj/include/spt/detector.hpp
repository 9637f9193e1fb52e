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

// Receiver-side PRACH processing.
//
// Correlating the antenna signal against a root z_k gives, for a device on
// that root with shift p and channel h, c[a] = sqrt(beta) N_zc h[p N_cs - a].
// Each shift therefore owns the N_cs-lag window ending at p N_cs, read out
// time-reversed. Devices on other roots leak a flat sqrt(N_zc)-level floor
// into every lag; separate_roots() removes it by iterative parallel
// interference cancellation: every round rebuilds each root's contribution
// from the current channel estimates and subtracts the other roots'
// reconstructions before re-estimating.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spt/fft.hpp"
#include "spt/sequences.hpp"
#include "spt/types.hpp"

namespace spt {

enum class DetectorMode { genie, blind };

inline std::string to_string(DetectorMode mode)
{
    return mode == DetectorMode::genie ? "genie" : "blind";
}

struct CorrelationProfile {
    ComplexSequence values;  // one entry per lag, length N_zc
    int root = 1;
    int antenna = 0;
};

struct DetectedPreamble {
    PreambleId id;
    std::vector<ComplexSequence> cir_estimates;  // per antenna, length N_cs each
    double peak_metric = 0.0;                    // antenna-combined window energy
};

struct DetectorSettings {
    std::vector<int> roots;
    int n_zc = 839;
    int n_cs = 13;
    int n_p = 64;
    DetectorMode mode = DetectorMode::genie;
    int iterations = 3;
    double beta = 1.0;
    double threshold_factor = 10.0;
};

inline void validate(const DetectorSettings& s)
{
    require(!s.roots.empty(), "detector: at least one root is required");
    require(is_prime(s.n_zc), "detector: N_zc must be prime");
    require(s.n_cs >= 1, "detector: N_cs must be >= 1");
    require(s.n_p >= 1 && static_cast<long long>(s.n_p) * s.n_cs < s.n_zc, "detector: N_P*N_cs must be < N_zc");
    require(s.iterations >= 1, "detector: iterations must be >= 1");
    require(s.beta > 0.0, "detector: beta must be positive");
    require(s.threshold_factor > 0.0, "detector: threshold_factor must be positive");
}

/// Root sequences and their conjugated spectra, computed once per scenario.
class RootBank {
public:
    RootBank(std::span<const int> roots, int n_zc) : n_zc_(n_zc)
    {
        for (int r : roots) {
            Entry e;
            e.sequence = zc_sequence(r, n_zc);
            e.spectrum_conj = fft::forward(e.sequence);
            for (auto& v : e.spectrum_conj)
                v = std::conj(v);
            entries_.emplace(r, std::move(e));
        }
        for (const auto& [from, ef] : entries_)
            for (const auto& [to, et] : entries_)
                if (from != to)
                    cross_.emplace(std::pair{from, to}, correlate_with_spectrum(fft::forward(ef.sequence), et.spectrum_conj));
    }

    int n_zc() const { return n_zc_; }

    const ComplexSequence& sequence(int root) const { return entry(root).sequence; }

    /// Circular correlation of y against z_root.
    ComplexSequence correlate(std::span<const cplx> y, int root) const
    {
        require(y.size() == static_cast<std::size_t>(n_zc_), "correlate_root: signal length != N_zc");
        const auto spectrum = fft::forward(y);
        return correlate_with_spectrum(spectrum, entry(root).spectrum_conj);
    }

    /// Same as correlate() for a signal given by its forward DFT.
    ComplexSequence correlate_spectrum(std::span<const cplx> y_spectrum, int root) const
    {
        return correlate_with_spectrum(y_spectrum, entry(root).spectrum_conj);
    }

    /// Circular correlation of z_from against z_to (distinct roots).
    const ComplexSequence& cross(int from, int to) const
    {
        auto it = cross_.find({from, to});
        require(it != cross_.end(), "detector: no cross-correlation for roots " + std::to_string(from) + ", " +
                                        std::to_string(to));
        return it->second;
    }

private:
    struct Entry {
        ComplexSequence sequence;
        ComplexSequence spectrum_conj;
    };

    const Entry& entry(int root) const
    {
        auto it = entries_.find(root);
        require(it != entries_.end(), "detector: root " + std::to_string(root) + " not configured");
        return it->second;
    }

    int n_zc_;
    std::map<int, Entry> entries_;
    std::map<std::pair<int, int>, ComplexSequence> cross_;
};

inline CorrelationProfile correlate_root(std::span<const cplx> y, int root, int n_zc, int antenna = 0)
{
    require(y.size() == static_cast<std::size_t>(n_zc), "correlate_root: signal length != N_zc");
    const auto z = zc_sequence(root, n_zc);
    return {circular_correlation(y, z), root, antenna};
}

/// h_hat[l] = c[(p N_cs - l) mod N_zc] / N_zc, l = 0..N_cs-1
inline ComplexSequence extract_cir(const CorrelationProfile& profile, int shift, int n_cs)
{
    const auto n = static_cast<long long>(profile.values.size());
    require(n > 0, "extract_cir: empty profile");
    require(shift >= 1 && n_cs >= 1 && static_cast<long long>(shift) * n_cs < n,
            "extract_cir: window outside correlation profile");
    ComplexSequence window(static_cast<std::size_t>(n_cs));
    const long long end = static_cast<long long>(shift) * n_cs;
    for (int l = 0; l < n_cs; ++l) {
        const long long lag = ((end - l) % n + n) % n;
        window[static_cast<std::size_t>(l)] = profile.values[static_cast<std::size_t>(lag)] / static_cast<double>(n);
    }
    return window;
}

/// Antenna-combined energy of the window owned by `shift`.
inline double window_energy(std::span<const CorrelationProfile> profiles, int shift, int n_cs)
{
    double e = 0.0;
    for (const auto& prof : profiles) {
        const auto n = static_cast<long long>(prof.values.size());
        const long long end = static_cast<long long>(shift) * n_cs;
        for (int l = 0; l < n_cs; ++l)
            e += std::norm(prof.values[static_cast<std::size_t>(((end - l) % n + n) % n)]);
    }
    return e;
}

/// Shifts whose window energy exceeds threshold_factor times the median
/// window energy over all N_P shifts.
inline std::vector<int> detect_active(std::span<const CorrelationProfile> profiles, double threshold_factor,
                                      int n_cs, int n_p)
{
    require(!profiles.empty(), "detect_active: no antenna profiles");
    require(threshold_factor > 0.0, "detect_active: threshold_factor must be positive");
    require(n_p >= 1, "detect_active: N_P must be >= 1");

    std::vector<double> energy(static_cast<std::size_t>(n_p));
    for (int p = 1; p <= n_p; ++p)
        energy[static_cast<std::size_t>(p - 1)] = window_energy(profiles, p, n_cs);

    auto sorted = energy;
    const auto mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
    double median = sorted[mid];
    if (sorted.size() % 2 == 0) {
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + lower);
    }

    std::vector<int> active;
    for (int p = 1; p <= n_p; ++p)
        if (energy[static_cast<std::size_t>(p - 1)] > threshold_factor * median)
            active.push_back(p);
    return active;
}

namespace detail {

inline ComplexSequence reconstruct_with(std::span<const DetectedPreamble> detections, std::size_t antenna,
                                        double beta, int n_cs, std::span<const cplx> root_sequence)
{
    const int n_zc = static_cast<int>(root_sequence.size());
    ComplexSequence out(root_sequence.size());
    if (detections.empty())
        return out;
    const int root = detections.front().id.root;
    const double amp = std::sqrt(beta);
    for (const auto& d : detections) {
        require(d.id.root == root, "reconstruct_root_signal: detections span several roots");
        require(antenna < d.cir_estimates.size(), "reconstruct_root_signal: antenna out of range");
        check_preamble(d.id, n_cs, n_zc);
        const auto x = rotate_left(root_sequence, static_cast<std::size_t>(d.id.shift) * static_cast<std::size_t>(n_cs));
        const auto rx = circular_convolution(x, d.cir_estimates[antenna]);
        for (std::size_t n = 0; n < out.size(); ++n)
            out[n] += amp * rx[n];
    }
    return out;
}

}  // namespace detail

/// sum_d sqrt(beta) (x_d circularly convolved with h_hat_d) at one antenna.
/// All detections must belong to one root.
inline ComplexSequence reconstruct_root_signal(std::span<const DetectedPreamble> detections, std::size_t antenna,
                                               double beta, int n_cs, int n_zc)
{
    if (detections.empty())
        return ComplexSequence(static_cast<std::size_t>(n_zc));
    const auto z = zc_sequence(detections.front().id.root, n_zc);
    return detail::reconstruct_with(detections, antenna, beta, n_cs, z);
}

namespace detail {

/// Shifts of `root` named in the genie list, deduplicated and sorted.
inline std::vector<int> genie_shifts(std::span<const PreambleId> genie, int root)
{
    std::vector<int> shifts;
    for (const auto& id : genie)
        if (id.root == root)
            shifts.push_back(id.shift);
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
    return shifts;
}

/// Decide activity from one root's per-antenna profiles and read out the
/// channel estimates in channel units (divided by sqrt(beta)).
inline std::vector<DetectedPreamble> estimate_from_profiles(std::span<const CorrelationProfile> profiles, int root,
                                                            const DetectorSettings& s,
                                                            std::span<const PreambleId> genie)
{
    const auto shifts = s.mode == DetectorMode::genie ? genie_shifts(genie, root)
                                                      : detect_active(profiles, s.threshold_factor, s.n_cs, s.n_p);
    const double inv_amp = 1.0 / std::sqrt(s.beta);
    std::vector<DetectedPreamble> out;
    out.reserve(shifts.size());
    for (int p : shifts) {
        DetectedPreamble d;
        d.id = {root, p};
        d.peak_metric = window_energy(profiles, p, s.n_cs);
        d.cir_estimates.reserve(profiles.size());
        for (const auto& prof : profiles) {
            auto w = extract_cir(prof, p, s.n_cs);
            for (auto& v : w)
                v *= inv_amp;
            d.cir_estimates.push_back(std::move(w));
        }
        out.push_back(std::move(d));
    }
    return out;
}

inline std::vector<DetectedPreamble> estimate_root(const RootBank& bank, std::span<const ComplexSequence> signal,
                                                   int root, const DetectorSettings& s,
                                                   std::span<const PreambleId> genie)
{
    std::vector<CorrelationProfile> profiles;
    profiles.reserve(signal.size());
    for (std::size_t m = 0; m < signal.size(); ++m)
        profiles.push_back({bank.correlate(signal[m], root), root, static_cast<int>(m)});
    return estimate_from_profiles(profiles, root, s, genie);
}

struct PicState {
    std::vector<std::vector<ComplexSequence>> separated;      // [root][antenna]
    std::vector<std::vector<ComplexSequence>> reconstruction;  // [root][antenna]
};

inline PicState run_pic(const RootBank& bank, std::span<const ComplexSequence> y, const DetectorSettings& s,
                        std::span<const PreambleId> genie)
{
    const std::size_t k_count = s.roots.size();
    const std::size_t m_count = y.size();
    PicState st;
    st.reconstruction.assign(k_count, std::vector<ComplexSequence>(m_count, ComplexSequence(static_cast<std::size_t>(s.n_zc))));

    auto residual_for = [&](std::size_t k) {
        std::vector<ComplexSequence> res(y.begin(), y.end());
        for (std::size_t kk = 0; kk < k_count; ++kk) {
            if (kk == k)
                continue;
            for (std::size_t m = 0; m < m_count; ++m)
                for (std::size_t n = 0; n < res[m].size(); ++n)
                    res[m][n] -= st.reconstruction[kk][m][n];
        }
        return res;
    };

    if (k_count > 1) {
        for (int it = 0; it < s.iterations; ++it) {
            std::vector<std::vector<ComplexSequence>> next(k_count);
            for (std::size_t k = 0; k < k_count; ++k) {
                const auto res = residual_for(k);
                const auto dets = estimate_root(bank, res, s.roots[k], s, genie);
                next[k].reserve(m_count);
                for (std::size_t m = 0; m < m_count; ++m)
                    next[k].push_back(reconstruct_with(dets, m, s.beta, s.n_cs, bank.sequence(s.roots[k])));
            }
            st.reconstruction = std::move(next);
        }
    }

    st.separated.reserve(k_count);
    for (std::size_t k = 0; k < k_count; ++k)
        st.separated.push_back(residual_for(k));
    return st;
}

}  // namespace detail

/// Splits the per-antenna signal into one stream per configured root:
/// y_hat_k = y - sum_{k' != k} recon_k'. With a single root, y is returned.
inline std::vector<std::vector<ComplexSequence>> separate_roots(std::span<const ComplexSequence> y,
                                                                const DetectorSettings& settings,
                                                                std::optional<std::span<const PreambleId>> genie = {})
{
    validate(settings);
    require(settings.mode != DetectorMode::genie || genie.has_value(),
            "separate_roots: genie mode requires the active preamble list");
    for (const auto& ym : y)
        require(ym.size() == static_cast<std::size_t>(settings.n_zc), "separate_roots: signal length != N_zc");
    const RootBank bank(settings.roots, settings.n_zc);
    return detail::run_pic(bank, y, settings, genie.value_or(std::span<const PreambleId>{})).separated;
}

namespace detail {

/// Correlation lags read by the windows of `shifts`, ascending.
inline std::vector<std::size_t> window_lags(std::span<const int> shifts, int n_cs)
{
    std::vector<std::size_t> lags;
    lags.reserve(shifts.size() * static_cast<std::size_t>(n_cs));
    for (int p : shifts)
        for (int l = n_cs - 1; l >= 0; --l)
            lags.push_back(static_cast<std::size_t>(p * n_cs - l));
    return lags;
}

/// Subtracts, at the given lags of root `root`'s profiles, the correlation
/// left by reconstructions of other roots' detections. Correlation is linear,
/// so for a detection on root r with shift p and taps h,
///   corr(recon, z_root)[a] = sqrt(beta) sum_l h[l] g[(a + l - p N_cs) mod N],
/// where g = corr(z_r, z_root). This equals subtracting the reconstructed
/// signals in the time domain and correlating again.
inline void cancel_cross_root(std::span<CorrelationProfile> profiles, int root, std::span<const std::size_t> lags,
                              std::span<const DetectedPreamble> others, const RootBank& bank, const DetectorSettings& s)
{
    const auto n = static_cast<std::size_t>(s.n_zc);
    const double amp = std::sqrt(s.beta);
    for (const auto& d : others) {
        const auto& g = bank.cross(d.id.root, root);
        const std::size_t offset = n - static_cast<std::size_t>(d.id.shift * s.n_cs) % n;
        for (std::size_t m = 0; m < profiles.size(); ++m) {
            const auto& h = d.cir_estimates[m];
            auto& c = profiles[m].values;
            for (std::size_t a : lags) {
                cplx acc{};
                std::size_t idx = (a + offset) % n;
                for (std::size_t l = 0; l < h.size(); ++l) {
                    acc += h[l] * g[idx];
                    idx = idx + 1 == n ? 0 : idx + 1;
                }
                c[a] -= amp * acc;
            }
        }
    }
}

}  // namespace detail

/// Full estimation pipeline: root separation by parallel interference
/// cancellation, followed by activity decisions and window read-out per
/// root. Colliding devices share one detection whose windows hold the
/// sum of their channels.
///
/// Cancellation runs on the correlation profiles rather than the received
/// samples, and only at the lags that are read out. The result matches
/// estimating each root from separate_roots() output.
inline std::vector<DetectedPreamble> estimate_channels(const RootBank& bank, std::span<const ComplexSequence> y,
                                                       const DetectorSettings& settings,
                                                       std::optional<std::span<const PreambleId>> genie = {})
{
    validate(settings);
    require(settings.mode != DetectorMode::genie || genie.has_value(),
            "estimate_channels: genie mode requires the active preamble list");
    require(!y.empty(), "estimate_channels: no antennas");
    for (const auto& ym : y)
        require(ym.size() == static_cast<std::size_t>(settings.n_zc), "estimate_channels: signal length != N_zc");

    const auto g = genie.value_or(std::span<const PreambleId>{});
    const auto& roots = settings.roots;
    const std::size_t k_count = roots.size();

    std::vector<ComplexSequence> spectra;
    spectra.reserve(y.size());
    for (const auto& ym : y)
        spectra.push_back(fft::forward(ym));

    std::vector<std::vector<CorrelationProfile>> raw(k_count);
    std::vector<std::vector<DetectedPreamble>> dets(k_count);
    std::vector<std::vector<std::size_t>> lags(k_count);
    std::vector<int> all_shifts(static_cast<std::size_t>(settings.n_p));
    for (int p = 1; p <= settings.n_p; ++p)
        all_shifts[static_cast<std::size_t>(p - 1)] = p;
    for (std::size_t k = 0; k < k_count; ++k) {
        for (std::size_t m = 0; m < spectra.size(); ++m)
            raw[k].push_back({bank.correlate_spectrum(spectra[m], roots[k]), roots[k], static_cast<int>(m)});
        dets[k] = detail::estimate_from_profiles(raw[k], roots[k], settings, g);
        // Blind detection inspects every window; genie read-out only its own.
        lags[k] = settings.mode == DetectorMode::genie
                      ? detail::window_lags(detail::genie_shifts(g, roots[k]), settings.n_cs)
                      : detail::window_lags(all_shifts, settings.n_cs);
    }

    if (k_count > 1) {
        for (int it = 0; it < settings.iterations; ++it) {
            std::vector<std::vector<DetectedPreamble>> next(k_count);
            for (std::size_t k = 0; k < k_count; ++k) {
                auto profiles = raw[k];
                for (std::size_t kk = 0; kk < k_count; ++kk)
                    if (kk != k)
                        detail::cancel_cross_root(profiles, roots[k], lags[k], dets[kk], bank, settings);
                next[k] = detail::estimate_from_profiles(profiles, roots[k], settings, g);
            }
            dets = std::move(next);
        }
    }

    std::vector<DetectedPreamble> out;
    for (auto& dk : dets)
        std::move(dk.begin(), dk.end(), std::back_inserter(out));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

inline std::vector<DetectedPreamble> estimate_channels(std::span<const ComplexSequence> y,
                                                       const DetectorSettings& settings,
                                                       std::optional<std::span<const PreambleId>> genie = {})
{
    validate(settings);
    const RootBank bank(settings.roots, settings.n_zc);
    return estimate_channels(bank, y, settings, genie);
}

}  // namespace spt
