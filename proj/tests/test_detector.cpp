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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "spt/channel.hpp"
#include "spt/detector.hpp"
#include "spt/uplink.hpp"

namespace {

using spt::cplx;
using spt::ComplexSequence;

constexpr int kNzc = 839;
constexpr int kNcs = 13;
constexpr int kNp = 64;

spt::DetectorSettings settings_for(std::vector<int> roots, double beta,
                                   spt::DetectorMode mode = spt::DetectorMode::genie, int iterations = 3)
{
    spt::DetectorSettings s;
    s.roots = std::move(roots);
    s.n_zc = kNzc;
    s.n_cs = kNcs;
    s.n_p = kNp;
    s.mode = mode;
    s.iterations = iterations;
    s.beta = beta;
    return s;
}

std::vector<spt::DeviceRealization> make_devices(const std::vector<spt::PreambleId>& ids, int antennas,
                                                 spt::RandomStream& rng)
{
    const spt::BinnedProfile binned(spt::pedestrian_b(), kNcs);
    std::vector<spt::DeviceRealization> devs(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        devs[i].preamble = ids[i];
        for (int m = 0; m < antennas; ++m)
            devs[i].cirs.push_back(binned.draw(rng));
    }
    return devs;
}

std::vector<spt::PreambleId> ids_of(const std::vector<spt::DeviceRealization>& devs)
{
    std::vector<spt::PreambleId> ids;
    for (const auto& d : devs)
        ids.push_back(d.preamble);
    return ids;
}

double window_error(const spt::Cir& h, const ComplexSequence& est)
{
    double worst = 0.0;
    for (std::size_t l = 0; l < est.size(); ++l) {
        const cplx t = l < h.size() ? h.taps[l] : cplx{};
        worst = std::max(worst, std::abs(t - est[l]));
    }
    return worst;
}

double window_mse(const spt::Cir& h, const ComplexSequence& est)
{
    double acc = 0.0;
    for (std::size_t l = 0; l < est.size(); ++l) {
        const cplx t = l < h.size() ? h.taps[l] : cplx{};
        acc += std::norm(t - est[l]);
    }
    return acc / static_cast<double>(est.size());
}

TEST(CorrelateRoot, MatchedPreamblePeaksAtShift)
{
    const auto y = spt::generate_preamble({129, 7}, kNcs, kNzc);
    const auto prof = spt::correlate_root(y, 129, kNzc);
    EXPECT_NEAR(std::abs(prof.values[7 * kNcs]), 839.0, 1e-8);
}

TEST(CorrelateRoot, ForeignRootIsFlat)
{
    const auto y = spt::generate_preamble({710, 7}, kNcs, kNzc);
    const auto prof = spt::correlate_root(y, 129, kNzc);
    for (const auto& v : prof.values)
        ASSERT_NEAR(std::abs(v), std::sqrt(839.0), 1e-6 * std::sqrt(839.0));
}

TEST(CorrelateRoot, ZerosAndLengthCheck)
{
    const auto prof = spt::correlate_root(ComplexSequence(kNzc), 129, kNzc);
    for (const auto& v : prof.values)
        ASSERT_EQ(std::abs(v), 0.0);
    EXPECT_THROW(spt::correlate_root(ComplexSequence(10), 129, kNzc), spt::InvalidParameter);
}

TEST(ExtractCir, NoiseFreeRoundTrip)
{
    spt::RandomStream rng(1);
    for (int p : {1, 17, 64}) {
        const auto devs = make_devices({{129, p}}, 1, rng);
        const auto y = spt::compose_prach(devs, 1, 1.0, 0.0, kNcs, kNzc, rng);
        const auto est = spt::extract_cir(spt::correlate_root(y[0], 129, kNzc), p, kNcs);
        ASSERT_EQ(est.size(), static_cast<std::size_t>(kNcs));
        EXPECT_LE(window_error(devs[0].cirs[0], est), 1e-12) << "shift " << p;
    }
}

TEST(ExtractCir, AdjacentShiftsAreOrthogonal)
{
    spt::RandomStream rng(2);
    const auto devs = make_devices({{129, 20}, {129, 21}}, 1, rng);
    const auto y = spt::compose_prach(devs, 1, 1.0, 0.0, kNcs, kNzc, rng);
    const auto prof = spt::correlate_root(y[0], 129, kNzc);
    EXPECT_LE(window_error(devs[0].cirs[0], spt::extract_cir(prof, 20, kNcs)), 1e-12);
    EXPECT_LE(window_error(devs[1].cirs[0], spt::extract_cir(prof, 21, kNcs)), 1e-12);
}

TEST(ExtractCir, NoiseOnlyBinPowerIsOneOverN)
{
    spt::RandomStream rng(3);
    const int trials = 10000;
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto y = spt::compose_prach({}, 1, 1.0, 1.0, kNcs, kNzc, rng);
        const auto est = spt::extract_cir(spt::correlate_root(y[0], 129, kNzc), 1 + t % kNp, kNcs);
        for (const auto& v : est)
            acc += std::norm(v);
    }
    EXPECT_NEAR(acc / (trials * kNcs) * kNzc, 1.0, 0.05);
}

TEST(DetectActive, NoiseFreeSinglePreamble)
{
    spt::RandomStream rng(4);
    const auto devs = make_devices({{129, 33}}, 4, rng);
    auto y = spt::compose_prach(devs, 4, 1.0, 0.0, kNcs, kNzc, rng);
    // A tiny noise floor gives the median a nonzero reference.
    for (auto& ym : y)
        spt::add_awgn_inplace(ym, 1e-12, rng);
    std::vector<spt::CorrelationProfile> profiles;
    for (int m = 0; m < 4; ++m)
        profiles.push_back(spt::correlate_root(y[m], 129, kNzc, m));
    for (double factor : {2.0, 10.0, 1e4})
        EXPECT_EQ(spt::detect_active(profiles, factor, kNcs, kNp), std::vector<int>{33});
}

TEST(DetectActive, FalseAlarmsAreRareOnNoise)
{
    spt::RandomStream rng(5);
    const spt::RootBank bank(std::vector<int>{129}, kNzc);
    const int trials = 10000, antennas = 8;
    long long alarms = 0;
    for (int t = 0; t < trials; ++t) {
        const auto y = spt::compose_prach({}, antennas, 1.0, 1.0, kNcs, kNzc, rng);
        std::vector<spt::CorrelationProfile> profiles;
        for (int m = 0; m < antennas; ++m)
            profiles.push_back({bank.correlate(y[m], 129), 129, m});
        alarms += static_cast<long long>(spt::detect_active(profiles, 10.0, kNcs, kNp).size());
    }
    EXPECT_LT(static_cast<double>(alarms) / trials, 0.1);
}

TEST(DetectActive, DetectsAtFiveDecibels)
{
    spt::RandomStream rng(6);
    const spt::RootBank bank(std::vector<int>{129}, kNzc);
    const int trials = 10000, antennas = 8;
    const double beta = std::pow(10.0, 0.5);
    int hits = 0;
    std::uniform_int_distribution<int> shift(1, kNp);
    for (int t = 0; t < trials; ++t) {
        const int p = shift(rng);
        const auto devs = make_devices({{129, p}}, antennas, rng);
        const auto y = spt::compose_prach(devs, antennas, beta, 1.0, kNcs, kNzc, rng);
        std::vector<spt::CorrelationProfile> profiles;
        for (int m = 0; m < antennas; ++m)
            profiles.push_back({bank.correlate(y[m], 129), 129, m});
        const auto active = spt::detect_active(profiles, 10.0, kNcs, kNp);
        hits += std::find(active.begin(), active.end(), p) != active.end() ? 1 : 0;
    }
    EXPECT_GT(static_cast<double>(hits) / trials, 0.99);
}

TEST(ReconstructRootSignal, ExactEstimateRebuildsComponent)
{
    spt::RandomStream rng(7);
    const double beta = 5.0;
    const auto devs = make_devices({{710, 12}}, 2, rng);
    const auto y = spt::compose_prach(devs, 2, beta, 0.0, kNcs, kNzc, rng);
    spt::DetectedPreamble d;
    d.id = devs[0].preamble;
    for (const auto& h : devs[0].cirs) {
        auto w = h.taps;
        w.resize(kNcs);
        d.cir_estimates.push_back(w);
    }
    const std::vector dets{d};
    for (std::size_t m = 0; m < 2; ++m) {
        const auto rebuilt = spt::reconstruct_root_signal(dets, m, beta, kNcs, kNzc);
        for (int n = 0; n < kNzc; ++n)
            ASSERT_NEAR(std::abs(rebuilt[n] - y[m][n]), 0.0, 1e-12);
    }
    const auto empty = spt::reconstruct_root_signal({}, 0, beta, kNcs, kNzc);
    EXPECT_EQ(empty, ComplexSequence(kNzc));
}

TEST(ReconstructRootSignal, MixedRootsRejected)
{
    spt::DetectedPreamble a, b;
    a.id = {129, 1};
    b.id = {710, 1};
    a.cir_estimates = b.cir_estimates = {ComplexSequence(kNcs)};
    const std::vector dets{a, b};
    EXPECT_THROW(spt::reconstruct_root_signal(dets, 0, 1.0, kNcs, kNzc), spt::InvalidParameter);
}

TEST(SeparateRoots, SingleRootPassesThrough)
{
    spt::RandomStream rng(8);
    const auto devs = make_devices({{129, 3}, {129, 9}}, 2, rng);
    const auto y = spt::compose_prach(devs, 2, 10.0, 1.0, kNcs, kNzc, rng);
    const auto ids = ids_of(devs);
    const auto out = spt::separate_roots(y, settings_for({129}, 10.0), std::span<const spt::PreambleId>(ids));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0], y);
}

TEST(SeparateRoots, NoDevicesReturnsInput)
{
    spt::RandomStream rng(9);
    const auto y = spt::compose_prach({}, 2, 1.0, 1.0, kNcs, kNzc, rng);
    const std::vector<spt::PreambleId> none;
    const auto out = spt::separate_roots(y, settings_for({129, 710, 140}, 1.0), std::span<const spt::PreambleId>(none));
    ASSERT_EQ(out.size(), 3u);
    for (const auto& per_root : out)
        EXPECT_EQ(per_root, y);
}

TEST(SeparateRoots, GenieModeNeedsActivityList)
{
    const std::vector<ComplexSequence> y(1, ComplexSequence(kNzc));
    EXPECT_THROW(spt::separate_roots(y, settings_for({129, 710}, 1.0)), spt::InvalidParameter);
}

TEST(SeparateRoots, ReconstructionErrorShrinksWithIterations)
{
    spt::RandomStream rng(10);
    const double beta = 1.0;
    const auto devs = make_devices({{129, 5}, {710, 40}}, 1, rng);
    const auto ids = ids_of(devs);
    const auto y = spt::compose_prach(devs, 1, beta, 0.0, kNcs, kNzc, rng);
    // Ground truth per-root components.
    std::vector<ComplexSequence> truth;
    for (const auto& d : devs)
        truth.push_back(spt::compose_prach(std::vector{d}, 1, beta, 0.0, kNcs, kNzc, rng)[0]);

    double previous = 1e300;
    for (int it = 1; it <= 4; ++it) {
        const auto out =
            spt::separate_roots(y, settings_for({129, 710}, beta, spt::DetectorMode::genie, it), std::span<const spt::PreambleId>(ids));
        double err = 0.0;
        for (std::size_t k = 0; k < 2; ++k)
            for (int n = 0; n < kNzc; ++n)
                err += std::norm(out[k][0][n] - truth[k][n]);
        EXPECT_LT(err, previous) << "iterations " << it;
        previous = err;
    }
}

TEST(SeparateRoots, CancellationRemovesCrossRootFloor)
{
    // Brute-force scenes: one device per root, noise free. Without separation
    // the foreign root leaks about 1/N_zc per bin; after separation it is gone.
    spt::RandomStream rng(11);
    const double beta = 1.0;
    const int scenes = 200;
    double raw = 0.0, separated = 0.0;
    for (int s = 0; s < scenes; ++s) {
        std::uniform_int_distribution<int> shift(1, kNp);
        const auto devs = make_devices({{129, shift(rng)}, {710, shift(rng)}}, 1, rng);
        const auto ids = ids_of(devs);
        const auto y = spt::compose_prach(devs, 1, beta, 0.0, kNcs, kNzc, rng);

        const auto direct = spt::extract_cir(spt::correlate_root(y[0], 129, kNzc), devs[0].preamble.shift, kNcs);
        raw += window_mse(devs[0].cirs[0], direct);

        const auto est = spt::estimate_channels(y, settings_for({129, 710}, beta), std::span<const spt::PreambleId>(ids));
        ASSERT_EQ(est.size(), 2u);
        for (const auto& d : est) {
            const std::size_t which = d.id.root == 129 ? 0 : 1;
            separated += window_mse(devs[which].cirs[0], d.cir_estimates[0]) / 2.0;
        }
    }
    raw /= scenes;
    separated /= scenes;
    EXPECT_NEAR(raw * kNzc / beta, 1.0, 0.1);
    EXPECT_LT(separated, 1e-4);
}

TEST(EstimateChannels, SingleDeviceExactOnAllAntennas)
{
    spt::RandomStream rng(12);
    const auto devs = make_devices({{129, 30}}, 4, rng);
    const auto ids = ids_of(devs);
    const auto y = spt::compose_prach(devs, 4, 1.0, 0.0, kNcs, kNzc, rng);
    const auto est = spt::estimate_channels(y, settings_for({129}, 1.0), std::span<const spt::PreambleId>(ids));
    ASSERT_EQ(est.size(), 1u);
    EXPECT_EQ(est[0].id, (spt::PreambleId{129, 30}));
    ASSERT_EQ(est[0].cir_estimates.size(), 4u);
    for (int m = 0; m < 4; ++m)
        EXPECT_LE(window_error(devs[0].cirs[m], est[0].cir_estimates[m]), 1e-12);
}

TEST(EstimateChannels, RoundTripPropertyOneRoot)
{
    spt::RandomStream rng(13);
    std::uniform_int_distribution<int> count(1, 8);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> shifts(kNp);
        std::iota(shifts.begin(), shifts.end(), 1);
        std::shuffle(shifts.begin(), shifts.end(), rng);
        std::vector<spt::PreambleId> chosen;
        const int n = count(rng);
        for (int i = 0; i < n; ++i)
            chosen.push_back({140, shifts[static_cast<std::size_t>(i)]});
        const double beta = 0.5 + t;
        const auto devs = make_devices(chosen, 2, rng);
        const auto y = spt::compose_prach(devs, 2, beta, 0.0, kNcs, kNzc, rng);
        const auto est = spt::estimate_channels(y, settings_for({140}, beta), std::span<const spt::PreambleId>(chosen));
        ASSERT_EQ(est.size(), chosen.size());
        for (const auto& dev : devs) {
            const auto it = std::find_if(est.begin(), est.end(), [&](const auto& d) { return d.id == dev.preamble; });
            ASSERT_NE(it, est.end());
            for (int m = 0; m < 2; ++m)
                ASSERT_LE(window_error(dev.cirs[m], it->cir_estimates[m]), 1e-10);
        }
    }
}

TEST(EstimateChannels, CollisionYieldsSummedChannel)
{
    spt::RandomStream rng(14);
    const auto devs = make_devices({{129, 8}, {129, 8}}, 2, rng);
    const auto ids = ids_of(devs);
    const auto y = spt::compose_prach(devs, 2, 1.0, 0.0, kNcs, kNzc, rng);
    const auto est = spt::estimate_channels(y, settings_for({129}, 1.0), std::span<const spt::PreambleId>(ids));
    ASSERT_EQ(est.size(), 1u);
    for (int m = 0; m < 2; ++m) {
        spt::Cir sum = devs[0].cirs[m];
        for (std::size_t l = 0; l < sum.size(); ++l)
            sum.taps[l] += devs[1].cirs[m].taps[l];
        EXPECT_LE(window_error(sum, est[0].cir_estimates[m]), 1e-12);
    }
}

TEST(EstimateChannels, NoiseLimitedMseAtTwentyThreeDecibels)
{
    spt::RandomStream rng(15);
    const double beta = std::pow(10.0, 2.3);
    const spt::RootBank bank(std::vector<int>{129}, kNzc);
    const auto s = settings_for({129}, beta);
    double acc = 0.0;
    int samples = 0;
    for (int t = 0; t < 300; ++t) {
        const auto devs = make_devices({{129, 2}, {129, 30}, {129, 50}}, 2, rng);
        const auto ids = ids_of(devs);
        const auto y = spt::compose_prach(devs, 2, beta, 1.0, kNcs, kNzc, rng);
        const auto est = spt::estimate_channels(bank, y, s, std::span<const spt::PreambleId>(ids));
        ASSERT_EQ(est.size(), 3u);
        for (std::size_t i = 0; i < 3; ++i)
            for (int m = 0; m < 2; ++m) {
                acc += window_mse(devs[i].cirs[m], est[i].cir_estimates[m]);
                ++samples;
            }
    }
    // Per-bin noise after correlation gain: sigma^2 / (N_zc beta).
    EXPECT_NEAR(acc / samples * kNzc * beta, 1.0, 0.1);
}

TEST(EstimateChannels, AntennaPermutationCommutes)
{
    spt::RandomStream rng(16);
    const double beta = 20.0;
    const auto devs = make_devices({{129, 4}, {710, 4}, {710, 19}}, 3, rng);
    const auto ids = ids_of(devs);
    const auto y = spt::compose_prach(devs, 3, beta, 1.0, kNcs, kNzc, rng);
    const std::vector<ComplexSequence> permuted{y[2], y[0], y[1]};
    const auto s = settings_for({129, 710}, beta);
    const auto a = spt::estimate_channels(y, s, std::span<const spt::PreambleId>(ids));
    const auto b = spt::estimate_channels(permuted, s, std::span<const spt::PreambleId>(ids));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t d = 0; d < a.size(); ++d) {
        EXPECT_EQ(a[d].cir_estimates[2], b[d].cir_estimates[0]);
        EXPECT_EQ(a[d].cir_estimates[0], b[d].cir_estimates[1]);
        EXPECT_EQ(a[d].cir_estimates[1], b[d].cir_estimates[2]);
    }
}

TEST(EstimateChannels, MatchesTimeDomainSeparation)
{
    // Oracle: cancel in the time domain with separate_roots, then read each
    // root's windows out of its separated stream.
    spt::RandomStream rng(18);
    const double beta = 50.0;
    const std::vector<int> roots{129, 710, 140};
    for (auto mode : {spt::DetectorMode::genie, spt::DetectorMode::blind}) {
        for (int scene = 0; scene < 5; ++scene) {
            const auto ids = spt::select_preambles(6, roots, kNp, rng);
            const auto devs = make_devices(ids, 3, rng);
            const auto y = spt::compose_prach(devs, 3, beta, 1.0, kNcs, kNzc, rng);
            const auto s = settings_for(roots, beta, mode, 3);
            const std::span<const spt::PreambleId> genie(ids);

            const auto fast = spt::estimate_channels(y, s, genie);
            const auto separated = spt::separate_roots(y, s, genie);
            const spt::RootBank bank(roots, kNzc);
            std::vector<spt::DetectedPreamble> oracle;
            for (std::size_t k = 0; k < roots.size(); ++k) {
                const auto d = spt::detail::estimate_root(bank, separated[k], roots[k], s, genie);
                oracle.insert(oracle.end(), d.begin(), d.end());
            }
            std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

            ASSERT_EQ(fast.size(), oracle.size());
            for (std::size_t d = 0; d < fast.size(); ++d) {
                ASSERT_EQ(fast[d].id, oracle[d].id);
                for (std::size_t m = 0; m < 3; ++m)
                    for (int l = 0; l < kNcs; ++l)
                        ASSERT_NEAR(std::abs(fast[d].cir_estimates[m][l] - oracle[d].cir_estimates[m][l]), 0.0, 1e-9);
            }
        }
    }
}

TEST(EstimateChannels, BlindModeFindsActivePreambles)
{
    spt::RandomStream rng(17);
    const double beta = 100.0;
    const auto devs = make_devices({{129, 11}, {710, 52}}, 8, rng);
    const auto y = spt::compose_prach(devs, 8, beta, 1.0, kNcs, kNzc, rng);
    const auto est = spt::estimate_channels(y, settings_for({129, 710}, beta, spt::DetectorMode::blind));
    ASSERT_EQ(est.size(), 2u);
    EXPECT_EQ(est[0].id, (spt::PreambleId{129, 11}));
    EXPECT_EQ(est[1].id, (spt::PreambleId{710, 52}));
}

}  // namespace
