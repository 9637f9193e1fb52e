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

#include <cmath>

#include "spt/simulator.hpp"

namespace {

spt::ScenarioConfig base(int n_i, int k = 1)
{
    spt::ScenarioConfig c;
    c.N_I = n_i;
    c.K = k;
    c.trials = 100;
    c.seed = 11;
    return c;
}

TEST(DeriveStream, SameInputsSamePrefix)
{
    auto a = spt::derive_stream(5, 3, "channel");
    auto b = spt::derive_stream(5, 3, "channel");
    for (int i = 0; i < 100; ++i)
        ASSERT_EQ(a(), b());
}

TEST(DeriveStream, DistinctLabelsUncorrelated)
{
    auto a = spt::derive_stream(5, 0, "channel");
    auto b = spt::derive_stream(5, 0, "noise_prach");
    std::normal_distribution<double> g;
    const int n = 10000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += g(a) * g(b);
    EXPECT_LT(std::abs(acc / n), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(DeriveStream, SeedAndTrialChangeStream)
{
    EXPECT_NE(spt::derive_stream(1, 0, "channel")(), spt::derive_stream(2, 0, "channel")());
    EXPECT_NE(spt::derive_stream(1, 0, "channel")(), spt::derive_stream(1, 1, "channel")());
}

TEST(Validate, RejectsInvariantViolations)
{
    auto expect_key = [](spt::ScenarioConfig c, const std::string& key) {
        try {
            spt::validate(c);
            ADD_FAILURE() << "accepted invalid " << key;
        } catch (const spt::InvalidParameter& e) {
            EXPECT_EQ(std::string(e.what()).rfind(key + ":", 0), 0u) << e.what();
        }
    };
    auto c = base(4);
    c.N_zc = 840;
    expect_key(c, "N_zc");
    c = base(4);
    c.N_P = 65;
    expect_key(c, "N_P");
    c = base(4);
    c.K = 2;
    c.roots = {129, 129};
    expect_key(c, "roots");
    c = base(4);
    c.trials = 0;
    expect_key(c, "trials");
    c = base(4);
    c.roots = {129, 710};
    expect_key(c, "roots");
    EXPECT_NO_THROW(spt::validate(base(4)));
}

TEST(RunTrial, DeterministicPerTrialIndex)
{
    const auto c = base(4, 5);
    for (std::uint64_t t : {0u, 7u, 123u})
        EXPECT_EQ(spt::run_trial(c, t), spt::run_trial(c, t));
    EXPECT_NE(spt::run_trial(c, 1), spt::run_trial(c, 2));
}

TEST(RunTrial, SingleDeviceHighSnrAlwaysSucceeds)
{
    auto c = base(1);
    c.snr_db = 25;
    const spt::TrialRunner runner(c);
    int ok = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const auto out = runner.run(static_cast<std::uint64_t>(t));
        ok += out.devices[0].success ? 1 : 0;
    }
    EXPECT_GT(static_cast<double>(ok) / trials, 0.999);
}

TEST(RunTrial, OverloadedSlotNeverSucceeds)
{
    auto c = base(9);
    const spt::TrialRunner runner(c);
    for (int t = 0; t < 200; ++t) {
        const auto out = runner.run(static_cast<std::uint64_t>(t));
        ASSERT_EQ(out.devices.size(), 9u);
        for (const auto& d : out.devices)
            ASSERT_FALSE(d.success);
        ASSERT_TRUE(out.decode_failed);
    }
}

TEST(RunTrial, SuccessImpliesUniqueAndErrorFree)
{
    const spt::TrialRunner runner(base(8));
    for (int t = 0; t < 300; ++t)
        for (const auto& d : runner.run(static_cast<std::uint64_t>(t)).devices)
            if (d.success) {
                ASSERT_FALSE(d.collided);
                ASSERT_EQ(d.bit_errors, 0);
            }
}

TEST(RunScenario, MetricOrderAndNames)
{
    const auto r = spt::run_scenario(base(2), 1);
    const std::vector<std::string> names{"mse", "ber", "p_c_emp", "p_c_ana", "p_s_emp", "p_s_ana"};
    ASSERT_EQ(r.metrics.size(), names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
        EXPECT_EQ(r.metrics[i].name, names[i]);
    EXPECT_NEAR(r.find("p_c_ana")->value, 0.015625, 1e-15);
}

TEST(RunScenario, SingleTrialGridGivesOneRow)
{
    auto c = base(1);
    c.trials = 1;
    const auto results = spt::run_campaign({c}, 1);
    ASSERT_EQ(results.size(), 1u);
    EXPECT_EQ(results[0].find("p_c_emp")->count, 1);
}

TEST(RunScenario, ThreadCountDoesNotChangeResults)
{
    const auto c = base(4, 5);
    const auto a = spt::run_scenario(c, 1);
    const auto b = spt::run_scenario(c, 3);
    ASSERT_EQ(a.metrics.size(), b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        EXPECT_EQ(a.metrics[i].value, b.metrics[i].value) << a.metrics[i].name;
        EXPECT_EQ(a.metrics[i].ci_halfwidth, b.metrics[i].ci_halfwidth) << a.metrics[i].name;
        EXPECT_EQ(a.metrics[i].count, b.metrics[i].count) << a.metrics[i].name;
    }
}

TEST(Accumulator, MergeEqualsSequentialAdd)
{
    const auto c = base(4);
    const spt::TrialRunner runner(c);
    spt::CampaignAccumulator whole, left, right;
    for (int t = 0; t < 60; ++t) {
        const auto s = spt::summarize(runner.run(static_cast<std::uint64_t>(t)), c.N_sc);
        whole.add(s);
        (t < 25 ? left : right).add(s);
    }
    left.merge(right);
    EXPECT_EQ(left.trials, whole.trials);
    EXPECT_EQ(left.devices, whole.devices);
    EXPECT_EQ(left.collided, whole.collided);
    EXPECT_EQ(left.successes, whole.successes);
    EXPECT_EQ(left.bit_errors, whole.bit_errors);
    EXPECT_EQ(left.bits, whole.bits);
    EXPECT_EQ(left.mse_trials, whole.mse_trials);
    EXPECT_NEAR(left.mse_sum, whole.mse_sum, 1e-12 * whole.mse_sum);
}

TEST(RunCampaign, CollisionFrequencyMatchesFormula)
{
    auto c = base(4);
    c.trials = 20000;
    // Collision statistics do not depend on the radio path; keep the
    // configuration cheap.
    c.M = 4;
    c.N_sc = 13;
    const auto r = spt::run_scenario(c, 0);
    const double p = 0.046143;
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(c.trials));
    EXPECT_NEAR(r.find("p_c_emp")->value, p, 3 * sigma);
    const auto ps = r.find("p_s_emp");
    EXPECT_LE(ps->value, 1 - r.find("p_c_emp")->value + 3 * ps->standard_error());
}

TEST(RunCampaign, InvalidScenarioRejectedBeforeRunning)
{
    auto bad = base(2);
    bad.N_zc = 840;
    EXPECT_THROW(spt::run_campaign({base(2), bad}, 1), spt::InvalidParameter);
    EXPECT_THROW(spt::run_campaign({}, 1), spt::InvalidParameter);
}

TEST(RunCampaign, MseIndependentOfAntennaCount)
{
    auto c8 = base(2);
    c8.trials = 2000;
    c8.N_sc = 13;
    auto c16 = c8;
    c16.M = 16;
    const auto a = spt::run_scenario(c8, 0).find("mse");
    const auto b = spt::run_scenario(c16, 0).find("mse");
    const double se = std::hypot(a->standard_error(), b->standard_error());
    EXPECT_LT(std::abs(a->value - b->value), 3 * se);
}

}  // namespace
