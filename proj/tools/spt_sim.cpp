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

// spt_sim: command-line front end for the short-packet random-access
// simulator.
//
//   spt_sim simulate [scenario flags | --config FILE] [--out FILE]
//   spt_sim preset fig5|fig6|fig7 [--trials N] [--seed S] [--out FILE]
//   spt_sim formulas [--K 1 --Np 64 --Ni 2 --M 8 --pb 0 --N .. --lambda .. --Tp ..]
//   spt_sim selftest

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spt/analysis.hpp"
#include "spt/config.hpp"
#include "spt/csv.hpp"
#include "spt/presets.hpp"
#include "spt/selftest.hpp"
#include "spt/simulator.hpp"

namespace {

struct CommonOptions {
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<long long> trials;
    std::optional<std::string> mode;
    unsigned threads = 0;
};

void add_common(CLI::App& app, CommonOptions& o)
{
    app.add_option("--out", o.out, "CSV output path (default: stdout)");
    app.add_option("--seed", o.seed, "Base random seed");
    app.add_option("--trials", o.trials, "Monte Carlo trials per scenario")->check(CLI::PositiveNumber);
    app.add_option("--mode", o.mode, "Detector mode")->check(CLI::IsMember({"genie", "blind"}));
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void apply_common(const CommonOptions& o, spt::ScenarioConfig& c)
{
    if (o.seed)
        c.seed = *o.seed;
    if (o.trials)
        c.trials = *o.trials;
    if (o.mode)
        c.detector_mode = *o.mode == "blind" ? spt::DetectorMode::blind : spt::DetectorMode::genie;
}

void emit(const std::string& csv, const std::string& out)
{
    if (out.empty())
        std::cout << csv;
    else
        spt::write_file_atomic(out, csv);
}

// Options of `simulate` that map onto a single ScenarioConfig field.
struct ScenarioFlags {
    std::optional<int> M, N_I, K, N_P, N_cs, N_zc, N_sc, pic_iterations;
    std::optional<double> snr_db, threshold_factor;
    std::optional<std::vector<int>> roots;

    void add(CLI::App& app)
    {
        app.add_option("--M", M, "Receive antennas");
        app.add_option("--N_I", N_I, "Active devices per slot");
        app.add_option("--K", K, "Root sequences");
        app.add_option("--roots", roots, "Explicit root indices (K values)")->delimiter(',');
        app.add_option("--N_P", N_P, "Preambles per root");
        app.add_option("--N_cs", N_cs, "Cyclic shift size");
        app.add_option("--N_zc", N_zc, "Zadoff-Chu length (prime)");
        app.add_option("--N_sc", N_sc, "Short-packet subcarriers");
        app.add_option("--snr", snr_db, "Per-device SNR in dB");
        app.add_option("--pic-iterations", pic_iterations, "Interference cancellation rounds");
        app.add_option("--threshold-factor", threshold_factor, "Blind detection threshold over median");
    }

    void apply(spt::ScenarioConfig& c) const
    {
        auto set = [](auto& field, const auto& opt) {
            if (opt)
                field = *opt;
        };
        set(c.M, M);
        set(c.N_I, N_I);
        set(c.K, K);
        set(c.roots, roots);
        set(c.N_P, N_P);
        set(c.N_cs, N_cs);
        set(c.N_zc, N_zc);
        set(c.N_sc, N_sc);
        set(c.snr_db, snr_db);
        set(c.pic_iterations, pic_iterations);
        set(c.threshold_factor, threshold_factor);
    }
};

int run_simulate(const CommonOptions& common, const ScenarioFlags& flags, const std::string& config_path)
{
    std::vector<spt::ScenarioConfig> grid;
    if (!config_path.empty())
        grid = spt::load_config(config_path);
    else
        grid.emplace_back();
    // Explicit flags take precedence over the file.
    for (auto& c : grid) {
        flags.apply(c);
        apply_common(common, c);
    }
    const auto results = spt::run_campaign(grid, common.threads);
    emit(spt::to_csv(results), common.out);
    return 0;
}

int run_preset(const CommonOptions& common, const std::string& name)
{
    spt::ScenarioConfig base;
    base.trials = spt::default_trials(name);
    apply_common(common, base);
    const auto preset = spt::make_preset(name, base);
    const auto results = spt::run_campaign(preset.grid, common.threads);
    emit(spt::to_csv(results, preset.metrics), common.out);
    return 0;
}

struct FormulaArgs {
    int K = 1, Np = 64, Ni = 2, M = 8;
    double pb = 0.0;
    std::optional<double> N, lambda, Tp;
};

int run_formulas(const FormulaArgs& a)
{
    const double p_c = spt::analytical_collision_prob(a.K, a.Np, a.Ni);
    std::printf("p_c = %.10g\n", p_c);
    std::printf("p_s = %.10g\n", spt::success_prob(p_c, a.pb, a.Ni, a.M));
    std::printf("p_s_approx = %.10g\n", spt::success_prob_approx(p_c, a.Ni, a.M));
    std::printf("threshold = %.10g\n", spt::deterioration_threshold(a.K, a.Np));
    if (a.N && a.lambda && a.Tp)
        std::printf("offered_load = %.10g\n", spt::offered_load(*a.N, *a.lambda, *a.Tp, p_c));
    for (const auto& phase : spt::latency_budget())
        std::printf("latency %.*s = %g ms\n", static_cast<int>(phase.phase.size()), phase.phase.data(),
                    phase.milliseconds);
    std::printf("latency total = %g ms\n", spt::latency_total());
    return 0;
}

int run_selftest()
{
    bool all = true;
    for (const auto& r : spt::run_selftest()) {
        std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all = all && r.passed;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Preamble-assisted short-packet random-access link simulator"};
    app.require_subcommand(1);

    CommonOptions sim_common, preset_common;
    ScenarioFlags flags;
    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "Run one scenario or a configuration grid");
    add_common(*sim, sim_common);
    flags.add(*sim);
    sim->add_option("--config", config_path, "JSON scenario file")->check(CLI::ExistingFile);

    std::string preset_name;
    auto* preset = app.add_subcommand("preset", "Reproduce a figure grid");
    preset->add_option("name", preset_name, "fig5, fig6 or fig7")
        ->required()
        ->check(CLI::IsMember({"fig5", "fig6", "fig7"}));
    add_common(*preset, preset_common);

    FormulaArgs fa;
    auto* formulas = app.add_subcommand("formulas", "Evaluate the closed-form expressions");
    formulas->add_option("--K", fa.K, "Root sequences");
    formulas->add_option("--Np", fa.Np, "Preambles per root");
    formulas->add_option("--Ni", fa.Ni, "Contending devices");
    formulas->add_option("--M", fa.M, "Receive antennas");
    formulas->add_option("--pb", fa.pb, "Bit error rate");
    formulas->add_option("--N", fa.N, "Device population");
    formulas->add_option("--lambda", fa.lambda, "Arrival rate per device");
    formulas->add_option("--Tp", fa.Tp, "Random-access slot period");

    auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "spt_sim: error: " << e.what() << "\n";
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    try {
        if (*sim)
            return run_simulate(sim_common, flags, config_path);
        if (*preset)
            return run_preset(preset_common, preset_name);
        if (*formulas)
            return run_formulas(fa);
        if (*selftest)
            return run_selftest();
    } catch (const std::exception& e) {
        std::cerr << "spt_sim: error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
