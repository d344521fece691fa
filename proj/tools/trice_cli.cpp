// SPDX-License-Identifier: Apache-2.0
//
// trice: two-stage channel estimation for RIS-aided mmWave MIMO systems
// Copyright (C) 2026 the trice authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trice/harness.hpp"
#include "trice/sensing.hpp"
#include "trice/trice.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSpecError = 1;
constexpr int kExitRuntimeFailure = 2;

trice::ExperimentSpec default_spec() {
    trice::ExperimentSpec spec;
    spec.config = trice::SystemConfig{};  // desk-scale defaults
    spec.methods = {"ls", "trice-bes", "trice-cs", "joint-cs"};
    spec.snr_db = {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
    spec.trials = 200;
    spec.master_seed = 1;
    return spec;
}

trice::ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw trice::SpecError("cannot open spec file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw trice::SpecError("spec file '" + path + "' is not valid JSON: " + e.what());
    }
    return trice::parse_spec(j);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct CommonFlags {
    std::string spec_path;
    std::string out_path;
    std::string methods;
    std::string snrs;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool timing = false;
};

trice::ExperimentSpec resolve_spec(const CommonFlags& flags, bool spec_required) {
    trice::ExperimentSpec spec;
    if (!flags.spec_path.empty())
        spec = load_spec(flags.spec_path);
    else if (spec_required)
        throw trice::SpecError("--spec is required for this subcommand");
    else
        spec = default_spec();
    if (flags.seed_set) spec.master_seed = flags.seed;
    if (flags.threads > 0) spec.threads = flags.threads;
    if (flags.timing) spec.emit_timing = true;
    if (!flags.methods.empty()) {
        spec.methods = split_list(flags.methods);
        if (spec.methods.empty()) throw trice::SpecError("--method list is empty");
    }
    if (!flags.snrs.empty()) {
        spec.snr_db.clear();
        for (const auto& tok : split_list(flags.snrs)) {
            try {
                spec.snr_db.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw trice::SpecError("--snr: cannot parse '" + tok + "'");
            }
        }
    }
    return spec;
}

void write_output(const std::string& out_path, const std::string& csv) {
    if (out_path.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
    out << csv;
}

int cmd_sweep(const CommonFlags& flags) {
    const trice::ExperimentSpec spec = resolve_spec(flags, /*spec_required=*/true);
    const trice::SweepResult result = trice::run_sweep(spec);
    write_output(flags.out_path, result.csv);
    if (result.any_cell_all_failed) {
        std::cerr << "trice sweep: at least one cell failed in every trial\n";
        return kExitRuntimeFailure;
    }
    // Mean/median NMSE digest per cell on stderr so the CSV stays clean.
    std::cerr << "cells (method @ point): median nmse\n";
    for (const auto& s : result.summary) {
        std::fprintf(stderr, "  %-10s snr=%-6g k_t=%-3d k_s=%dx%d  median=%.6e\n",
                     s.method.c_str(), s.snr_db, s.k_t, s.k_s_v, s.k_s_h, s.nmse);
    }
    return kExitOk;
}

int cmd_single(const CommonFlags& flags) {
    trice::ExperimentSpec spec = resolve_spec(flags, /*spec_required=*/false);
    const trice::SystemConfig& cfg = spec.config;
    const double snr = spec.snr_db.front();

    std::printf("configuration:\n");
    std::printf("  arrays: m_t=%d m_r=%d surface=%dx%d (m_s=%d)\n", cfg.m_t, cfg.m_r, cfg.m_s_v,
                cfg.m_s_h, cfg.m_s());
    std::printf("  training: n_r=%d k_t=%d k_s=%dx%d (k_s=%d)\n", cfg.n_r, cfg.k_t, cfg.k_s_v,
                cfg.k_s_h, cfg.k_s());
    std::printf("  paths: l_t=%d l_r=%d (l=%d), snr=%g dB\n", cfg.l_t, cfg.l_r, cfg.l(), snr);

    const std::uint64_t seed = trice::detail::trial_seed(spec.master_seed, cfg, 0);
    trice::Rng rng(seed);
    const trice::ChannelParams params = trice::sample_paths(cfg, rng);
    const trice::ChannelSet channels = trice::realize(cfg, params);
    const trice::TrainingSet train = trice::build_training(cfg);
    const trice::CMatrix y0 = trice::synthesize(cfg, channels, train);
    const trice::MeasurementBlock block = trice::add_noise(y0, snr, rng);

    std::printf("trial seed: %llu\n", static_cast<unsigned long long>(seed));
    std::printf("ground truth paths:\n");
    for (int i = 0; i < cfg.l_t; ++i)
        std::printf("  tx path %d: psi_t=%.6f mu_v=%.6f mu_h=%.6f |alpha|=%.4f\n", i,
                    params.psi_t(i), params.mu_v_t(i), params.mu_h_t(i), std::abs(params.alpha_t(i)));
    for (int k = 0; k < cfg.l_r; ++k)
        std::printf("  rx path %d: psi_r=%.6f mu_v=%.6f mu_h=%.6f |alpha|=%.4f\n", k,
                    params.psi_r(k), params.mu_v_r(k), params.mu_h_r(k), std::abs(params.alpha_r(k)));

    int failures = 0;
    for (const auto& method : spec.methods) {
        try {
            if (method == "ls") {
                const auto t0 = std::chrono::steady_clock::now();
                const trice::CMatrix h_hat = trice::ls_estimate(block.y, train, cfg);
                const double ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
                std::printf("%-10s nmse=%.6e (%.2f ms)\n", method.c_str(),
                            trice::nmse(channels.h, h_hat), ms);
                const long long budget = static_cast<long long>(cfg.k_t) * cfg.k_s();
                const long long need =
                    (static_cast<long long>(cfg.m_r) * cfg.m_t * cfg.m_s() + cfg.n_r - 1) / cfg.n_r;
                std::printf("    exact-recovery budget k_t*k_s >= m_r*m_t*m_s/n_r: %lld vs %lld (%s)\n",
                            budget, need, budget >= need ? "met" : "not met");
                continue;
            }
            trice::EstimateReport rep;
            if (method == "trice-bes")
                rep = trice::run_trice(block.y, train, cfg, trice::StageSolver::Bes);
            else if (method == "trice-cs")
                rep = trice::run_trice(block.y, train, cfg, trice::StageSolver::Cs,
                                       trice::default_grids(cfg, spec.trice_cs_grids));
            else if (method == "joint-cs")
                rep = trice::run_joint_cs(block.y, train, cfg,
                                          trice::default_grids(cfg, spec.joint_cs_grids));
            else
                throw trice::SpecError("unknown method '" + method + "'");
            std::printf("%-10s nmse=%.6e (%.2f ms)\n", method.c_str(),
                        trice::nmse(channels.h, rep.h_hat), rep.wall_ms);
            if (rep.stage1)
                for (trice::Index n = 0; n < rep.stage1->psi_t.size(); ++n)
                    std::printf("    path %ld: psi_t=%.6f psi_r=%.6f mu_v=%.6f mu_h=%.6f |alpha|=%.4f\n",
                                static_cast<long>(n), rep.stage1->psi_t(n), rep.stage1->psi_r(n),
                                rep.stage2->mu_v(n), rep.stage2->mu_h(n),
                                std::abs(rep.stage2->alpha(n)));
            for (const auto& w : rep.warnings) std::printf("    warning: %s\n", w.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("%-10s failed: %s\n", method.c_str(), e.what());
        }
    }
    return failures == static_cast<int>(spec.methods.size()) ? kExitRuntimeFailure : kExitOk;
}

int cmd_validate(const CommonFlags& flags) {
    trice::ExperimentSpec spec = resolve_spec(flags, /*spec_required=*/false);
    std::vector<trice::EstimatorKind> kinds;
    for (const auto& m : spec.methods) {
        if (m == "trice-bes") kinds.push_back(trice::EstimatorKind::TriceBes);
        if (m == "trice-cs") kinds.push_back(trice::EstimatorKind::TriceCs);
        if (m == "joint-cs") kinds.push_back(trice::EstimatorKind::JointCs);
    }
    if (kinds.empty())
        kinds = {trice::EstimatorKind::TriceBes, trice::EstimatorKind::TriceCs,
                 trice::EstimatorKind::JointCs};
    for (auto kind : kinds) {
        const auto mult = kind == trice::EstimatorKind::JointCs ? spec.joint_cs_grids
                                                                : spec.trice_cs_grids;
        const auto rep = trice::validate_config(spec.config, kind, mult);
        std::printf("%s:\n", trice::to_string(kind));
        for (const auto& item : rep.items)
            std::printf("  [%s] %-40s %s%s\n", item.satisfied ? "pass" : "FAIL", item.name.c_str(),
                        item.detail.c_str(), item.hard ? "" : "  (advisory)");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo channel-estimation experiments for RIS-aided mmWave MIMO links"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto add_common = [&flags](CLI::App* cmd, bool with_out) {
        cmd->add_option("--spec", flags.spec_path, "experiment spec file (JSON)");
        if (with_out) cmd->add_option("--out", flags.out_path, "output CSV path (default stdout)");
        cmd->add_option("--seed", flags.seed, "override master seed")
            ->each([&flags](const std::string&) { flags.seed_set = true; });
        cmd->add_option("--threads", flags.threads, "worker threads for trials");
        cmd->add_option("--method", flags.methods, "comma-separated method list override");
        cmd->add_option("--snr", flags.snrs, "comma-separated SNR list override (dB)");
        cmd->add_flag("--timing", flags.timing, "emit measured runtimes in the CSV");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "run a full experiment sweep, emit CSV");
    add_common(sweep, true);
    CLI::App* single = app.add_subcommand("single", "run one trial and dump parameters");
    add_common(single, false);
    CLI::App* validate = app.add_subcommand("validate", "report training-overhead conditions");
    add_common(validate, false);

    CLI11_PARSE(app, argc, argv);
    try {
        if (sweep->parsed()) return cmd_sweep(flags);
        if (single->parsed()) return cmd_single(flags);
        if (validate->parsed()) return cmd_validate(flags);
    } catch (const trice::SpecError& e) {
        std::cerr << "trice: " << e.what() << "\n";
        return kExitSpecError;
    } catch (const std::exception& e) {
        std::cerr << "trice: " << e.what() << "\n";
        return kExitRuntimeFailure;
    }
    return kExitSpecError;
}
