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

#ifndef TRICE_HARNESS_HPP
#define TRICE_HARNESS_HPP

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "trice/chanmodel.hpp"
#include "trice/sensing.hpp"
#include "trice/sparsekit.hpp"
#include "trice/training.hpp"
#include "trice/trice.hpp"

namespace trice {

class SpecError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { Snr, Kt, Ks };

/// One Monte-Carlo experiment: a base configuration, the methods to
/// compare, dictionary densities per CS method, the swept axis and the
/// trial budget.
struct ExperimentSpec {
    SystemConfig config;
    std::vector<std::string> methods;  // subset of {ls, trice-bes, trice-cs, joint-cs}
    GridMultipliers trice_cs_grids;
    GridMultipliers joint_cs_grids;
    std::vector<double> snr_db;
    SweepAxis axis = SweepAxis::Snr;
    std::vector<int> k_t_values;                    // axis == Kt
    std::vector<std::pair<int, int>> k_s_values;    // axis == Ks, (v, h) splits
    int trials = 200;
    std::uint64_t master_seed = 1;
    int threads = 1;
    bool emit_timing = false;  // serialize measured runtimes instead of 0

    // Channel draws normally use the sweep point's training dimensions to
    // define the visible sectors (as in the simulated experiments). A
    // dimension pinned here is held fixed across the whole sweep instead,
    // which makes the affected points estimate identical channel
    // realizations; a pinned value must not exceed the corresponding
    // dimension of any sweep point.
    std::optional<int> sampling_k_t;
    std::optional<int> sampling_k_s_v;
    std::optional<int> sampling_k_s_h;

    SystemConfig sampling_config(const SystemConfig& point) const {
        SystemConfig s = point;
        if (sampling_k_t) s.k_t = *sampling_k_t;
        if (sampling_k_s_v) s.k_s_v = *sampling_k_s_v;
        if (sampling_k_s_h) s.k_s_h = *sampling_k_s_h;
        return s;
    }
};

struct ResultRow {
    std::string method;
    double snr_db = 0.0;
    int k_t = 0;
    int k_s_v = 0;
    int k_s_h = 0;
    long trial = 0;  // -1 marks a per-cell summary row
    std::uint64_t seed = 0;
    double nmse = std::numeric_limits<double>::quiet_NaN();
    double psi_rmse = std::numeric_limits<double>::quiet_NaN();
    double mu_rmse = std::numeric_limits<double>::quiet_NaN();
    double runtime_ms = 0.0;
    bool failed = false;
};

struct SweepResult {
    std::vector<ResultRow> detail;
    std::vector<ResultRow> summary;
    std::string csv;
    bool any_cell_all_failed = false;
};

inline constexpr const char* kCsvHeader =
    "method,snr_db,k_t,k_s_v,k_s_h,trial,seed,nmse,psi_rmse,mu_rmse,runtime_ms";

namespace detail {

inline bool known_method(const std::string& m) {
    return m == "ls" || m == "trice-bes" || m == "trice-cs" || m == "joint-cs";
}

// Trial seeds hash the master seed, the sweep-invariant geometry (array
// sizes, RF chains, path counts), and the trial index. Neither the noise
// level nor the swept training budget enters the hash, so every sweep
// point of an experiment (and any experiment sharing geometry and master
// seed) consumes the same underlying random draws trial for trial: common
// random numbers across the sweep axis, identical channels where the
// sampling sectors coincide.
inline std::uint64_t trial_seed(std::uint64_t master, const SystemConfig& cfg, int trial) {
    std::uint64_t h = splitmix64(master);
    auto mix = [&h](std::uint64_t v) { h = hash_combine(h, v); };
    mix(static_cast<std::uint64_t>(cfg.m_t));
    mix(static_cast<std::uint64_t>(cfg.m_r));
    mix(static_cast<std::uint64_t>(cfg.m_s_v));
    mix(static_cast<std::uint64_t>(cfg.m_s_h));
    mix(static_cast<std::uint64_t>(cfg.n_r));
    mix(static_cast<std::uint64_t>(cfg.l_t));
    mix(static_cast<std::uint64_t>(cfg.l_r));
    mix(static_cast<std::uint64_t>(trial));
    return h;
}

inline double circular_distance(double a, double b) {
    const double d = wrap_2pi(a - b);
    return std::min(d, kTwoPi - d);
}

// 4-tuples (psi_t, psi_r, mu_v, mu_h), lexicographically sorted, compared
// index by index.
using PathTuple = std::array<double, 4>;

inline std::vector<PathTuple> truth_tuples(const SystemConfig& cfg, const ChannelParams& params,
                                           const ChannelSet& channels) {
    std::vector<PathTuple> out;
    out.reserve(cfg.l());
    for (int i = 0; i < cfg.l_t; ++i)
        for (int k = 0; k < cfg.l_r; ++k) {
            const int n = i * cfg.l_r + k;
            out.push_back({params.psi_t(i), params.psi_r(k), channels.mu_v_eff(n),
                           channels.mu_h_eff(n)});
        }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<PathTuple> estimate_tuples(const EstimateReport& rep) {
    std::vector<PathTuple> out;
    if (!rep.stage1 || !rep.stage2) return out;
    for (Index n = 0; n < rep.stage1->psi_t.size(); ++n)
        out.push_back({rep.stage1->psi_t(n), rep.stage1->psi_r(n), rep.stage2->mu_v(n),
                       rep.stage2->mu_h(n)});
    std::sort(out.begin(), out.end());
    return out;
}

// Greedy nearest assignment of estimated to true path tuples (ordering of
// estimated paths is arbitrary when paths share a frequency value).
inline std::pair<double, double> frequency_rmse(const std::vector<PathTuple>& truth,
                                                const std::vector<PathTuple>& est) {
    if (est.size() != truth.size() || truth.empty())
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    std::vector<bool> used(est.size(), false);
    double psi2 = 0.0, mu2 = 0.0;
    for (const auto& t : truth) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < est.size(); ++j) {
            if (used[j]) continue;
            double d = 0.0;
            for (int c = 0; c < 4; ++c) d += circular_distance(t[c], est[j][c]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        used[best_j] = true;
        psi2 += std::pow(circular_distance(t[0], est[best_j][0]), 2) +
                std::pow(circular_distance(t[1], est[best_j][1]), 2);
        mu2 += std::pow(circular_distance(t[2], est[best_j][2]), 2) +
               std::pow(circular_distance(t[3], est[best_j][3]), 2);
    }
    const double denom = 2.0 * static_cast<double>(truth.size());
    return {std::sqrt(psi2 / denom), std::sqrt(mu2 / denom)};
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::string format_double(double v, const char* fmt) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace detail

/// Everything fixed across the trials of one sweep point: the point's
/// configuration and noise level, its training set, and the prebuilt
/// dictionaries of the CS methods (dictionaries are immutable, so sharing
/// them across concurrent trials is safe).
struct PointContext {
    SystemConfig cfg;
    SystemConfig sampling_cfg;  // defines the channel sectors and the seed
    double snr_db = 0.0;
    TrainingSet train;
    std::optional<StageGrids> grids_cs;
    std::optional<StageGrids> grids_joint;
    std::optional<Dictionary> dict_s1;
    std::optional<Dictionary> dict_s2;
    std::optional<Dictionary> dict_4d;
};

/// Prepare the shared per-point state for the given method list.
inline PointContext make_point_context(const SystemConfig& cfg, double snr_db,
                                       const std::vector<std::string>& methods,
                                       const GridMultipliers& trice_cs_grids = {},
                                       const GridMultipliers& joint_cs_grids = {},
                                       std::optional<SystemConfig> sampling_cfg = std::nullopt) {
    PointContext ctx;
    ctx.cfg = cfg;
    ctx.sampling_cfg = sampling_cfg.value_or(cfg);
    if (ctx.sampling_cfg.k_t > cfg.k_t || ctx.sampling_cfg.k_s_v > cfg.k_s_v ||
        ctx.sampling_cfg.k_s_h > cfg.k_s_h)
        throw SpecError("sampling dimensions exceed a sweep point's training budget");
    ctx.snr_db = snr_db;
    ctx.train = build_training(cfg);
    // dictionary grids cover the sectors the channels are drawn from
    if (std::count(methods.begin(), methods.end(), "trice-cs") > 0) {
        ctx.grids_cs = default_grids(ctx.sampling_cfg, trice_cs_grids);
        ctx.dict_s1.emplace(dict_stage1(ctx.train.f, ctx.train.w, ctx.grids_cs->psi_t,
                                        ctx.grids_cs->psi_r));
        ctx.dict_s2.emplace(dict_stage2(ctx.train.q_v, ctx.train.q_h, ctx.grids_cs->mu_v,
                                        ctx.grids_cs->mu_h));
    }
    if (std::count(methods.begin(), methods.end(), "joint-cs") > 0) {
        ctx.grids_joint = default_grids(ctx.sampling_cfg, joint_cs_grids);
        ctx.dict_4d.emplace(dict_joint4d(ctx.train.f, ctx.train.w, ctx.train.q_v, ctx.train.q_h,
                                         ctx.grids_joint->psi_t, ctx.grids_joint->psi_r,
                                         ctx.grids_joint->mu_v, ctx.grids_joint->mu_h));
    }
    return ctx;
}

/// Run one trial of a sweep point: draw a channel, synthesize the noisy
/// block once, and estimate with every requested method against the same
/// realization. Per-method failures are recorded in the row and do not
/// abort the trial.
inline std::vector<ResultRow> run_trial(const PointContext& ctx,
                                        const std::vector<std::string>& methods,
                                        std::uint64_t master_seed, int trial) {
    const std::uint64_t seed = detail::trial_seed(master_seed, ctx.sampling_cfg, trial);
    Rng rng(seed);
    const ChannelParams params = sample_paths(ctx.sampling_cfg, rng);
    const ChannelSet channels = realize(ctx.sampling_cfg, params);
    const CMatrix y0 = synthesize(ctx.cfg, channels, ctx.train);
    const MeasurementBlock block = add_noise(y0, ctx.snr_db, rng);
    const auto truth = detail::truth_tuples(ctx.sampling_cfg, params, channels);

    std::vector<ResultRow> rows;
    rows.reserve(methods.size());
    for (const auto& method : methods) {
        ResultRow row;
        row.method = method;
        row.snr_db = ctx.snr_db;
        row.k_t = ctx.cfg.k_t;
        row.k_s_v = ctx.cfg.k_s_v;
        row.k_s_h = ctx.cfg.k_s_h;
        row.trial = trial;
        row.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (method == "ls") {
                const CMatrix h_hat = ls_estimate(block.y, ctx.train, ctx.cfg);
                row.nmse = nmse(channels.h, h_hat);
            } else {
                EstimateReport rep;
                if (method == "trice-bes")
                    rep = run_trice(block.y, ctx.train, ctx.cfg, StageSolver::Bes);
                else if (method == "trice-cs")
                    rep = run_trice(block.y, ctx.train, ctx.cfg, StageSolver::Cs, ctx.grids_cs,
                                    &*ctx.dict_s1, &*ctx.dict_s2);
                else
                    rep = run_joint_cs(block.y, ctx.train, ctx.cfg, *ctx.grids_joint,
                                       Index(1) << 20, &*ctx.dict_4d);
                row.nmse = nmse(channels.h, rep.h_hat);
                std::tie(row.psi_rmse, row.mu_rmse) =
                    detail::frequency_rmse(truth, detail::estimate_tuples(rep));
            }
        } catch (const std::exception&) {
            row.failed = true;
        }
        row.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Serialize rows in the fixed CSV schema. Runtimes are written as 0.000
/// unless emit_timing is set, keeping the document reproducible re-run to
/// re-run.
inline std::string to_csv(const std::vector<ResultRow>& detail_rows,
                          const std::vector<ResultRow>& summary_rows, bool emit_timing) {
    std::string out(kCsvHeader);
    out.push_back('\n');
    auto emit = [&out, emit_timing](const ResultRow& r) {
        out += r.method;
        out.push_back(',');
        out += detail::format_double(r.snr_db, "%.10g");
        out.push_back(',');
        out += std::to_string(r.k_t);
        out.push_back(',');
        out += std::to_string(r.k_s_v);
        out.push_back(',');
        out += std::to_string(r.k_s_h);
        out.push_back(',');
        out += std::to_string(r.trial);
        out.push_back(',');
        out += std::to_string(r.seed);
        out.push_back(',');
        out += detail::format_double(r.nmse, "%.12e");
        out.push_back(',');
        out += detail::format_double(r.psi_rmse, "%.12e");
        out.push_back(',');
        out += detail::format_double(r.mu_rmse, "%.12e");
        out.push_back(',');
        out += detail::format_double(emit_timing ? r.runtime_ms : 0.0, "%.3f");
        out.push_back('\n');
    };
    for (const auto& r : detail_rows) emit(r);
    for (const auto& r : summary_rows) emit(r);
    return out;
}

/// Run the full sweep: every method on every (sweep point, trial) cell with
/// paired channel and noise draws, followed by per-cell median summary rows
/// (trial = -1). Trials may run on several threads; row order is restored
/// afterwards so the output does not depend on scheduling.
inline SweepResult run_sweep(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw SpecError("run_sweep: trials must be >= 1");
    if (spec.methods.empty()) throw SpecError("run_sweep: no methods requested");
    for (const auto& m : spec.methods)
        if (!detail::known_method(m)) throw SpecError("run_sweep: unknown method '" + m + "'");
    if (spec.snr_db.empty()) throw SpecError("run_sweep: empty snr list");
    if (spec.axis != SweepAxis::Snr && spec.snr_db.size() != 1)
        throw SpecError("run_sweep: a non-SNR sweep needs exactly one snr_db value");

    // Materialize the sweep points.
    std::vector<std::pair<SystemConfig, double>> points;
    if (spec.axis == SweepAxis::Snr) {
        for (double s : spec.snr_db) points.emplace_back(spec.config, s);
    } else if (spec.axis == SweepAxis::Kt) {
        if (spec.k_t_values.empty()) throw SpecError("run_sweep: empty k_t value list");
        for (int v : spec.k_t_values) {
            SystemConfig c = spec.config;
            c.k_t = v;
            points.emplace_back(c, spec.snr_db.front());
        }
    } else {
        if (spec.k_s_values.empty()) throw SpecError("run_sweep: empty k_s value list");
        for (auto [v, h] : spec.k_s_values) {
            SystemConfig c = spec.config;
            c.k_s_v = v;
            c.k_s_h = h;
            points.emplace_back(c, spec.snr_db.front());
        }
    }
    for (auto& [cfg, snr] : points) {
        try {
            cfg.validate();
        } catch (const std::exception& e) {
            throw SpecError(std::string("run_sweep: invalid sweep point: ") + e.what());
        }
    }

    SweepResult result;
    for (const auto& [cfg, snr] : points) {
        SystemConfig sampling = spec.sampling_config(cfg);
        try {
            sampling.validate();
        } catch (const std::exception& e) {
            throw SpecError(std::string("run_sweep: invalid sampling config: ") + e.what());
        }
        const PointContext ctx = make_point_context(cfg, snr, spec.methods, spec.trice_cs_grids,
                                                    spec.joint_cs_grids, sampling);

        std::vector<std::vector<ResultRow>> slots(spec.trials);
        const int n_threads = std::max(1, spec.threads);
        if (n_threads == 1) {
            for (int t = 0; t < spec.trials; ++t)
                slots[t] = run_trial(ctx, spec.methods, spec.master_seed, t);
        } else {
            std::atomic<int> next{0};
            auto worker = [&]() {
                for (;;) {
                    const int t = next.fetch_add(1);
                    if (t >= spec.trials) return;
                    slots[t] = run_trial(ctx, spec.methods, spec.master_seed, t);
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(n_threads);
            for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        // Per-cell medians over the successful trials.
        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
            const auto& method = spec.methods[mi];
            std::vector<double> nm, pr, mr, rt;
            int failures = 0;
            for (const auto& rows : slots) {
                const ResultRow& r = rows[mi];
                if (r.failed) {
                    ++failures;
                    continue;
                }
                nm.push_back(r.nmse);
                if (!std::isnan(r.psi_rmse)) pr.push_back(r.psi_rmse);
                if (!std::isnan(r.mu_rmse)) mr.push_back(r.mu_rmse);
                rt.push_back(r.runtime_ms);
            }
            if (failures == spec.trials) result.any_cell_all_failed = true;
            ResultRow s;
            s.method = method;
            s.snr_db = snr;
            s.k_t = cfg.k_t;
            s.k_s_v = cfg.k_s_v;
            s.k_s_h = cfg.k_s_h;
            s.trial = -1;
            s.seed = 0;
            s.nmse = detail::median_of(nm);
            s.psi_rmse = detail::median_of(pr);
            s.mu_rmse = detail::median_of(mr);
            s.runtime_ms = detail::median_of(rt);
            result.summary.push_back(std::move(s));
        }
        for (auto& rows : slots)
            for (auto& r : rows) result.detail.push_back(std::move(r));
    }

    result.csv = to_csv(result.detail, result.summary, spec.emit_timing);
    return result;
}

// ---------------------------------------------------------------------------
// Spec-file parsing (strict JSON: unknown keys are rejected).

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw SpecError("spec: unknown key '" + it.key() + "' in " + where);
    }
}

inline int require_int(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw SpecError("spec: missing key '" + std::string(key) + "' in " + where);
    if (!obj[key].is_number_integer()) throw SpecError("spec: '" + std::string(key) + "' must be an integer");
    return obj[key].get<int>();
}

inline GridMultipliers parse_multipliers(const nlohmann::json& obj, const std::string& where) {
    reject_unknown(obj, {"beta_t", "beta_r", "beta_s_v", "beta_s_h"}, where);
    GridMultipliers m;
    if (obj.contains("beta_t")) m.beta_t = obj["beta_t"].get<int>();
    if (obj.contains("beta_r")) m.beta_r = obj["beta_r"].get<int>();
    if (obj.contains("beta_s_v")) m.beta_s_v = obj["beta_s_v"].get<int>();
    if (obj.contains("beta_s_h")) m.beta_s_h = obj["beta_s_h"].get<int>();
    if (m.beta_t < 1 || m.beta_r < 1 || m.beta_s_v < 1 || m.beta_s_h < 1)
        throw SpecError("spec: grid multipliers must be >= 1 in " + where);
    return m;
}

}  // namespace detail

inline ExperimentSpec parse_spec(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError("spec: top level must be an object");
    detail::reject_unknown(j,
                           {"config", "methods", "grids", "snr_db", "sweep", "trials",
                            "master_seed", "threads", "emit_timing", "sampling"},
                           "top level");
    ExperimentSpec spec;

    if (!j.contains("config")) throw SpecError("spec: missing 'config'");
    const auto& jc = j["config"];
    detail::reject_unknown(
        jc, {"m_t", "m_r", "m_s_v", "m_s_h", "n_r", "k_t", "k_s_v", "k_s_h", "l_t", "l_r"},
        "config");
    spec.config.m_t = detail::require_int(jc, "m_t", "config");
    spec.config.m_r = detail::require_int(jc, "m_r", "config");
    spec.config.m_s_v = detail::require_int(jc, "m_s_v", "config");
    spec.config.m_s_h = detail::require_int(jc, "m_s_h", "config");
    spec.config.n_r = detail::require_int(jc, "n_r", "config");
    spec.config.k_t = detail::require_int(jc, "k_t", "config");
    spec.config.k_s_v = detail::require_int(jc, "k_s_v", "config");
    spec.config.k_s_h = detail::require_int(jc, "k_s_h", "config");
    spec.config.l_t = detail::require_int(jc, "l_t", "config");
    spec.config.l_r = detail::require_int(jc, "l_r", "config");
    try {
        spec.config.validate();
    } catch (const std::exception& e) {
        throw SpecError(std::string("spec: ") + e.what());
    }

    if (!j.contains("methods") || !j["methods"].is_array() || j["methods"].empty())
        throw SpecError("spec: 'methods' must be a non-empty array");
    for (const auto& m : j["methods"]) {
        const std::string name = m.get<std::string>();
        if (!detail::known_method(name)) throw SpecError("spec: unknown method '" + name + "'");
        spec.methods.push_back(name);
    }

    if (j.contains("grids")) {
        detail::reject_unknown(j["grids"], {"trice_cs", "joint_cs"}, "grids");
        if (j["grids"].contains("trice_cs"))
            spec.trice_cs_grids = detail::parse_multipliers(j["grids"]["trice_cs"], "grids.trice_cs");
        if (j["grids"].contains("joint_cs"))
            spec.joint_cs_grids = detail::parse_multipliers(j["grids"]["joint_cs"], "grids.joint_cs");
    }

    if (!j.contains("snr_db") || !j["snr_db"].is_array() || j["snr_db"].empty())
        throw SpecError("spec: 'snr_db' must be a non-empty array");
    for (const auto& s : j["snr_db"]) spec.snr_db.push_back(s.get<double>());

    if (j.contains("sweep")) {
        const auto& js = j["sweep"];
        detail::reject_unknown(js, {"axis", "values"}, "sweep");
        const std::string axis = js.contains("axis") ? js["axis"].get<std::string>() : "snr";
        if (axis == "snr") {
            spec.axis = SweepAxis::Snr;
            if (js.contains("values")) throw SpecError("spec: snr sweeps take values from 'snr_db'");
        } else if (axis == "k_t") {
            spec.axis = SweepAxis::Kt;
            if (!js.contains("values") || !js["values"].is_array() || js["values"].empty())
                throw SpecError("spec: k_t sweep needs a non-empty 'values' array");
            for (const auto& v : js["values"]) spec.k_t_values.push_back(v.get<int>());
        } else if (axis == "k_s") {
            spec.axis = SweepAxis::Ks;
            if (!js.contains("values") || !js["values"].is_array() || js["values"].empty())
                throw SpecError("spec: k_s sweep needs a non-empty 'values' array");
            for (const auto& v : js["values"]) {
                if (!v.is_array() || v.size() != 2)
                    throw SpecError("spec: k_s sweep values are [k_s_v, k_s_h] pairs");
                spec.k_s_values.emplace_back(v[0].get<int>(), v[1].get<int>());
            }
        } else {
            throw SpecError("spec: unknown sweep axis '" + axis + "'");
        }
    }

    if (!j.contains("trials")) throw SpecError("spec: missing 'trials'");
    spec.trials = j["trials"].get<int>();
    if (spec.trials < 1) throw SpecError("spec: trials must be >= 1");

    if (!j.contains("master_seed")) throw SpecError("spec: missing 'master_seed'");
    spec.master_seed = j["master_seed"].get<std::uint64_t>();

    if (j.contains("sampling")) {
        const auto& js = j["sampling"];
        detail::reject_unknown(js, {"k_t", "k_s_v", "k_s_h"}, "sampling");
        if (js.contains("k_t")) spec.sampling_k_t = js["k_t"].get<int>();
        if (js.contains("k_s_v")) spec.sampling_k_s_v = js["k_s_v"].get<int>();
        if (js.contains("k_s_h")) spec.sampling_k_s_h = js["k_s_h"].get<int>();
    }

    if (j.contains("threads")) spec.threads = j["threads"].get<int>();
    if (j.contains("emit_timing")) spec.emit_timing = j["emit_timing"].get<bool>();
    return spec;
}

}  // namespace trice

#endif  // TRICE_HARNESS_HPP
