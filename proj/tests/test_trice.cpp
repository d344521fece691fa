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

#include <algorithm>

#include <catch2/catch.hpp>

#include "test_helpers.hpp"
#include "trice/trice.hpp"

using namespace trice;
using testing::max_abs_diff;
using testing::random_cmatrix;

namespace {

struct Instance {
    SystemConfig cfg;
    TrainingSet train;
    ChannelParams params;
    ChannelSet channels;
    CMatrix y0;
};

Instance noiseless_instance(std::uint64_t seed, bool on_grid) {
    Instance inst;
    inst.cfg = SystemConfig{};
    inst.train = build_training(inst.cfg);
    Rng rng(seed);
    if (on_grid)
        inst.params =
            testing::resolvable_on_grid_paths(inst.cfg, default_grids(inst.cfg), inst.train, rng);
    else
        inst.params = sample_paths(inst.cfg, rng);
    inst.channels = realize(inst.cfg, inst.params);
    inst.y0 = synthesize(inst.cfg, inst.channels, inst.train);
    return inst;
}

CMatrix truth_a_hat(const Instance& inst) {
    RVector psi_t(inst.cfg.l()), psi_r(inst.cfg.l());
    for (int i = 0; i < inst.cfg.l_t; ++i)
        for (int k = 0; k < inst.cfg.l_r; ++k) {
            psi_t(i * inst.cfg.l_r + k) = inst.params.psi_t(i);
            psi_r(i * inst.cfg.l_r + k) = inst.params.psi_r(k);
        }
    return detail::assemble_a_hat(psi_t, psi_r, inst.train, inst.cfg);
}

}  // namespace

TEST_CASE("ls_estimate exact recovery at full training") {
    SystemConfig cfg;
    cfg.m_t = 4;
    cfg.m_r = 2;
    cfg.m_s_v = 2;
    cfg.m_s_h = 2;
    cfg.n_r = 2;
    cfg.k_t = 4;
    cfg.k_s_v = 2;
    cfg.k_s_h = 2;
    cfg.l_t = 2;
    cfg.l_r = 2;
    // k_t * k_s = 16 >= m_r * m_t * m_s / n_r = 32 / 2
    REQUIRE(cfg.k_t * cfg.k_s() >= cfg.m_r * cfg.m_t * cfg.m_s() / cfg.n_r);

    const TrainingSet tr = build_training(cfg);
    Rng rng(3);
    const ChannelParams p = sample_paths(cfg, rng);
    const ChannelSet ch = realize(cfg, p);
    const CMatrix y0 = synthesize(cfg, ch, tr);
    const CMatrix h_hat = ls_estimate(y0, tr, cfg);
    REQUIRE(nmse(ch.h, h_hat) < 1e-18);
}

TEST_CASE("ls_estimate factored path equals the dense pseudo-inverse") {
    SystemConfig cfg;
    cfg.m_t = 4;
    cfg.m_r = 2;
    cfg.m_s_v = 2;
    cfg.m_s_h = 2;
    cfg.n_r = 2;
    cfg.k_t = 3;
    cfg.k_s_v = 2;
    cfg.k_s_h = 2;
    const TrainingSet tr = build_training(cfg);
    Rng rng(5);
    const CMatrix y = random_cmatrix(cfg.n_r * cfg.k_t, cfg.k_s(), rng);
    LsOptions dense;
    dense.force_dense = true;
    REQUIRE(max_abs_diff(ls_estimate(y, tr, cfg), ls_estimate(y, tr, cfg, dense)) < 1e-12);
}

TEST_CASE("ls_estimate contracts") {
    const SystemConfig cfg;
    const TrainingSet tr = build_training(cfg);

    SECTION("zero observation gives the zero channel") {
        REQUIRE(ls_estimate(CMatrix::Zero(cfg.n_r * cfg.k_t, cfg.k_s()), tr, cfg).norm() == 0.0);
    }

    SECTION("undersampled training still reports a finite estimate") {
        Rng rng(7);
        const ChannelParams p = sample_paths(cfg, rng);
        const ChannelSet ch = realize(cfg, p);
        const CMatrix y0 = synthesize(cfg, ch, tr);
        const CMatrix h_hat = ls_estimate(y0, tr, cfg);
        const double err = nmse(ch.h, h_hat);
        REQUIRE(std::isfinite(err));
    }

    SECTION("dense guard rejects oversized sensing matrices") {
        Rng rng(9);
        const CMatrix y = random_cmatrix(cfg.n_r * cfg.k_t, cfg.k_s(), rng);
        LsOptions opt;
        opt.force_dense = true;
        opt.dense_entry_cap = 10;
        REQUIRE_THROWS_AS(ls_estimate(y, tr, cfg, opt), std::invalid_argument);
    }
}

TEST_CASE("stage1 recovers frequencies with both solvers") {
    const Instance cs_inst = noiseless_instance(11, /*on_grid=*/true);
    const auto grids = default_grids(cs_inst.cfg);
    const Stage1Result cs = stage1(cs_inst.y0, cs_inst.train, cs_inst.cfg, StageSolver::Cs, grids);

    std::vector<std::pair<double, double>> truth;
    for (int i = 0; i < cs_inst.cfg.l_t; ++i)
        for (int k = 0; k < cs_inst.cfg.l_r; ++k)
            truth.emplace_back(cs_inst.params.psi_t(i), cs_inst.params.psi_r(k));
    std::sort(truth.begin(), truth.end());
    for (int n = 0; n < cs_inst.cfg.l(); ++n) {
        REQUIRE(cs.psi_t(n) == Approx(truth[n].first).margin(1e-12));
        REQUIRE(cs.psi_r(n) == Approx(truth[n].second).margin(1e-12));
    }

    const Instance bes_inst = noiseless_instance(13, /*on_grid=*/false);
    const Stage1Result bes = stage1(bes_inst.y0, bes_inst.train, bes_inst.cfg, StageSolver::Bes);
    truth.clear();
    for (int i = 0; i < bes_inst.cfg.l_t; ++i)
        for (int k = 0; k < bes_inst.cfg.l_r; ++k)
            truth.emplace_back(bes_inst.params.psi_t(i), bes_inst.params.psi_r(k));
    std::vector<std::pair<double, double>> est;
    for (int n = 0; n < bes_inst.cfg.l(); ++n) est.emplace_back(bes.psi_t(n), bes.psi_r(n));
    REQUIRE(testing::match_pairs_max_dev(truth, est) < 1e-7);
}

TEST_CASE("stage1 solvers agree at high snr within one grid cell") {
    Instance inst;
    inst.cfg = SystemConfig{};
    inst.train = build_training(inst.cfg);
    Rng draw(17);
    inst.params = testing::resolvable_paths(inst.cfg, inst.train, draw);
    inst.channels = realize(inst.cfg, inst.params);
    inst.y0 = synthesize(inst.cfg, inst.channels, inst.train);
    Rng rng(18);
    const MeasurementBlock block = add_noise(inst.y0, 40.0, rng);
    const auto grids = default_grids(inst.cfg);
    const Stage1Result cs = stage1(block.y, inst.train, inst.cfg, StageSolver::Cs, grids);
    const Stage1Result bes = stage1(block.y, inst.train, inst.cfg, StageSolver::Bes);
    const double cell_t = (grids.psi_t.hi - grids.psi_t.lo) / grids.psi_t.points.size();
    const double cell_r = (grids.psi_r.hi - grids.psi_r.lo) / grids.psi_r.points.size();
    // per-dimension set comparison: sorted frequency lists stay within one
    // grid cell of each other
    std::vector<double> cs_t, cs_r, bes_t, bes_r;
    for (int n = 0; n < inst.cfg.l(); ++n) {
        cs_t.push_back(cs.psi_t(n));
        cs_r.push_back(cs.psi_r(n));
        bes_t.push_back(bes.psi_t(n));
        bes_r.push_back(bes.psi_r(n));
    }
    std::sort(cs_t.begin(), cs_t.end());
    std::sort(cs_r.begin(), cs_r.end());
    std::sort(bes_t.begin(), bes_t.end());
    std::sort(bes_r.begin(), bes_r.end());
    for (int n = 0; n < inst.cfg.l(); ++n) {
        REQUIRE(std::abs(cs_t[n] - bes_t[n]) <= cell_t + 1e-9);
        REQUIRE(std::abs(cs_r[n] - bes_r[n]) <= cell_r + 1e-9);
    }
}

TEST_CASE("project") {
    const Instance inst = noiseless_instance(19, /*on_grid=*/false);
    const CMatrix a_hat = truth_a_hat(inst);

    SECTION("ground-truth projection matches the mixing model") {
        const CMatrix ybar = project(inst.y0, a_hat);
        // oracle: G * B * Q built directly from the generative parameters
        CMatrix b_eff(inst.cfg.l(), inst.cfg.m_s());
        for (int n = 0; n < inst.cfg.l(); ++n)
            b_eff.row(n) = steering_2d(inst.channels.mu_v_eff(n), inst.channels.mu_h_eff(n),
                                       inst.cfg.m_s_v, inst.cfg.m_s_h)
                               .transpose();
        const CMatrix oracle = inst.channels.alpha_eff.asDiagonal() * b_eff * inst.train.q;
        REQUIRE(max_abs_diff(ybar, oracle) < 1e-10);
    }

    SECTION("orthonormal columns reduce the projection to the adjoint") {
        Rng rng(21);
        const CMatrix q =
            Eigen::HouseholderQR<CMatrix>(random_cmatrix(inst.y0.rows(), 3, rng))
                .householderQ() *
            CMatrix::Identity(inst.y0.rows(), 3);
        REQUIRE(max_abs_diff(project(inst.y0, q), CMatrix(q.adjoint() * inst.y0)) < 1e-12);
    }

    SECTION("duplicated path is rejected") {
        CMatrix dup = a_hat;
        dup.col(1) = dup.col(0);
        REQUIRE_THROWS_AS(project(inst.y0, dup), RankError);
    }
}

TEST_CASE("stage2 noiseless recovery and contracts") {
    const Instance inst = noiseless_instance(23, /*on_grid=*/false);
    const CMatrix ybar = project(inst.y0, truth_a_hat(inst));

    SECTION("beamspace solver recovers frequencies and gains") {
        const Stage2Result s2 = stage2(ybar, inst.train, inst.cfg, StageSolver::Bes);
        // stage-1 ordering here is the generative one: n = i*l_r + k
        for (int i = 0; i < inst.cfg.l_t; ++i)
            for (int k = 0; k < inst.cfg.l_r; ++k) {
                const int n = i * inst.cfg.l_r + k;
                REQUIRE(std::abs(s2.mu_v(n) - inst.channels.mu_v_eff(n)) < 1e-8);
                REQUIRE(std::abs(s2.mu_h(n) - inst.channels.mu_h_eff(n)) < 1e-8);
                REQUIRE(std::abs(s2.alpha(n) - inst.channels.alpha_eff(n)) < 1e-8);
            }
    }

    SECTION("zero projected path is rejected") {
        CMatrix bad = ybar;
        bad.row(2).setZero();
        REQUIRE_THROWS_AS(stage2(bad, inst.train, inst.cfg, StageSolver::Bes),
                          std::invalid_argument);
    }

    SECTION("row permutation permutes outputs positionally") {
        CMatrix perm = ybar;
        perm.row(0) = ybar.row(3);
        perm.row(3) = ybar.row(0);
        const Stage2Result a = stage2(ybar, inst.train, inst.cfg, StageSolver::Bes);
        const Stage2Result b = stage2(perm, inst.train, inst.cfg, StageSolver::Bes);
        REQUIRE(std::abs(a.mu_v(0) - b.mu_v(3)) < 1e-12);
        REQUIRE(std::abs(a.mu_v(3) - b.mu_v(0)) < 1e-12);
        REQUIRE(std::abs(a.mu_v(1) - b.mu_v(1)) < 1e-12);
    }
}

TEST_CASE("estimate_gain") {
    const SystemConfig cfg;
    const TrainingSet tr = build_training(cfg);
    const double mu_v = 0.9, mu_h = 1.3;
    const Complex alpha(1.2, -0.7);
    const CVector atom = tr.q.transpose() * steering_2d(mu_v, mu_h, cfg.m_s_v, cfg.m_s_h);
    const CVector y_n = atom * alpha;

    REQUIRE(std::abs(estimate_gain(y_n, mu_v, mu_h, tr.q_v, tr.q_h) - alpha) < 1e-12);

    // linear in the observation
    const Complex c(0.4, 2.2);
    REQUIRE(std::abs(estimate_gain(CVector(y_n * c), mu_v, mu_h, tr.q_v, tr.q_h) - alpha * c) <
            1e-12);

    // one fine grid cell of frequency mismatch biases the magnitude low
    const auto grids = default_grids(cfg, GridMultipliers{1, 1, 8, 8});
    const double cell = (grids.mu_v.hi - grids.mu_v.lo) / grids.mu_v.points.size();
    const Complex biased = estimate_gain(y_n, mu_v + cell, mu_h, tr.q_v, tr.q_h);
    REQUIRE(std::abs(biased) <= std::abs(alpha) * 1.0 + 0.05);
}

TEST_CASE("reconstruct") {
    const Instance inst = noiseless_instance(29, /*on_grid=*/false);

    SECTION("true parameters reproduce the channel") {
        Stage1Result s1;
        s1.psi_t.resize(inst.cfg.l());
        s1.psi_r.resize(inst.cfg.l());
        Stage2Result s2;
        s2.mu_v.resize(inst.cfg.l());
        s2.mu_h.resize(inst.cfg.l());
        s2.alpha.resize(inst.cfg.l());
        for (int i = 0; i < inst.cfg.l_t; ++i)
            for (int k = 0; k < inst.cfg.l_r; ++k) {
                const int n = i * inst.cfg.l_r + k;
                s1.psi_t(n) = inst.params.psi_t(i);
                s1.psi_r(n) = inst.params.psi_r(k);
                s2.mu_v(n) = inst.channels.mu_v_eff(n);
                s2.mu_h(n) = inst.channels.mu_h_eff(n);
                s2.alpha(n) = inst.channels.alpha_eff(n);
            }
        REQUIRE(max_abs_diff(reconstruct(s1, s2, inst.cfg), inst.channels.h) < 1e-10);
    }

    SECTION("zero gains give the zero matrix, one path gives rank one") {
        Stage1Result s1;
        s1.psi_t = RVector::Constant(1, 0.3);
        s1.psi_r = RVector::Constant(1, 0.5);
        Stage2Result s2;
        s2.mu_v = RVector::Constant(1, 0.2);
        s2.mu_h = RVector::Constant(1, 0.1);
        s2.alpha = CVector::Zero(1);
        REQUIRE(reconstruct(s1, s2, inst.cfg).norm() == 0.0);

        s2.alpha = CVector::Ones(1);
        const CMatrix h1 = reconstruct(s1, s2, inst.cfg);
        REQUIRE(numerical_rank(h1) == 1);
    }
}

TEST_CASE("lskrf") {
    const SystemConfig cfg;
    Rng rng(31);

    SECTION("exact Khatri-Rao input reconstructs and respects the gauge") {
        const CMatrix h_t = random_cmatrix(cfg.m_s(), cfg.m_t, rng);
        const CMatrix h_r = random_cmatrix(cfg.m_r, cfg.m_s(), rng);
        const CMatrix h = khatri_rao(CMatrix(h_t.transpose()), h_r);
        const auto [h_t_hat, h_r_hat] = lskrf(h, cfg);
        REQUIRE(max_abs_diff(khatri_rao(CMatrix(h_t_hat.transpose()), h_r_hat), h) < 1e-10);
        for (Index m = 0; m < cfg.m_s(); ++m) {
            REQUIRE(h_t_hat.row(m).norm() == Approx(1.0).epsilon(1e-12));
            REQUIRE(std::abs(std::imag(h_t_hat(m, 0))) < 1e-12);
            REQUIRE(std::real(h_t_hat(m, 0)) >= -1e-12);
        }
    }

    SECTION("noisy input stays within the per-column rank-1 truncation error") {
        const CMatrix h_t = random_cmatrix(cfg.m_s(), cfg.m_t, rng);
        const CMatrix h_r = random_cmatrix(cfg.m_r, cfg.m_s(), rng);
        CMatrix h = khatri_rao(CMatrix(h_t.transpose()), h_r);
        h += 0.05 * random_cmatrix(h.rows(), h.cols(), rng);

        double truncation2 = 0.0;
        for (Index m = 0; m < h.cols(); ++m) {
            const CMatrix slab = unvec(h.col(m), cfg.m_r, cfg.m_t);
            const Rank1 r1 = rank1_approx(slab);
            truncation2 += (slab - r1.s * r1.u * r1.v.adjoint()).squaredNorm();
        }
        const auto [h_t_hat, h_r_hat] = lskrf(h, cfg);
        const double err =
            (khatri_rao(CMatrix(h_t_hat.transpose()), h_r_hat) - h).norm();
        REQUIRE(err <= std::sqrt(truncation2) + 1e-9);
    }
}

TEST_CASE("run_trice end to end, noiseless") {
    SECTION("on-grid CS pipeline") {
        const Instance inst = noiseless_instance(37, /*on_grid=*/true);
        const auto rep = run_trice(inst.y0, inst.train, inst.cfg, StageSolver::Cs,
                                   default_grids(inst.cfg));
        REQUIRE(nmse(inst.channels.h, rep.h_hat) < 1e-9);
        REQUIRE(rep.h_t_hat.rows() == inst.cfg.m_s());
    }

    SECTION("in-sector beamspace pipeline") {
        const Instance inst = noiseless_instance(41, /*on_grid=*/false);
        const auto rep = run_trice(inst.y0, inst.train, inst.cfg, StageSolver::Bes);
        REQUIRE(nmse(inst.channels.h, rep.h_hat) < 1e-7);
    }

    SECTION("deterministic given identical inputs") {
        const Instance inst = noiseless_instance(43, /*on_grid=*/false);
        const auto a = run_trice(inst.y0, inst.train, inst.cfg, StageSolver::Bes);
        const auto b = run_trice(inst.y0, inst.train, inst.cfg, StageSolver::Bes);
        REQUIRE(max_abs_diff(a.h_hat, b.h_hat) == 0.0);
    }

    SECTION("invalid beamspace config is refused up front") {
        Instance inst = noiseless_instance(47, /*on_grid=*/false);
        SystemConfig bad = inst.cfg;
        bad.k_t = 2;  // fails k_t >= l_t + 1
        REQUIRE_THROWS_AS(
            run_trice(inst.y0.topRows(bad.n_r * bad.k_t), build_training(bad), bad,
                      StageSolver::Bes),
            std::invalid_argument);
    }
}

TEST_CASE("run_trice noise monotonicity across 20 dB") {
    const SystemConfig cfg;
    const TrainingSet tr = build_training(cfg);
    std::vector<double> low, high;
    Rng rng(53);
    for (int trial = 0; trial < 40; ++trial) {
        const ChannelParams p = sample_paths(cfg, rng);
        const ChannelSet ch = realize(cfg, p);
        const CMatrix y0 = synthesize(cfg, ch, tr);
        Rng noise_a(1000 + trial), noise_b(1000 + trial);
        const MeasurementBlock at0 = add_noise(y0, 0.0, noise_a);
        const MeasurementBlock at20 = add_noise(y0, 20.0, noise_b);
        low.push_back(nmse(ch.h, run_trice(at0.y, tr, cfg, StageSolver::Bes).h_hat));
        high.push_back(nmse(ch.h, run_trice(at20.y, tr, cfg, StageSolver::Bes).h_hat));
    }
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());
    REQUIRE(high[high.size() / 2] < low[low.size() / 2]);
}

TEST_CASE("run_joint_cs") {
    SECTION("single on-grid path is found exactly") {
        SystemConfig cfg;
        cfg.l_t = 1;
        cfg.l_r = 1;
        const TrainingSet tr = build_training(cfg);
        const auto grids = default_grids(cfg);
        Rng rng(59);
        const ChannelParams p = testing::resolvable_on_grid_paths(cfg, grids, tr, rng);
        const ChannelSet ch = realize(cfg, p);
        const CMatrix y0 = synthesize(cfg, ch, tr);
        const auto rep = run_joint_cs(y0, tr, cfg, grids);
        REQUIRE(nmse(ch.h, rep.h_hat) < 1e-9);
        REQUIRE(rep.stage1->psi_t(0) == Approx(p.psi_t(0)).margin(1e-12));
        REQUIRE(rep.stage2->mu_v(0) == Approx(ch.mu_v_eff(0)).margin(1e-12));

        // exhaustive correlation scan oracle over all atoms
        const Dictionary d = dict_joint4d(tr.f, tr.w, tr.q_v, tr.q_h, grids.psi_t, grids.psi_r,
                                          grids.mu_v, grids.mu_h);
        const CVector yv = vec(y0);
        Index best = -1;
        double best_val = -1.0;
        for (Index i = 0; i < d.atom_count(); ++i) {
            const double v = std::abs(d.atom(i).dot(yv)) / d.atom_norm(i);
            if (v > best_val) {
                best_val = v;
                best = i;
            }
        }
        const auto lab = d.label(best);  // (mu_v, mu_h, psi_t, psi_r)
        REQUIRE(lab[2] == Approx(p.psi_t(0)).margin(1e-12));
        REQUIRE(lab[3] == Approx(p.psi_r(0)).margin(1e-12));
        REQUIRE(lab[0] == Approx(ch.mu_v_eff(0)).margin(1e-12));
        REQUIRE(lab[1] == Approx(ch.mu_h_eff(0)).margin(1e-12));
    }

    SECTION("zero observation yields a zero-gain report") {
        const SystemConfig cfg;
        const TrainingSet tr = build_training(cfg);
        const auto grids = default_grids(cfg);
        const CMatrix y = CMatrix::Zero(cfg.n_r * cfg.k_t, cfg.k_s());
        const auto rep = run_joint_cs(y, tr, cfg, grids);
        REQUIRE(rep.h_hat.norm() == 0.0);
        REQUIRE(rep.stage2->alpha.norm() == 0.0);
    }

    SECTION("matches trice-cs within 10x at high snr on shared grids") {
        const Instance inst = noiseless_instance(61, /*on_grid=*/false);
        Rng rng(62);
        const MeasurementBlock block = add_noise(inst.y0, 30.0, rng);
        const auto grids = default_grids(inst.cfg);
        const auto joint = run_joint_cs(block.y, inst.train, inst.cfg, grids);
        const auto two_stage =
            run_trice(block.y, inst.train, inst.cfg, StageSolver::Cs, grids);
        const double nj = nmse(inst.channels.h, joint.h_hat);
        const double nt = nmse(inst.channels.h, two_stage.h_hat);
        REQUIRE(nt <= 10.0 * nj);
        REQUIRE(nj <= 10.0 * nt);
    }
}

TEST_CASE("full-size arrays run the pipeline exactly") {
    // the reference dimensions: 64/32 antennas, 16x16 surface
    SystemConfig cfg;
    cfg.m_t = 64;
    cfg.m_r = 32;
    cfg.m_s_v = 16;
    cfg.m_s_h = 16;
    cfg.n_r = 8;
    cfg.k_t = 8;
    cfg.k_s_v = 4;
    cfg.k_s_h = 4;
    const TrainingSet tr = build_training(cfg);

    SECTION("beamspace, in-sector draws") {
        Rng rng(71);
        const ChannelParams p = sample_paths(cfg, rng);
        const ChannelSet ch = realize(cfg, p);
        const CMatrix y0 = synthesize(cfg, ch, tr);
        const auto rep = run_trice(y0, tr, cfg, StageSolver::Bes);
        REQUIRE(nmse(ch.h, rep.h_hat) < 1e-7);
    }

    SECTION("sparse recovery, on-grid draws") {
        const auto grids = default_grids(cfg);
        Rng rng(73);
        const ChannelParams p = testing::resolvable_on_grid_paths(cfg, grids, tr, rng);
        const ChannelSet ch = realize(cfg, p);
        const CMatrix y0 = synthesize(cfg, ch, tr);
        const auto rep = run_trice(y0, tr, cfg, StageSolver::Cs, grids);
        REQUIRE(nmse(ch.h, rep.h_hat) < 1e-9);
    }
}

TEST_CASE("perturbing one projected path only moves its own output") {
    const Instance inst = noiseless_instance(67, /*on_grid=*/false);
    const CMatrix ybar = project(inst.y0, truth_a_hat(inst));
    CMatrix bumped = ybar;
    bumped.row(2) *= Complex(1.1, 0.05);

    const Stage2Result a = stage2(ybar, inst.train, inst.cfg, StageSolver::Bes);
    const Stage2Result b = stage2(bumped, inst.train, inst.cfg, StageSolver::Bes);
    for (int n = 0; n < inst.cfg.l(); ++n) {
        REQUIRE(std::abs(a.mu_v(n) - b.mu_v(n)) < 1e-9);  // scale invariant per path
        if (n != 2) REQUIRE(std::abs(a.alpha(n) - b.alpha(n)) < 1e-12);
    }
    REQUIRE(std::abs(a.alpha(2) - b.alpha(2)) > 1e-3);
}
