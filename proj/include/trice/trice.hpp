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

#ifndef TRICE_TRICE_HPP
#define TRICE_TRICE_HPP

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trice/chanmodel.hpp"
#include "trice/espritkit.hpp"
#include "trice/numkit.hpp"
#include "trice/sensing.hpp"
#include "trice/sparsekit.hpp"
#include "trice/training.hpp"

namespace trice {

enum class StageSolver { Bes, Cs };

/// Frequency grids of the CS stages, each covering the visible sector of
/// the corresponding training beams.
struct StageGrids {
    Grid psi_t;
    Grid psi_r;
    Grid mu_v;
    Grid mu_h;
};

/// Grids with beta * M points per axis over the visible sectors implied by
/// the training row selection.
inline StageGrids default_grids(const SystemConfig& cfg, const GridMultipliers& mult = {}) {
    cfg.validate();
    if (cfg.n_r < 2 || cfg.k_t < 2 || cfg.k_s_v < 2 || cfg.k_s_h < 2)
        throw std::invalid_argument("default_grids: a training dimension of 1 leaves an empty sector");
    StageGrids g;
    g.psi_t = make_grid(0.0, kTwoPi * (cfg.k_t - 1) / cfg.m_t, mult.beta_t * cfg.m_t);
    g.psi_r = make_grid(0.0, kTwoPi * (cfg.n_r - 1) / cfg.m_r, mult.beta_r * cfg.m_r);
    g.mu_v = make_grid(0.0, kTwoPi * (cfg.k_s_v - 1) / cfg.m_s_v, mult.beta_s_v * cfg.m_s_v);
    g.mu_h = make_grid(0.0, kTwoPi * (cfg.k_s_h - 1) / cfg.m_s_h, mult.beta_s_h * cfg.m_s_h);
    return g;
}

/// First-stage output: per-path transmit/receive frequency estimates (index
/// aligned) and the reconstructed beamspace steering product matrix with
/// column n = kron(f^T v(psi_t_n), w^T v(psi_r_n)).
struct Stage1Result {
    RVector psi_t;  // [l]
    RVector psi_r;  // [l]
    CMatrix a_hat;  // (n_r*k_t) x l
};

/// Second-stage output, index-aligned with Stage1Result.
struct Stage2Result {
    RVector mu_v;   // [l]
    RVector mu_h;   // [l]
    CVector alpha;  // [l]
};

struct EstimateReport {
    std::string method;
    CMatrix h_hat;
    CMatrix h_t_hat;  // empty unless factor recovery ran
    CMatrix h_r_hat;
    std::optional<Stage1Result> stage1;
    std::optional<Stage2Result> stage2;
    double wall_ms = 0.0;
    std::vector<std::string> warnings;
};

struct LsOptions {
    bool force_dense = false;            // materialize the full sensing matrix
    Index dense_entry_cap = Index(1) << 26;
};

/// Least-squares baseline: pseudo-inverse of the full vectorized sensing
/// operator kron(q^T, kron(f^T, w^T)) applied to vec(y).
///
/// The default path evaluates the same operator through the factor
/// identity pinv(A kron B) = pinv(A) kron pinv(B), which avoids forming
/// the sensing matrix; force_dense materializes it (guarded by
/// dense_entry_cap) for cross-checking.
inline CMatrix ls_estimate(const CMatrix& y, const TrainingSet& train, const SystemConfig& cfg,
                           const LsOptions& opt = {}) {
    cfg.validate();
    if (y.rows() != static_cast<Index>(cfg.n_r) * cfg.k_t || y.cols() != cfg.k_s())
        throw std::invalid_argument("ls_estimate: observation shape mismatch");
    const Index rows = static_cast<Index>(cfg.m_t) * cfg.m_r;
    const Index cols = cfg.m_s();
    if (opt.force_dense) {
        const Index entries = y.size() * rows * cols;
        if (entries > opt.dense_entry_cap)
            throw std::invalid_argument("ls_estimate: dense sensing matrix would hold " +
                                        std::to_string(entries) + " entries, cap " +
                                        std::to_string(opt.dense_entry_cap));
        const CMatrix upsilon =
            kron(train.q.transpose(), kron(train.f.transpose(), train.w.transpose()));
        return unvec(pinv(upsilon) * vec(y), rows, cols);
    }
    const CMatrix left = kron(pinv(CMatrix(train.f.transpose())), pinv(CMatrix(train.w.transpose())));
    const CMatrix right = kron(pinv(CMatrix(train.q_v.transpose())), pinv(CMatrix(train.q_h.transpose())));
    return left * y * right.transpose();
}

namespace detail {

inline CMatrix assemble_a_hat(const RVector& psi_t, const RVector& psi_r, const TrainingSet& train,
                              const SystemConfig& cfg) {
    CMatrix a_hat(static_cast<Index>(cfg.n_r) * cfg.k_t, psi_t.size());
    for (Index n = 0; n < psi_t.size(); ++n) {
        const CVector bt = train.f.transpose() * steering_1d(psi_t(n), cfg.m_t);
        const CVector br = train.w.transpose() * steering_1d(psi_r(n), cfg.m_r);
        a_hat.col(n) = kron(CMatrix(bt), CMatrix(br)).col(0);
    }
    return a_hat;
}

// Sort paths by (psi_t, psi_r, ...) and apply the permutation to every
// aligned array.
inline std::vector<Index> lex_order(const std::vector<std::vector<double>>& keys) {
    std::vector<Index> idx(keys.size());
    std::iota(idx.begin(), idx.end(), Index(0));
    std::sort(idx.begin(), idx.end(),
              [&keys](Index a, Index b) { return keys[a] < keys[b]; });
    return idx;
}

}  // namespace detail

/// Stage 1: estimate the per-path transmit/receive frequencies from the
/// received block, via beamspace shift invariance (Bes) or simultaneous OMP
/// on the stage-1 dictionary (Cs). A prebuilt dictionary (from the same
/// training set and grids) can be passed to amortize construction across
/// trials.
inline Stage1Result stage1(const CMatrix& y, const TrainingSet& train, const SystemConfig& cfg,
                           StageSolver solver, const std::optional<StageGrids>& grids = std::nullopt,
                           std::vector<std::string>* warnings = nullptr,
                           const Dictionary* prebuilt = nullptr) {
    const int l = cfg.l();
    Stage1Result res;
    res.psi_t.resize(l);
    res.psi_r.resize(l);
    if (solver == StageSolver::Bes) {
        const auto pairs = esprit_2d_stage1(y, cfg, warnings);
        for (int n = 0; n < l; ++n) {
            res.psi_t(n) = pairs[n].psi_t;
            res.psi_r(n) = pairs[n].psi_r;
        }
    } else {
        if (!grids && !prebuilt) throw std::invalid_argument("stage1: CS solver needs grids");
        std::optional<Dictionary> own;
        if (!prebuilt) own.emplace(dict_stage1(train.f, train.w, grids->psi_t, grids->psi_r));
        const Dictionary& dict = prebuilt ? *prebuilt : *own;
        const SompResult picks = somp(dict, y, l);
        std::vector<std::vector<double>> keys;
        keys.reserve(picks.support.size());
        for (Index s : picks.support) keys.push_back(dict.label(s));
        const auto order = detail::lex_order(keys);
        for (int n = 0; n < l; ++n) {
            res.psi_t(n) = keys[order[n]][0];
            res.psi_r(n) = keys[order[n]][1];
        }
    }
    res.a_hat = detail::assemble_a_hat(res.psi_t, res.psi_r, train, cfg);
    return res;
}

/// Project the received block onto the estimated steering products:
/// ybar = pinv(a_hat) * y. With exact frequencies and no noise this equals
/// the per-path mixing matrix times the surface training block. Requires
/// a_hat to have full column rank (checked at tolerance 1e-8).
inline CMatrix project(const CMatrix& y, const CMatrix& a_hat) {
    if (a_hat.rows() != y.rows()) throw std::invalid_argument("project: shape mismatch");
    if (numerical_rank(a_hat, 1e-8) < a_hat.cols())
        throw RankError("project: steering product matrix is rank deficient");
    return pinv(a_hat) * y;
}

/// Per-path gain by scalar least squares against the stage-2 atom at the
/// estimated frequencies.
inline Complex estimate_gain(const CVector& y_n, double mu_v_hat, double mu_h_hat,
                             const CMatrix& q_v, const CMatrix& q_h) {
    const CVector bv = q_v.transpose() * steering_1d(mu_v_hat, static_cast<int>(q_v.rows()));
    const CVector bh = q_h.transpose() * steering_1d(mu_h_hat, static_cast<int>(q_h.rows()));
    const CVector atom = kron(CMatrix(bv), CMatrix(bh)).col(0);
    const double norm2 = atom.squaredNorm();
    if (norm2 <= 0.0) throw std::invalid_argument("estimate_gain: zero atom");
    if (y_n.size() != atom.size()) throw std::invalid_argument("estimate_gain: length mismatch");
    return atom.dot(y_n) / norm2;
}

/// Stage 2: per projected path, estimate the effective surface frequencies
/// (rank-1 beamspace solve or sparsity-1 OMP on the stage-2 dictionary) and
/// the path gain. Output index n corresponds to row n of ybar, keeping the
/// pairing with stage 1 positional.
inline Stage2Result stage2(const CMatrix& ybar, const TrainingSet& train, const SystemConfig& cfg,
                           StageSolver solver, const std::optional<StageGrids>& grids = std::nullopt,
                           std::vector<std::string>* warnings = nullptr,
                           const Dictionary* prebuilt = nullptr) {
    if (ybar.cols() != cfg.k_s()) throw std::invalid_argument("stage2: shape mismatch");
    const Index l = ybar.rows();
    std::optional<Dictionary> own;
    const Dictionary* dict = prebuilt;
    if (solver == StageSolver::Cs && !dict) {
        if (!grids) throw std::invalid_argument("stage2: CS solver needs grids");
        own.emplace(dict_stage2(train.q_v, train.q_h, grids->mu_v, grids->mu_h));
        dict = &*own;
    }
    Stage2Result res;
    res.mu_v.resize(l);
    res.mu_h.resize(l);
    res.alpha.resize(l);
    for (Index n = 0; n < l; ++n) {
        const CVector y_n = ybar.row(n).transpose();
        if (y_n.norm() <= 0.0)
            throw std::invalid_argument("stage2: projected path " + std::to_string(n) + " is zero");
        if (solver == StageSolver::Bes) {
            const auto [mu_v, mu_h] = esprit_2d_stage2(y_n, cfg, warnings);
            res.mu_v(n) = mu_v;
            res.mu_h(n) = mu_h;
        } else {
            const OmpResult pick = omp(*dict, y_n, 1);
            const auto lab = dict->label(pick.support[0]);
            res.mu_v(n) = lab[0];
            res.mu_h(n) = lab[1];
        }
        res.alpha(n) = estimate_gain(y_n, res.mu_v(n), res.mu_h(n), train.q_v, train.q_h);
    }
    return res;
}

/// Rebuild the cascaded channel from the estimated per-path parameters:
/// column n of the steering product is kron(v(psi_t_n), v(psi_r_n)), the
/// gain matrix is diag(alpha), and the surface side is the transposed
/// column-wise Kronecker of the effective steering banks.
inline CMatrix reconstruct(const Stage1Result& s1, const Stage2Result& s2, const SystemConfig& cfg) {
    const Index l = s1.psi_t.size();
    if (s2.mu_v.size() != l || s2.alpha.size() != l)
        throw std::invalid_argument("reconstruct: stage results disagree on path count");
    CMatrix h_hat = CMatrix::Zero(static_cast<Index>(cfg.m_t) * cfg.m_r, cfg.m_s());
    for (Index n = 0; n < l; ++n) {
        const CVector left = kron(CMatrix(steering_1d(s1.psi_t(n), cfg.m_t)),
                                  CMatrix(steering_1d(s1.psi_r(n), cfg.m_r)))
                                 .col(0);
        const CVector b_n = steering_2d(s2.mu_v(n), s2.mu_h(n), cfg.m_s_v, cfg.m_s_h);
        h_hat.noalias() += s2.alpha(n) * left * b_n.transpose();
    }
    return h_hat;
}

/// Split the cascaded estimate into per-hop factors, column by column: the
/// m-th column reshapes to an m_r x m_t matrix whose best rank-1
/// approximation provides column m of both factors. The gauge is fixed by
/// giving the transmit-side factor unit norm and a real nonnegative first
/// entry; the full scale goes to the receive side.
inline std::pair<CMatrix, CMatrix> lskrf(const CMatrix& h_hat, const SystemConfig& cfg) {
    if (h_hat.rows() != static_cast<Index>(cfg.m_t) * cfg.m_r || h_hat.cols() != cfg.m_s())
        throw std::invalid_argument("lskrf: shape mismatch");
    CMatrix h_t_hat(cfg.m_s(), cfg.m_t);
    CMatrix h_r_hat(cfg.m_r, cfg.m_s());
    for (Index m = 0; m < h_hat.cols(); ++m) {
        const CMatrix slab = unvec(h_hat.col(m), cfg.m_r, cfg.m_t);
        const Rank1 r1 = rank1_approx(slab);
        if (r1.s <= 0.0) {
            h_t_hat.row(m).setZero();
            h_t_hat(m, 0) = 1.0;
            h_r_hat.col(m).setZero();
            continue;
        }
        // slab ~ s*u*v^H = (s*conj(c)*u) * (c*conj(v))^T for any unit c;
        // c = v(0)/|v(0)| makes the first transmit entry real nonnegative.
        Complex c(1.0, 0.0);
        if (std::abs(r1.v(0)) > 0.0) c = r1.v(0) / std::abs(r1.v(0));
        h_t_hat.row(m) = (c * r1.v.conjugate()).transpose();
        h_r_hat.col(m) = r1.s * std::conj(c) * r1.u;
    }
    return {h_t_hat, h_r_hat};
}

namespace detail {

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

}  // namespace detail

/// Full two-stage pipeline: stage 1, projection, stage 2, channel
/// reconstruction, factor recovery. Hard identifiability conditions are
/// checked up front for the beamspace solver; for the CS solver they are
/// order-of-magnitude guidance and only produce report warnings.
inline EstimateReport run_trice(const CMatrix& y, const TrainingSet& train, const SystemConfig& cfg,
                                StageSolver solver,
                                const std::optional<StageGrids>& grids = std::nullopt,
                                const Dictionary* stage1_dict = nullptr,
                                const Dictionary* stage2_dict = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    EstimateReport rep;
    rep.method = solver == StageSolver::Bes ? "trice-bes" : "trice-cs";
    if (solver == StageSolver::Bes) {
        const auto val = validate_config(cfg, EstimatorKind::TriceBes);
        if (!val.hard_ok())
            throw std::invalid_argument("run_trice: config fails condition " + val.first_failure());
    } else {
        const auto val = validate_config(cfg, EstimatorKind::TriceCs);
        for (const auto& item : val.items)
            if (!item.satisfied)
                rep.warnings.push_back("training budget below guidance: " + item.name +
                                       " (" + item.detail + ")");
    }

    rep.stage1 = detail::run_stage("stage1", [&] {
        return stage1(y, train, cfg, solver, grids, &rep.warnings, stage1_dict);
    });
    const CMatrix ybar = detail::run_stage("project", [&] { return project(y, rep.stage1->a_hat); });
    rep.stage2 = detail::run_stage("stage2", [&] {
        return stage2(ybar, train, cfg, solver, grids, &rep.warnings, stage2_dict);
    });
    rep.h_hat = detail::run_stage("reconstruct", [&] { return reconstruct(*rep.stage1, *rep.stage2, cfg); });
    auto factors = detail::run_stage("lskrf", [&] { return lskrf(rep.h_hat, cfg); });
    rep.h_t_hat = std::move(factors.first);
    rep.h_r_hat = std::move(factors.second);
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

/// One-shot joint baseline: sparsity-l OMP over the 4D dictionary against
/// vec(y); the refit coefficients serve as the path gains.
inline EstimateReport run_joint_cs(const CMatrix& y, const TrainingSet& train,
                                   const SystemConfig& cfg, const StageGrids& grids,
                                   Index atom_cap = Index(1) << 20,
                                   const Dictionary* prebuilt = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    EstimateReport rep;
    rep.method = "joint-cs";
    std::optional<Dictionary> own;
    if (!prebuilt)
        own.emplace(dict_joint4d(train.f, train.w, train.q_v, train.q_h, grids.psi_t, grids.psi_r,
                                 grids.mu_v, grids.mu_h, atom_cap));
    const Dictionary& dict = prebuilt ? *prebuilt : *own;
    const OmpResult picks = omp(dict, vec(y), cfg.l());

    const Index l = cfg.l();
    std::vector<std::vector<double>> keys(l);
    for (Index n = 0; n < l; ++n) {
        const auto lab = dict.label(picks.support[n]);  // (mu_v, mu_h, psi_t, psi_r)
        keys[n] = {lab[2], lab[3], lab[0], lab[1]};
    }
    const auto order = detail::lex_order(keys);

    Stage1Result s1;
    Stage2Result s2;
    s1.psi_t.resize(l);
    s1.psi_r.resize(l);
    s2.mu_v.resize(l);
    s2.mu_h.resize(l);
    s2.alpha.resize(l);
    for (Index n = 0; n < l; ++n) {
        s1.psi_t(n) = keys[order[n]][0];
        s1.psi_r(n) = keys[order[n]][1];
        s2.mu_v(n) = keys[order[n]][2];
        s2.mu_h(n) = keys[order[n]][3];
        s2.alpha(n) = picks.coeffs(order[n]);
    }
    s1.a_hat = detail::assemble_a_hat(s1.psi_t, s1.psi_r, train, cfg);
    rep.h_hat = reconstruct(s1, s2, cfg);
    rep.stage1 = std::move(s1);
    rep.stage2 = std::move(s2);
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace trice

#endif  // TRICE_TRICE_HPP
