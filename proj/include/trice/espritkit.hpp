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

#ifndef TRICE_ESPRITKIT_HPP
#define TRICE_ESPRITKIT_HPP

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "trice/chanmodel.hpp"
#include "trice/numkit.hpp"
#include "trice/training.hpp"

namespace trice {

/// Observation taken through the first b rows of the normalized M-point DFT
/// matrix: data(p, s) is beam p of snapshot s.
struct BeamspaceObs {
    CMatrix data;  // b x snapshots
    int m = 0;     // underlying element count
    int b = 0;     // number of consecutive DFT beams, starting at beam 0
};

/// Raised when an observation does not carry the requested number of
/// independent source components.
class RankError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// For an M-element array observed through consecutive normalized DFT beams,
// the beam responses of a source at frequency mu obey the exact two-term
// recurrence
//
//   e^{j mu} (omega^p b_p - omega^{p+1} b_{p+1}) = b_p - b_{p+1},
//
// with omega = e^{-j 2 pi / M}: both sides equal (z^M - 1) expressions with
// the same pole cancelled, so the relation holds for every mu, on or off
// the beam grid. Stacking p = 0..b-2 yields the selection pair (g1, g2)
// with g1 * b(mu) * e^{j mu} = g2 * b(mu).
inline std::pair<CMatrix, CMatrix> beam_selection_pair(int b, int m) {
    CMatrix g1 = CMatrix::Zero(b - 1, b);
    CMatrix g2 = CMatrix::Zero(b - 1, b);
    for (int p = 0; p + 1 < b; ++p) {
        const Complex wp = std::polar(1.0, -kTwoPi * p / m);
        const Complex wp1 = std::polar(1.0, -kTwoPi * (p + 1) / m);
        g1(p, p) = wp;
        g1(p, p + 1) = -wp1;
        g2(p, p) = 1.0;
        g2(p, p + 1) = -1.0;
    }
    return {g1, g2};
}

// Dominant left singular vectors as the signal-subspace estimate; throws
// RankError when fewer than `dim` components are present numerically.
inline CMatrix signal_subspace(const CMatrix& data, int dim, double rel_tol = 1e-10) {
    Eigen::JacobiSVD<CMatrix> svd(data, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() < dim || sv(0) <= 0.0 || sv(dim - 1) <= rel_tol * sv(0))
        throw RankError("signal subspace dimension below " + std::to_string(dim));
    return svd.matrixU().leftCols(dim);
}

inline void warn_outside_sector(double freq, int b, int m, const char* where,
                                std::vector<std::string>* warnings) {
    if (!warnings) return;
    const double hi = kTwoPi * (b - 1) / m;
    if (freq > hi + 1e-9)
        warnings->push_back(std::string(where) + ": estimate " + std::to_string(freq) +
                            " outside visible sector [0, " + std::to_string(hi) + ")");
}

}  // namespace detail

/// Beamspace shift-invariance frequency estimation for `num_sources`
/// sources. Needs b >= num_sources + 1 beams; the estimates lie in
/// [0, 2*pi) and are sorted ascending. Estimates falling outside the
/// visible sector of the selected beams are appended to `warnings` when a
/// sink is given (behavior there is undefined, the solver does not wrap
/// them back).
inline std::vector<double> esprit_1d(const BeamspaceObs& obs, int num_sources,
                                     std::vector<std::string>* warnings = nullptr) {
    if (obs.b != obs.data.rows() || obs.b > obs.m)
        throw std::invalid_argument("esprit_1d: inconsistent beam metadata");
    if (num_sources < 1) throw std::invalid_argument("esprit_1d: need at least one source");
    if (obs.b < num_sources + 1)
        throw std::invalid_argument("esprit_1d: need b >= sources + 1 beams, got b = " +
                                    std::to_string(obs.b));
    if (obs.data.cols() < 1) throw std::invalid_argument("esprit_1d: no snapshots");

    const CMatrix us = detail::signal_subspace(obs.data, num_sources);
    auto [g1, g2] = detail::beam_selection_pair(obs.b, obs.m);
    const CMatrix lhs = g1 * us;
    if (numerical_rank(lhs, 1e-10) < num_sources)
        throw RankError("esprit_1d: shift-invariance system is rank deficient");
    const CMatrix psi = lstsq(lhs, CMatrix(g2 * us));

    Eigen::ComplexEigenSolver<CMatrix> eig(psi);
    std::vector<double> freqs(num_sources);
    for (int i = 0; i < num_sources; ++i) freqs[i] = wrap_2pi(std::arg(eig.eigenvalues()(i)));
    std::sort(freqs.begin(), freqs.end());
    for (double f : freqs) detail::warn_outside_sector(f, obs.b, obs.m, "esprit_1d", warnings);
    return freqs;
}

/// One estimated propagation path of the first stage.
struct PathPair {
    double psi_t = 0.0;
    double psi_r = 0.0;
};

/// Paired transmit/receive frequency estimation from the received training
/// block (rows: transmit training index slow, receive RF chain fast).
///
/// The row space factors as a Kronecker product of the two beamspace
/// manifolds, so the shift invariance acts per axis through
/// kron(g, I) and kron(I, g) selections. Both solution operators share one
/// eigenbasis; diagonalizing their fixed generic combination recovers the
/// transmit and receive frequencies of each path against the same
/// eigenvector, which pairs them automatically.
inline std::vector<PathPair> esprit_2d_stage1(const CMatrix& y, const SystemConfig& cfg,
                                              std::vector<std::string>* warnings = nullptr) {
    cfg.validate();
    {
        const auto rep = validate_config(cfg, EstimatorKind::TriceBes);
        if (!rep.hard_ok())
            throw std::invalid_argument("esprit_2d_stage1: config fails condition " +
                                        rep.first_failure());
    }
    if (y.rows() != static_cast<Index>(cfg.n_r) * cfg.k_t || y.cols() != cfg.k_s())
        throw std::invalid_argument("esprit_2d_stage1: observation shape mismatch");

    const int l = cfg.l();
    const CMatrix us = detail::signal_subspace(y, l);

    auto [g1t, g2t] = detail::beam_selection_pair(cfg.k_t, cfg.m_t);
    auto [g1r, g2r] = detail::beam_selection_pair(cfg.n_r, cfg.m_r);
    const CMatrix eye_t = CMatrix::Identity(cfg.k_t, cfg.k_t);
    const CMatrix eye_r = CMatrix::Identity(cfg.n_r, cfg.n_r);

    const CMatrix lhs_t = kron(g1t, eye_r) * us;
    const CMatrix lhs_r = kron(eye_t, g1r) * us;
    if (numerical_rank(lhs_t, 1e-10) < l || numerical_rank(lhs_r, 1e-10) < l)
        throw RankError("esprit_2d_stage1: shift-invariance system is rank deficient");
    const CMatrix psi_t_op = lstsq(lhs_t, CMatrix(kron(g2t, eye_r) * us));
    const CMatrix psi_r_op = lstsq(lhs_r, CMatrix(kron(eye_t, g2r) * us));

    // Fixed generic mixing constant; any value that keeps the combined
    // eigenvalues distinct works.
    const Complex rho(0.7548776662466927, 0.3286893218571345);
    Eigen::ComplexEigenSolver<CMatrix> eig(psi_t_op + rho * psi_r_op);
    const CMatrix vecs = eig.eigenvectors();
    const CMatrix dt = vecs.partialPivLu().solve(psi_t_op * vecs);
    const CMatrix dr = vecs.partialPivLu().solve(psi_r_op * vecs);

    std::vector<PathPair> pairs(l);
    for (int n = 0; n < l; ++n) {
        pairs[n].psi_t = wrap_2pi(std::arg(dt(n, n)));
        pairs[n].psi_r = wrap_2pi(std::arg(dr(n, n)));
        detail::warn_outside_sector(pairs[n].psi_t, cfg.k_t, cfg.m_t, "esprit_2d_stage1/psi_t",
                                    warnings);
        detail::warn_outside_sector(pairs[n].psi_r, cfg.n_r, cfg.m_r, "esprit_2d_stage1/psi_r",
                                    warnings);
    }
    std::sort(pairs.begin(), pairs.end(), [](const PathPair& a, const PathPair& b) {
        return a.psi_t != b.psi_t ? a.psi_t < b.psi_t : a.psi_r < b.psi_r;
    });
    return pairs;
}

/// Effective surface frequency estimation from one projected per-path
/// snapshot of length k_s.
///
/// Reshaped to k_s_h x k_s_v (horizontal beam fast), the noiseless snapshot
/// is rank one with the horizontal beam response on the left and the
/// conjugated vertical response on the right, so the dominant singular
/// vectors feed two single-source 1D solves. Both frequencies come from the
/// same path, hence no pairing step.
inline std::pair<double, double> esprit_2d_stage2(const CVector& y_n, const SystemConfig& cfg,
                                                  std::vector<std::string>* warnings = nullptr) {
    if (y_n.size() != cfg.k_s())
        throw std::invalid_argument("esprit_2d_stage2: snapshot length mismatch");
    if (cfg.k_s_v < 2 || cfg.k_s_h < 2)
        throw std::invalid_argument("esprit_2d_stage2: needs k_s_v, k_s_h >= 2");
    if (y_n.norm() <= 0.0) throw std::invalid_argument("esprit_2d_stage2: zero snapshot");

    const CMatrix grid = unvec(y_n, cfg.k_s_h, cfg.k_s_v);
    Eigen::JacobiSVD<CMatrix> svd(grid, Eigen::ComputeThinU | Eigen::ComputeThinV);

    BeamspaceObs h_obs{svd.matrixU().col(0), cfg.m_s_h, cfg.k_s_h};
    BeamspaceObs v_obs{svd.matrixV().col(0).conjugate(), cfg.m_s_v, cfg.k_s_v};
    const double mu_h = esprit_1d(h_obs, 1, warnings)[0];
    const double mu_v = esprit_1d(v_obs, 1, warnings)[0];
    return {mu_v, mu_h};
}

}  // namespace trice

#endif  // TRICE_ESPRITKIT_HPP
