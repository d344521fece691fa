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

#ifndef TRICE_TRAINING_HPP
#define TRICE_TRAINING_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "trice/chanmodel.hpp"
#include "trice/numkit.hpp"

namespace trice {

/// DFT-row training matrices. w decodes at the receiver, f precodes at the
/// transmitter, q_v/q_h are the per-axis surface phase banks and
/// q = kron(q_v, q_h) the combined surface training matrix.
struct TrainingSet {
    CMatrix w;    // m_r x n_r
    CMatrix f;    // m_t x k_t
    CMatrix q_v;  // m_s_v x k_s_v
    CMatrix q_h;  // m_s_h x k_s_h
    CMatrix q;    // m_s x k_s
};

/// Normalized M x M DFT matrix, entry (p,q) = e^{-j 2 pi p q / M} / sqrt(M).
inline CMatrix dft_matrix(int m) {
    if (m < 1) throw std::invalid_argument("dft_matrix: m must be >= 1");
    CMatrix u(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            u(p, q) = scale * std::polar(1.0, -kTwoPi * p * q / m);
    return u;
}

/// Build the training set from the first rows of the normalized DFT
/// matrices: w^T, f^T, q_v^T, q_h^T select the leading n_r / k_t / k_s_v /
/// k_s_h beams of the respective array dimension.
inline TrainingSet build_training(const SystemConfig& cfg) {
    cfg.validate();
    TrainingSet t;
    t.w = dft_matrix(cfg.m_r).topRows(cfg.n_r).transpose();
    t.f = dft_matrix(cfg.m_t).topRows(cfg.k_t).transpose();
    t.q_v = dft_matrix(cfg.m_s_v).topRows(cfg.k_s_v).transpose();
    t.q_h = dft_matrix(cfg.m_s_h).topRows(cfg.k_s_h).transpose();
    t.q = kron(t.q_v, t.q_h);
    return t;
}

enum class EstimatorKind { TriceBes, TriceCs, JointCs };

inline const char* to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::TriceBes: return "trice-bes";
        case EstimatorKind::TriceCs: return "trice-cs";
        case EstimatorKind::JointCs: return "joint-cs";
    }
    return "?";
}

/// Dictionary grid densities relative to the array sizes; a CS stage uses
/// beta * M grid points per axis.
struct GridMultipliers {
    int beta_t = 1;
    int beta_r = 1;
    int beta_s_v = 1;
    int beta_s_h = 1;
};

struct ValidationItem {
    std::string name;    // condition, e.g. "k_s >= l"
    std::string detail;  // instantiated numbers
    bool satisfied = false;
    bool hard = false;   // hard requirement vs. order-of-magnitude warning
};

struct ValidationReport {
    EstimatorKind method;
    std::vector<ValidationItem> items;

    bool hard_ok() const {
        for (const auto& it : items)
            if (it.hard && !it.satisfied) return false;
        return true;
    }
    std::string first_failure() const {
        for (const auto& it : items)
            if (it.hard && !it.satisfied) return it.name;
        return {};
    }
};

/// Check the training-overhead conditions of the chosen estimator.
///
/// The beamspace method has hard identifiability requirements; the CS
/// methods only get order-of-magnitude sample-count warnings. The l >= 4
/// condition is reported as informational, not enforced.
inline ValidationReport validate_config(const SystemConfig& cfg, EstimatorKind method,
                                        const GridMultipliers& mult = {}) {
    ValidationReport rep;
    rep.method = method;
    const int l = cfg.l();

    auto add = [&rep](const std::string& name, bool ok, bool hard, const std::string& detail) {
        rep.items.push_back({name, detail, ok, hard});
    };
    auto nums = [](long long lhs, long long rhs) {
        std::ostringstream os;
        os << lhs << " vs " << rhs;
        return os.str();
    };

    if (method == EstimatorKind::TriceBes) {
        add("k_s >= l", cfg.k_s() >= l, true, nums(cfg.k_s(), l));
        add("n_r >= l_r + 1", cfg.n_r >= cfg.l_r + 1, true, nums(cfg.n_r, cfg.l_r + 1));
        add("k_t >= l_t + 1", cfg.k_t >= cfg.l_t + 1, true, nums(cfg.k_t, cfg.l_t + 1));
        add("(k_t - 1) * n_r >= l", (cfg.k_t - 1) * cfg.n_r >= l, true,
            nums(static_cast<long long>(cfg.k_t - 1) * cfg.n_r, l));
        add("(n_r - 1) * k_t >= l", (cfg.n_r - 1) * cfg.k_t >= l, true,
            nums(static_cast<long long>(cfg.n_r - 1) * cfg.k_t, l));
        add("l >= 4", l >= 4, false, nums(l, 4));
    } else if (method == EstimatorKind::TriceCs) {
        const double atoms1 = static_cast<double>(mult.beta_t) * cfg.m_t *
                              static_cast<double>(mult.beta_r) * cfg.m_r;
        const double atoms2 = static_cast<double>(mult.beta_s_v) * cfg.m_s_v *
                              static_cast<double>(mult.beta_s_h) * cfg.m_s_h;
        const double need1 = l * std::log(atoms1 / l);
        const double need2 = std::log(atoms2);
        add("n_r * k_t >~ l * log(atoms / l)", cfg.n_r * cfg.k_t >= need1, false,
            nums(static_cast<long long>(cfg.n_r) * cfg.k_t, static_cast<long long>(std::ceil(need1))));
        add("k_s >~ log(atoms)", cfg.k_s() >= need2, false,
            nums(cfg.k_s(), static_cast<long long>(std::ceil(need2))));
    } else {
        const double atoms = static_cast<double>(mult.beta_t) * cfg.m_t *
                             static_cast<double>(mult.beta_r) * cfg.m_r *
                             static_cast<double>(mult.beta_s_v) * cfg.m_s_v *
                             static_cast<double>(mult.beta_s_h) * cfg.m_s_h;
        const double need = l * std::log(atoms / l);
        add("n_r * k_t * k_s >~ l * log(atoms / l)",
            static_cast<double>(cfg.n_r) * cfg.k_t * cfg.k_s() >= need, false,
            nums(static_cast<long long>(cfg.n_r) * cfg.k_t * cfg.k_s(),
                 static_cast<long long>(std::ceil(need))));
    }
    return rep;
}

}  // namespace trice

#endif  // TRICE_TRAINING_HPP
