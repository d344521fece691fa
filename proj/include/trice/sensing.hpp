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

#ifndef TRICE_SENSING_HPP
#define TRICE_SENSING_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

#include "trice/chanmodel.hpp"
#include "trice/numkit.hpp"
#include "trice/rng.hpp"
#include "trice/training.hpp"

namespace trice {

/// Received training block: y = y0 + noise, with the calibrated per-entry
/// complex noise variance sigma2 for the requested snr_db.
struct MeasurementBlock {
    CMatrix y;       // (n_r*k_t) x k_s
    CMatrix y0;      // noiseless counterpart
    double sigma2 = 0.0;
    double snr_db = std::numeric_limits<double>::infinity();
};

/// Noiseless received block y0 = (f^T kron w^T) * h * q. Row blocks iterate
/// the transmit training index (slow) over receive RF chains (fast);
/// columns are the surface configurations.
inline CMatrix synthesize(const SystemConfig& cfg, const ChannelSet& channels,
                          const TrainingSet& train) {
    if (channels.h.rows() != static_cast<Index>(cfg.m_t) * cfg.m_r ||
        channels.h.cols() != cfg.m_s())
        throw std::invalid_argument("synthesize: cascaded channel shape mismatch");
    if (train.f.rows() != cfg.m_t || train.f.cols() != cfg.k_t ||
        train.w.rows() != cfg.m_r || train.w.cols() != cfg.n_r ||
        train.q.rows() != cfg.m_s() || train.q.cols() != cfg.k_s())
        throw std::invalid_argument("synthesize: training shape mismatch");
    return kron(train.f.transpose(), train.w.transpose()) * channels.h * train.q;
}

/// Add circularly-symmetric white noise calibrated so that
/// ||y0||_F^2 / E||z||_F^2 = 10^(snr_db/10). An infinite snr_db passes y0
/// through unchanged.
inline MeasurementBlock add_noise(const CMatrix& y0, double snr_db, Rng& rng) {
    MeasurementBlock block;
    block.y0 = y0;
    block.snr_db = snr_db;
    if (std::isinf(snr_db) && snr_db > 0.0) {
        block.sigma2 = 0.0;
        block.y = y0;
        return block;
    }
    const double power = y0.squaredNorm();
    if (power <= 0.0)
        throw std::invalid_argument("add_noise: zero signal with finite snr");
    block.sigma2 = power / (std::pow(10.0, snr_db / 10.0) * static_cast<double>(y0.size()));
    block.y = y0;
    for (Index j = 0; j < y0.cols(); ++j)
        for (Index i = 0; i < y0.rows(); ++i)
            block.y(i, j) += rng.complex_normal(block.sigma2);
    return block;
}

/// Normalized squared error ||h_true - h_hat||_F^2 / ||h_true||_F^2.
inline double nmse(const CMatrix& h_true, const CMatrix& h_hat) {
    if (h_true.rows() != h_hat.rows() || h_true.cols() != h_hat.cols())
        throw std::invalid_argument("nmse: shape mismatch");
    const double ref = h_true.squaredNorm();
    if (ref <= 0.0) throw std::invalid_argument("nmse: zero reference");
    return (h_true - h_hat).squaredNorm() / ref;
}

}  // namespace trice

#endif  // TRICE_SENSING_HPP
