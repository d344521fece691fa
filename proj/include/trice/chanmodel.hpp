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

#ifndef TRICE_CHANMODEL_HPP
#define TRICE_CHANMODEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "trice/numkit.hpp"
#include "trice/rng.hpp"

namespace trice {

inline constexpr double kTwoPi = 2.0 * M_PI;

/// Wrap an angle in radians to [0, 2*pi).
inline double wrap_2pi(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    return y;
}

/// Geometry and training-budget parameters of one link setup.
///
/// The transmitter has m_t antennas, the receiver m_r antennas with n_r RF
/// chains, and the reflecting surface is an m_s_v x m_s_h rectangular grid.
/// Training uses k_t transmit vectors and k_s_v x k_s_h surface phase
/// configurations. l_t / l_r are the propagation path counts of the two hops.
struct SystemConfig {
    int m_t = 16;
    int m_r = 8;
    int m_s_v = 8;
    int m_s_h = 8;
    int n_r = 4;
    int k_t = 4;
    int k_s_v = 4;
    int k_s_h = 4;
    int l_t = 2;
    int l_r = 2;

    int m_s() const { return m_s_v * m_s_h; }
    int k_s() const { return k_s_v * k_s_h; }
    int l() const { return l_t * l_r; }

    void validate() const {
        auto positive = [](int v, const char* name) {
            if (v < 1) throw std::invalid_argument(std::string("SystemConfig: ") + name + " must be >= 1");
        };
        positive(m_t, "m_t");
        positive(m_r, "m_r");
        positive(m_s_v, "m_s_v");
        positive(m_s_h, "m_s_h");
        positive(n_r, "n_r");
        positive(k_t, "k_t");
        positive(k_s_v, "k_s_v");
        positive(k_s_h, "k_s_h");
        positive(l_t, "l_t");
        positive(l_r, "l_r");
        if (n_r > m_r) throw std::invalid_argument("SystemConfig: n_r exceeds m_r");
        if (k_t > m_t) throw std::invalid_argument("SystemConfig: k_t exceeds m_t");
        if (k_s_v > m_s_v) throw std::invalid_argument("SystemConfig: k_s_v exceeds m_s_v");
        if (k_s_h > m_s_h) throw std::invalid_argument("SystemConfig: k_s_h exceeds m_s_h");
    }
};

/// Ground-truth path parameters: spatial frequencies in radians per element
/// plus complex gains, one entry per propagation path of each hop.
struct ChannelParams {
    RVector psi_t;    // [l_t] departure frequencies at the transmit array
    RVector psi_r;    // [l_r] arrival frequencies at the receive array
    RVector mu_v_t;   // [l_t] surface elevation frequencies, transmit hop
    RVector mu_h_t;   // [l_t] surface azimuth frequencies, transmit hop
    RVector mu_v_r;   // [l_r] surface elevation frequencies, receive hop
    RVector mu_h_r;   // [l_r] surface azimuth frequencies, receive hop
    CVector alpha_t;  // [l_t] complex path gains, transmit hop
    CVector alpha_r;  // [l_r] complex path gains, receive hop
};

/// Realized channel matrices plus the effective per-path quantities of the
/// cascade. Path n = l*l_r + k (0-based) combines transmit path l with
/// receive path k; its effective frequency is the sum of the two hop
/// frequencies and its gain the product of the two hop gains.
struct ChannelSet {
    CMatrix h_t;        // m_s x m_t
    CMatrix h_r;        // m_r x m_s
    CMatrix h;          // (m_t*m_r) x m_s cascaded channel
    RVector mu_v_eff;   // [l]
    RVector mu_h_eff;   // [l]
    CVector alpha_eff;  // [l]
};

/// Uniform linear array response [1, e^{j nu}, ..., e^{j (M-1) nu}].
inline CVector steering_1d(double nu, int m) {
    if (m < 1) throw std::invalid_argument("steering_1d: m must be >= 1");
    CVector v(m);
    for (int i = 0; i < m; ++i) v(i) = std::polar(1.0, nu * static_cast<double>(i));
    return v;
}

/// Rectangular array response, vertical index slow: entry (p*m_h + q) is
/// e^{j (p*mu_v + q*mu_h)}.
inline CVector steering_2d(double mu_v, double mu_h, int m_v, int m_h) {
    return kron(steering_1d(mu_v, m_v), steering_1d(mu_h, m_h));
}

enum class AngleKind {
    Azimuth1d,  // linear array: nu = 2*pi*(d/lambda)*cos(phi)
    RisH,       // surface azimuth: mu_h = 2*pi*(d/lambda)*cos(theta_h)
    RisV,       // surface elevation: mu_v = 2*pi*(d/lambda)*sin(theta_h)*cos(theta_v)
};

/// Convert a physical angle in degrees to a spatial frequency. For RisV the
/// angle argument is the elevation theta_v and aux_angle_deg the azimuth
/// theta_h; the other kinds ignore aux_angle_deg.
inline double freq_from_angle(double angle_deg, AngleKind kind, double aux_angle_deg = 0.0,
                              double d_over_lambda = 0.5) {
    const double deg = M_PI / 180.0;
    switch (kind) {
        case AngleKind::Azimuth1d:
            if (angle_deg < -180.0 || angle_deg > 180.0)
                throw std::invalid_argument("freq_from_angle: azimuth angle outside [-180, 180]");
            return kTwoPi * d_over_lambda * std::cos(angle_deg * deg);
        case AngleKind::RisH:
            if (angle_deg < -180.0 || angle_deg > 180.0)
                throw std::invalid_argument("freq_from_angle: surface azimuth outside [-180, 180]");
            return kTwoPi * d_over_lambda * std::cos(angle_deg * deg);
        case AngleKind::RisV:
            if (angle_deg < -90.0 || angle_deg > 90.0)
                throw std::invalid_argument("freq_from_angle: elevation outside [-90, 90]");
            if (aux_angle_deg < -180.0 || aux_angle_deg > 180.0)
                throw std::invalid_argument("freq_from_angle: surface azimuth outside [-180, 180]");
            return kTwoPi * d_over_lambda * std::sin(aux_angle_deg * deg) * std::cos(angle_deg * deg);
    }
    throw std::logic_error("freq_from_angle: unknown kind");
}

namespace detail {

// Minimum spacing that counts two frequencies as distinct; paths closer
// than this in every dimension get resampled.
inline constexpr double kMinPathSeparation = 1e-6;

inline bool paths_distinct(const RVector& a, const RVector& b, int i, int j) {
    return std::abs(a(i) - a(j)) >= kMinPathSeparation || std::abs(b(i) - b(j)) >= kMinPathSeparation;
}

}  // namespace detail

/// Draw ground-truth path parameters.
///
/// Frequencies are uniform over the sector covered by the selected training
/// beams: psi_r over [0, 2pi(n_r-1)/m_r), psi_t over [0, 2pi(k_t-1)/m_t).
/// Per-hop surface frequencies are drawn over half of the corresponding
/// sector so that every pairwise sum (the effective frequency of the
/// cascade) stays inside it. Gains are CN(0,1) per hop and path.
inline ChannelParams sample_paths(const SystemConfig& cfg, Rng& rng) {
    cfg.validate();
    if (cfg.n_r < 2 || cfg.k_t < 2 || cfg.k_s_v < 2 || cfg.k_s_h < 2)
        throw std::invalid_argument("sample_paths: a training dimension of 1 leaves an empty visible sector");

    const double sec_psi_r = kTwoPi * (cfg.n_r - 1) / cfg.m_r;
    const double sec_psi_t = kTwoPi * (cfg.k_t - 1) / cfg.m_t;
    const double half_mu_v = M_PI * (cfg.k_s_v - 1) / cfg.m_s_v;
    const double half_mu_h = M_PI * (cfg.k_s_h - 1) / cfg.m_s_h;

    ChannelParams p;
    p.psi_t.resize(cfg.l_t);
    p.mu_v_t.resize(cfg.l_t);
    p.mu_h_t.resize(cfg.l_t);
    p.alpha_t.resize(cfg.l_t);
    p.psi_r.resize(cfg.l_r);
    p.mu_v_r.resize(cfg.l_r);
    p.mu_h_r.resize(cfg.l_r);
    p.alpha_r.resize(cfg.l_r);

    auto draw_side = [&](RVector& psi, RVector& mu_v, RVector& mu_h, CVector& alpha, int count,
                         double sec_psi) {
        for (int i = 0; i < count; ++i) {
            for (int attempt = 0;; ++attempt) {
                psi(i) = rng.uniform(0.0, sec_psi);
                mu_v(i) = rng.uniform(0.0, half_mu_v);
                mu_h(i) = rng.uniform(0.0, half_mu_h);
                bool ok = true;
                for (int j = 0; j < i && ok; ++j) {
                    ok = detail::paths_distinct(psi, mu_v, i, j) ||
                         std::abs(mu_h(i) - mu_h(j)) >= detail::kMinPathSeparation;
                }
                if (ok) break;
                if (attempt > 1000)
                    throw std::runtime_error("sample_paths: cannot draw distinct paths");
            }
            alpha(i) = rng.complex_normal(1.0);
        }
    };
    draw_side(p.psi_t, p.mu_v_t, p.mu_h_t, p.alpha_t, cfg.l_t, sec_psi_t);
    draw_side(p.psi_r, p.mu_v_r, p.mu_h_r, p.alpha_r, cfg.l_r, sec_psi_r);
    return p;
}

/// Realize the channel matrices of both hops and the cascade.
///
/// h_t = B_t G_t A_t^T and h_r = A_r G_r B_r^T with steering-vector factor
/// matrices; the cascade is assembled as h = (A_t kron A_r) G B with
/// G = diag(alpha_eff) and B the transposed column-wise Kronecker of the
/// effective surface steering banks.
inline ChannelSet realize(const SystemConfig& cfg, const ChannelParams& params) {
    cfg.validate();
    if (params.psi_t.size() != cfg.l_t || params.psi_r.size() != cfg.l_r)
        throw std::invalid_argument("realize: params inconsistent with cfg path counts");

    auto steering_bank = [](const RVector& freqs, int m) {
        CMatrix bank(m, freqs.size());
        for (Index j = 0; j < freqs.size(); ++j) bank.col(j) = steering_1d(freqs(j), m);
        return bank;
    };

    const CMatrix a_t = steering_bank(params.psi_t, cfg.m_t);
    const CMatrix a_r = steering_bank(params.psi_r, cfg.m_r);
    const CMatrix b_t = khatri_rao(steering_bank(params.mu_v_t, cfg.m_s_v),
                                   steering_bank(params.mu_h_t, cfg.m_s_h));
    const CMatrix b_r = khatri_rao(steering_bank(params.mu_v_r, cfg.m_s_v),
                                   steering_bank(params.mu_h_r, cfg.m_s_h));

    ChannelSet ch;
    ch.h_t = b_t * params.alpha_t.asDiagonal() * a_t.transpose();
    ch.h_r = a_r * params.alpha_r.asDiagonal() * b_r.transpose();

    const int l = cfg.l();
    ch.mu_v_eff.resize(l);
    ch.mu_h_eff.resize(l);
    ch.alpha_eff.resize(l);
    for (int i = 0; i < cfg.l_t; ++i) {
        for (int k = 0; k < cfg.l_r; ++k) {
            const int n = i * cfg.l_r + k;
            ch.mu_v_eff(n) = params.mu_v_t(i) + params.mu_v_r(k);
            ch.mu_h_eff(n) = params.mu_h_t(i) + params.mu_h_r(k);
            ch.alpha_eff(n) = params.alpha_t(i) * params.alpha_r(k);
        }
    }

    const CMatrix b_eff = khatri_rao(steering_bank(ch.mu_v_eff, cfg.m_s_v),
                                     steering_bank(ch.mu_h_eff, cfg.m_s_h));
    ch.h = kron(a_t, a_r) * ch.alpha_eff.asDiagonal() * b_eff.transpose();
    return ch;
}

}  // namespace trice

#endif  // TRICE_CHANMODEL_HPP
