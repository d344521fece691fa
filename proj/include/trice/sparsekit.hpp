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

#ifndef TRICE_SPARSEKIT_HPP
#define TRICE_SPARSEKIT_HPP

#include <string>
#include <utility>
#include <vector>

#include "trice/chanmodel.hpp"
#include "trice/numkit.hpp"

namespace trice {

/// Uniform frequency grid over [lo, hi), lo inclusive.
struct Grid {
    RVector points;
    double lo = 0.0;
    double hi = 0.0;
};

inline Grid make_grid(double lo, double hi, int count) {
    if (count < 1) throw std::invalid_argument("make_grid: count must be >= 1");
    if (!(hi > lo)) throw std::invalid_argument("make_grid: empty sector");
    Grid g;
    g.lo = lo;
    g.hi = hi;
    g.points.resize(count);
    const double step = (hi - lo) / count;
    for (int i = 0; i < count; ++i) g.points(i) = lo + step * i;
    return g;
}

/// Steering vectors over all grid points, one column per point.
inline CMatrix steering_bank_1d(const Grid& grid, int m) {
    CMatrix bank(m, grid.points.size());
    for (Index j = 0; j < grid.points.size(); ++j) bank.col(j) = steering_1d(grid.points(j), m);
    return bank;
}

/// Sparse-recovery dictionary with Kronecker-separable atoms.
///
/// Atoms are indexed by a multi-index over the factor matrices, first
/// factor slowest: atom(i) = kron(factors[0].col(i0), ..., factors[k].col(ik)).
/// Each factor carries the grid frequencies of its columns; label(i)
/// concatenates them in factor order (see label_names()).
///
/// Columns are materialized into a dense matrix when the total entry count
/// stays below dense_entry_limit; above it the dictionary synthesizes atoms
/// on demand. Both paths produce bit-identical columns, and atom norms are
/// always the product of the per-factor column norms, so solver behavior
/// does not depend on the storage mode.
class Dictionary {
  public:
    static constexpr Index kDefaultDenseEntryLimit = Index(1) << 23;

    Dictionary(std::vector<CMatrix> factors, std::vector<RVector> factor_freqs,
               std::vector<std::string> names, Index dense_entry_limit = kDefaultDenseEntryLimit)
        : factors_(std::move(factors)), freqs_(std::move(factor_freqs)), names_(std::move(names)) {
        if (factors_.empty() || factors_.size() != freqs_.size() || factors_.size() != names_.size())
            throw std::invalid_argument("Dictionary: inconsistent factor metadata");
        count_ = 1;
        length_ = 1;
        for (std::size_t k = 0; k < factors_.size(); ++k) {
            if (factors_[k].cols() != freqs_[k].size())
                throw std::invalid_argument("Dictionary: factor/frequency size mismatch");
            count_ *= factors_[k].cols();
            length_ *= factors_[k].rows();
        }
        factor_norms_.reserve(factors_.size());
        for (const auto& f : factors_) factor_norms_.push_back(f.colwise().norm());
        if (count_ * length_ <= dense_entry_limit) {
            atoms_.resize(length_, count_);
            for (Index i = 0; i < count_; ++i) atoms_.col(i) = synthesize_atom(i);
        }
    }

    Index atom_count() const { return count_; }
    Index atom_length() const { return length_; }
    bool dense() const { return atoms_.size() > 0; }
    const std::vector<std::string>& label_names() const { return names_; }

    CVector atom(Index i) const {
        check_index(i);
        if (dense()) return atoms_.col(i);
        return synthesize_atom(i);
    }

    /// Euclidean norm of atom i, computed as the product of factor column
    /// norms (exact for Kronecker products).
    double atom_norm(Index i) const {
        check_index(i);
        double n = 1.0;
        Index rem = i;
        for (std::size_t k = factors_.size(); k-- > 0;) {
            const Index cols = factors_[k].cols();
            n *= factor_norms_[k](rem % cols);
            rem /= cols;
        }
        return n;
    }

    /// Grid frequencies of atom i, one entry per factor in factor order.
    std::vector<double> label(Index i) const {
        check_index(i);
        std::vector<double> out(factors_.size());
        Index rem = i;
        for (std::size_t k = factors_.size(); k-- > 0;) {
            const Index cols = factors_[k].cols();
            out[k] = freqs_[k](rem % cols);
            rem /= cols;
        }
        return out;
    }

    /// Conjugate inner products atom(i)^H r for all atoms.
    CVector correlations(const CVector& r) const {
        if (r.size() != length_) throw std::invalid_argument("Dictionary: residual length mismatch");
        CVector c(count_);
        if (dense()) {
            for (Index i = 0; i < count_; ++i) c(i) = atoms_.col(i).dot(r);
        } else {
            for (Index i = 0; i < count_; ++i) c(i) = synthesize_atom(i).dot(r);
        }
        return c;
    }

    /// Row norms of atom(i)^H R across the columns of R (multi-snapshot
    /// selection metric).
    RVector correlation_row_norms(const CMatrix& r) const {
        if (r.rows() != length_) throw std::invalid_argument("Dictionary: residual length mismatch");
        RVector out(count_);
        if (dense()) {
            for (Index i = 0; i < count_; ++i) out(i) = (atoms_.col(i).adjoint() * r).norm();
        } else {
            for (Index i = 0; i < count_; ++i) out(i) = (synthesize_atom(i).adjoint() * r).norm();
        }
        return out;
    }

  private:
    void check_index(Index i) const {
        if (i < 0 || i >= count_) throw std::out_of_range("Dictionary: atom index out of range");
    }

    CVector synthesize_atom(Index i) const {
        Index rem = i;
        CVector out;
        for (std::size_t k = factors_.size(); k-- > 0;) {
            const Index cols = factors_[k].cols();
            const CVector col = factors_[k].col(rem % cols);
            rem /= cols;
            if (out.size() == 0)
                out = col;
            else
                out = kron(CMatrix(col), CMatrix(out)).col(0);
        }
        return out;
    }

    std::vector<CMatrix> factors_;
    std::vector<RVector> freqs_;
    std::vector<std::string> names_;
    std::vector<RVector> factor_norms_;
    Index count_ = 0;
    Index length_ = 0;
    CMatrix atoms_;  // empty when synthesizing lazily
};

/// Stage-1 dictionary over the transmit/receive frequency grids: atom
/// (i_t, i_r) = kron(f^T v(psi_t_i), w^T v(psi_r_i)).
inline Dictionary dict_stage1(const CMatrix& f, const CMatrix& w, const Grid& grid_t,
                              const Grid& grid_r,
                              Index dense_entry_limit = Dictionary::kDefaultDenseEntryLimit) {
    std::vector<CMatrix> factors;
    factors.push_back(f.transpose() * steering_bank_1d(grid_t, static_cast<int>(f.rows())));
    factors.push_back(w.transpose() * steering_bank_1d(grid_r, static_cast<int>(w.rows())));
    return Dictionary(std::move(factors), {grid_t.points, grid_r.points}, {"psi_t", "psi_r"},
                      dense_entry_limit);
}

/// Stage-2 dictionary over the effective surface frequency grids: atom
/// (i_v, i_h) = kron(q_v^T v(mu_v_i), q_h^T v(mu_h_i)), length k_s.
inline Dictionary dict_stage2(const CMatrix& q_v, const CMatrix& q_h, const Grid& grid_v,
                              const Grid& grid_h,
                              Index dense_entry_limit = Dictionary::kDefaultDenseEntryLimit) {
    std::vector<CMatrix> factors;
    factors.push_back(q_v.transpose() * steering_bank_1d(grid_v, static_cast<int>(q_v.rows())));
    factors.push_back(q_h.transpose() * steering_bank_1d(grid_h, static_cast<int>(q_h.rows())));
    return Dictionary(std::move(factors), {grid_v.points, grid_h.points}, {"mu_v", "mu_h"},
                      dense_entry_limit);
}

/// Joint 4D dictionary for the one-shot baseline: atom for the tuple
/// (psi_t, psi_r, mu_v, mu_h) is
/// kron(q^T (v(mu_v) kr v(mu_h)), kron(f^T v(psi_t), w^T v(psi_r))),
/// built factor-wise through the Kronecker structure of q. Refuses atom
/// counts above atom_cap.
inline Dictionary dict_joint4d(const CMatrix& f, const CMatrix& w, const CMatrix& q_v,
                               const CMatrix& q_h, const Grid& grid_t, const Grid& grid_r,
                               const Grid& grid_v, const Grid& grid_h,
                               Index atom_cap = Index(1) << 20,
                               Index dense_entry_limit = Dictionary::kDefaultDenseEntryLimit) {
    const Index count = grid_t.points.size() * grid_r.points.size() * grid_v.points.size() *
                        grid_h.points.size();
    if (count > atom_cap)
        throw std::invalid_argument("dict_joint4d: " + std::to_string(count) +
                                    " atoms exceed cap " + std::to_string(atom_cap));
    std::vector<CMatrix> factors;
    factors.push_back(q_v.transpose() * steering_bank_1d(grid_v, static_cast<int>(q_v.rows())));
    factors.push_back(q_h.transpose() * steering_bank_1d(grid_h, static_cast<int>(q_h.rows())));
    factors.push_back(f.transpose() * steering_bank_1d(grid_t, static_cast<int>(f.rows())));
    factors.push_back(w.transpose() * steering_bank_1d(grid_r, static_cast<int>(w.rows())));
    return Dictionary(std::move(factors),
                      {grid_v.points, grid_h.points, grid_t.points, grid_r.points},
                      {"mu_v", "mu_h", "psi_t", "psi_r"}, dense_entry_limit);
}

struct OmpResult {
    std::vector<Index> support;  // selected atom indices, selection order
    CVector coeffs;              // least-squares refit on the support
    double residual_norm = 0.0;
};

struct SompResult {
    std::vector<Index> support;
    CMatrix coeffs;  // support-size x snapshot count
    double residual_norm = 0.0;
};

namespace detail {

// Argmax of metric over atoms not yet selected; ties resolve to the lowest
// index by the strict > comparison.
inline Index select_atom(const RVector& metric, const std::vector<bool>& used) {
    Index best = -1;
    double best_val = -1.0;
    for (Index i = 0; i < metric.size(); ++i) {
        if (used[i]) continue;
        if (metric(i) > best_val) {
            best_val = metric(i);
            best = i;
        }
    }
    return best;
}

}  // namespace detail

/// Orthogonal matching pursuit with a fixed sparsity level: per iteration,
/// select the atom with the largest normalized correlation against the
/// residual, refit all selected atoms by least squares, update the residual.
inline OmpResult omp(const Dictionary& dict, const CVector& y, int sparsity) {
    if (sparsity < 1) throw std::invalid_argument("omp: sparsity must be >= 1");
    if (sparsity > dict.atom_count()) throw std::invalid_argument("omp: sparsity exceeds atom count");
    if (y.size() != dict.atom_length()) throw std::invalid_argument("omp: observation length mismatch");

    OmpResult res;
    CVector residual = y;
    CMatrix selected(dict.atom_length(), 0);
    std::vector<bool> used(dict.atom_count(), false);
    for (int it = 0; it < sparsity; ++it) {
        const CVector c = dict.correlations(residual);
        RVector metric(dict.atom_count());
        for (Index i = 0; i < dict.atom_count(); ++i) {
            const double n = dict.atom_norm(i);
            metric(i) = n > 0.0 ? std::abs(c(i)) / n : -1.0;
        }
        const Index pick = detail::select_atom(metric, used);
        used[pick] = true;
        res.support.push_back(pick);
        selected.conservativeResize(Eigen::NoChange, selected.cols() + 1);
        selected.col(selected.cols() - 1) = dict.atom(pick);
        res.coeffs = lstsq(selected, y);
        residual = y - selected * res.coeffs;
    }
    res.residual_norm = residual.norm();
    return res;
}

/// Simultaneous OMP over the columns of y: the selection metric is the
/// Euclidean norm of the atom correlation across snapshots; the refit is a
/// joint least squares per iteration.
inline SompResult somp(const Dictionary& dict, const CMatrix& y, int sparsity) {
    if (sparsity < 1) throw std::invalid_argument("somp: sparsity must be >= 1");
    if (sparsity > dict.atom_count()) throw std::invalid_argument("somp: sparsity exceeds atom count");
    if (y.rows() != dict.atom_length() || y.cols() < 1)
        throw std::invalid_argument("somp: observation shape mismatch");

    SompResult res;
    CMatrix residual = y;
    CMatrix selected(dict.atom_length(), 0);
    std::vector<bool> used(dict.atom_count(), false);
    for (int it = 0; it < sparsity; ++it) {
        const RVector c = dict.correlation_row_norms(residual);
        RVector metric(dict.atom_count());
        for (Index i = 0; i < dict.atom_count(); ++i) {
            const double n = dict.atom_norm(i);
            metric(i) = n > 0.0 ? c(i) / n : -1.0;
        }
        const Index pick = detail::select_atom(metric, used);
        used[pick] = true;
        res.support.push_back(pick);
        selected.conservativeResize(Eigen::NoChange, selected.cols() + 1);
        selected.col(selected.cols() - 1) = dict.atom(pick);
        res.coeffs = lstsq(selected, y);
        residual = y - selected * res.coeffs;
    }
    res.residual_norm = residual.norm();
    return res;
}

}  // namespace trice

#endif  // TRICE_SPARSEKIT_HPP
