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

#ifndef TRICE_NUMKIT_HPP
#define TRICE_NUMKIT_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace trice {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index   = Eigen::Index;

/// Kronecker product, size (rA*rB) x (cA*cB). Block (i,j) equals a(i,j)*b.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Column-wise Kronecker product: column i of the result is kron(a_i, b_i).
inline CMatrix khatri_rao(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("khatri_rao: column counts differ (" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
    CMatrix out(a.rows() * b.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            out.col(j).segment(i * b.rows(), b.rows()) = a(i, j) * b.col(j);
    return out;
}

/// Element-wise (Hadamard) product of two equal-length vectors.
inline CVector hadamard(const CVector& a, const CVector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("hadamard: length mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    return a.cwiseProduct(b);
}

/// Column-stacking vectorization.
inline CVector vec(const CMatrix& a) {
    return Eigen::Map<const CVector>(a.data(), a.size());
}

/// Inverse of vec: reshape a column-stacked vector back into rows x cols.
inline CMatrix unvec(const CVector& v, Index rows, Index cols) {
    if (v.size() != rows * cols)
        throw std::invalid_argument("unvec: size " + std::to_string(v.size()) +
                                    " != " + std::to_string(rows) + "x" + std::to_string(cols));
    return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// rel_tol * sigma_max are treated as zero; the zero matrix maps to zero.
inline CMatrix pinv(const CMatrix& a, double rel_tol = 1e-12) {
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    CMatrix out = CMatrix::Zero(a.cols(), a.rows());
    if (sv.size() == 0 || sv(0) <= 0.0) return out;
    const double cut = rel_tol * sv(0);
    for (Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > cut)
            out += (1.0 / sv(k)) * svd.matrixV().col(k) * svd.matrixU().col(k).adjoint();
    }
    return out;
}

/// Numerical rank: count of singular values above rel_tol * sigma_max.
inline Index numerical_rank(const CMatrix& a, double rel_tol = 1e-8) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    const double cut = rel_tol * sv(0);
    Index r = 0;
    for (Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cut) ++r;
    return r;
}

/// Minimum-norm least-squares solution of A x = b, i.e. pinv(A) * b.
inline CVector lstsq(const CMatrix& a, const CVector& b, double rel_tol = 1e-12) {
    if (a.rows() != b.size())
        throw std::invalid_argument("lstsq: A has " + std::to_string(a.rows()) +
                                    " rows but b has length " + std::to_string(b.size()));
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return CVector::Zero(a.cols());
    const double cut = rel_tol * sv(0);
    CVector y = svd.matrixU().adjoint() * b;
    for (Index k = 0; k < sv.size(); ++k)
        y(k) = (sv(k) > cut) ? y(k) / sv(k) : Complex(0.0, 0.0);
    return svd.matrixV() * y;
}

/// Matrix-RHS variant: minimum-norm solution of A X = B column by column.
inline CMatrix lstsq(const CMatrix& a, const CMatrix& b, double rel_tol = 1e-12) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("lstsq: row mismatch between A and B");
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return CMatrix::Zero(a.cols(), b.cols());
    const double cut = rel_tol * sv(0);
    CMatrix y = svd.matrixU().adjoint() * b;
    for (Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > cut)
            y.row(k) /= sv(k);
        else
            y.row(k).setZero();
    }
    return svd.matrixV() * y;
}

struct Rank1 {
    CVector u;   // unit norm
    double s;    // dominant singular value, >= 0
    CVector v;   // unit norm; A ~ s * u * v^H
};

/// Dominant singular triplet; s*u*v^H is the closest rank-1 matrix in
/// Frobenius norm.
inline Rank1 rank1_approx(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Rank1 r;
    r.u = svd.matrixU().col(0);
    r.v = svd.matrixV().col(0);
    r.s = svd.singularValues()(0);
    return r;
}

}  // namespace trice

#endif  // TRICE_NUMKIT_HPP
