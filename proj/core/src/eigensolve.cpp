/*
   Copyright 2026 The polydecoh Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "polydecoh/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "polydecoh/errors.hpp"

namespace polydecoh {

namespace {

constexpr int kMaxSweepsPerValue = 60;

// Implicit QL with Wilkinson-type shifts on (d, e), where e[i] couples i and
// i+1 and e[n-1] is scratch. Rotations are accumulated into the columns of z.
void implicit_ql(std::vector<double>& d, std::vector<double>& e, Eigen::MatrixXd& z) {
    const int n = static_cast<int>(d.size());
    const double eps = std::numeric_limits<double>::epsilon();
    const Eigen::Index rows = z.rows();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (iter++ == kMaxSweepsPerValue) {
                throw NumericFailure("eigensolve", "implicit QL did not converge for a matrix of size " +
                                                       std::to_string(n));
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            int i = m - 1;
            for (; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                double* zi = z.col(i).data();
                double* zi1 = z.col(i + 1).data();
                for (Eigen::Index k = 0; k < rows; ++k) {
                    f = zi1[k];
                    zi1[k] = s * zi[k] + c * f;
                    zi[k] = c * zi[k] - s * f;
                }
            }
            if (r == 0.0 && i >= l) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
}

EigenDecomposition sorted_and_signed(const std::vector<double>& d, const Eigen::MatrixXd& z) {
    const int n = static_cast<int>(d.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

    EigenDecomposition out{Eigen::VectorXd(n), Eigen::MatrixXd(z.rows(), n)};
    for (int k = 0; k < n; ++k) {
        out.values[k] = d[order[k]];
        out.vectors.col(k) = z.col(order[k]);
        auto v = out.vectors.col(k);
        const double cut = 1e-10 * v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::abs(v[i]) > cut) {
                if (v[i] < 0.0) v = -v;
                break;
            }
        }
    }
    return out;
}

}  // namespace

EigenDecomposition eig_tridiagonal(std::span<const double> diagonal, std::span<const double> offDiagonal) {
    const int n = static_cast<int>(diagonal.size());
    if (n < 1 || static_cast<int>(offDiagonal.size()) != n - 1) {
        throw InvalidInput("eigensolve", "tridiagonal matrix needs n diagonal and n-1 off-diagonal entries");
    }
    std::vector<double> d(diagonal.begin(), diagonal.end());
    std::vector<double> e(offDiagonal.begin(), offDiagonal.end());
    e.push_back(0.0);
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);
    implicit_ql(d, e, z);
    return sorted_and_signed(d, z);
}

EigenDecomposition eig_tridiagonal(const SingleParticleHamiltonian& h) {
    const std::vector<double> diagonal(static_cast<std::size_t>(h.size()), 0.0);
    return eig_tridiagonal(diagonal, std::span<const double>(h.hopping.data(), h.hopping.size()));
}

EigenDecomposition eig_symmetric(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (n == 0 || a.cols() != n) {
        throw InvalidInput("eigensolve", "matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidInput("eigensolve", "matrix is not symmetric");
    }

    // Householder reduction: T = Q^T A Q, Q accumulated explicitly.
    Eigen::MatrixXd t = 0.5 * (a + a.transpose());
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Eigen::Index len = n - k - 1;
        Eigen::VectorXd v = t.col(k).tail(len);
        const double alpha = v.norm();
        if (alpha == 0.0) continue;
        v[0] += std::copysign(alpha, v[0]);
        const double vv = v.squaredNorm();
        if (vv == 0.0) continue;
        // t <- H t H with H = I - 2 v v^T / (v^T v), acting on rows/cols k+1..n-1
        auto rowsBlock = t.bottomRows(len);
        const Eigen::RowVectorXd wRow = (v.transpose() * rowsBlock) * (2.0 / vv);
        rowsBlock.noalias() -= v * wRow;
        auto colsBlock = t.rightCols(len);
        const Eigen::VectorXd wCol = (colsBlock * v) * (2.0 / vv);
        colsBlock.noalias() -= wCol * v.transpose();
        auto qBlock = q.rightCols(len);
        const Eigen::VectorXd wq = (qBlock * v) * (2.0 / vv);
        qBlock.noalias() -= wq * v.transpose();
    }

    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = t(i, i);
    for (Eigen::Index i = 0; i + 1 < n; ++i) e[i] = 0.5 * (t(i + 1, i) + t(i, i + 1));
    implicit_ql(d, e, q);
    return sorted_and_signed(d, q);
}

}  // namespace polydecoh
