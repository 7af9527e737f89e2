#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace hslpp {

class skew_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

template <class T>
using DynMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// max |A + A^T| relative to max(1, max |A|).
template <class T>
double skewness_defect(const DynMatrix<T>& a)
{
    using std::abs;
    double big = 1.0, defect = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            big = std::max(big, static_cast<double>(abs(a(i, j))));
            defect = std::max(defect, static_cast<double>(abs(a(i, j) + a(j, i))));
        }
    }
    return defect / big;
}

// Pfaffian of an even-dimensional skew matrix by Parlett-Reid
// tridiagonalization (Gauss transformations with partial pivoting).
template <class T>
T pfaffian(DynMatrix<T> a, double skew_tol = 1e-12)
{
    using std::abs;
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw skew_error("pfaffian: matrix must be square");
    if (n % 2 != 0) throw skew_error("pfaffian: dimension must be even");
    if (skewness_defect(a) > skew_tol) throw skew_error("pfaffian: matrix is not skew-symmetric");
    T pf(1);
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        Eigen::Index kp = k + 1;
        double best = abs(a(k + 1, k));
        for (Eigen::Index i = k + 2; i < n; ++i) {
            if (abs(a(i, k)) > best) {
                best = abs(a(i, k));
                kp = i;
            }
        }
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            pf = -pf;
        }
        if (a(k + 1, k) == T(0)) return T(0);
        pf *= a(k, k + 1);
        const Eigen::Index rest = n - k - 2;
        if (rest > 0) {
            const Eigen::Matrix<T, Eigen::Dynamic, 1> tau = a.row(k).tail(rest).transpose() / a(k, k + 1);
            const Eigen::Matrix<T, Eigen::Dynamic, 1> col = a.col(k + 1).tail(rest);
            a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
        }
    }
    return pf;
}

} // namespace hslpp
