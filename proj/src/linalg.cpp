#include "eeglab/linalg.hpp"

#include <cmath>

namespace eeglab {

DetResult abs_determinant(Mat a) {
    if (a.rows != a.cols) throw SpecError("determinant needs a square matrix");
    const std::size_t n = a.rows;
    DetResult res;
    if (n == 0) {
        res.abs_det = 1.0;
        return res;
    }
    double log_abs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
        double pivot = a(piv, k);
        if (pivot == 0.0) {
            res.abs_det = 0.0;
            return res;
        }
        if (piv != k)
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
        log_abs += std::log(std::abs(pivot));
        for (std::size_t r = k + 1; r < n; ++r) {
            double f = a(r, k) / pivot;
            if (f == 0.0) continue;
            for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= f * a(k, c);
        }
    }
    if (log_abs < std::log(1e-300)) {
        res.abs_det = 0.0;
        res.underflow = true;
        return res;
    }
    res.abs_det = std::exp(log_abs);
    return res;
}

Mat cholesky_solve(Mat a, const Mat& b) {
    if (a.rows != a.cols) throw SpecError("cholesky needs a square matrix");
    if (b.rows != a.rows) throw SpecError("rhs row count mismatch");
    const std::size_t n = a.rows;
    // In-place lower Cholesky factor.
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0))
            throw SingularError("matrix not positive definite (pivot " +
                                std::to_string(j) + ")");
        double l = std::sqrt(d);
        a(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / l;
        }
    }
    // Forward/back substitution per right-hand-side column.
    Mat x = b;
    for (std::size_t c = 0; c < b.cols; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * x(k, c);
            x(i, c) = s / a(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x(i, c);
            for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * x(k, c);
            x(i, c) = s / a(i, i);
        }
    }
    return x;
}

}  // namespace eeglab
