#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace eeglab {

// Dense row-major matrix of doubles. Recordings and segments store samples as
// channels x time; model code reuses the same type for weight blocks.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }

    double* row(std::size_t r) { return v.data() + r * cols; }
    const double* row(std::size_t r) const { return v.data() + r * cols; }

    std::size_t size() const { return v.size(); }

    bool all_finite() const {
        for (double x : v) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    }

    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && v == o.v; }
};

}  // namespace eeglab
