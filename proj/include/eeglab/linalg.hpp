#pragma once

#include "eeglab/common.hpp"
#include "eeglab/mat.hpp"

namespace eeglab {

struct DetResult {
    double abs_det = 0.0;  // 0 when underflowed
    bool underflow = false;
};

// |det| via pivoted LU, accumulating log magnitudes so huge/tiny products
// stay representable. |det| < 1e-300 is reported as 0 with the flag set.
DetResult abs_determinant(Mat a);

// Solves A X = B for symmetric positive definite A (Cholesky).
// Throws SingularError when a pivot is not positive.
Mat cholesky_solve(Mat a, const Mat& b);

}  // namespace eeglab
