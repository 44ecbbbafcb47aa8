#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eeglab/common.hpp"
#include "eeglab/mat.hpp"

namespace eeglab {

struct Codebook {
    Mat codewords;            // n_classes x dim, U[0,1]
    Mat samples;              // (n_classes * samples_per_class) x dim
    std::vector<int> labels;  // per sample
    double sigma = 0.0;
};

Codebook generate_codebook(std::size_t n_classes, std::size_t dim,
                           double sigma, std::size_t samples_per_class,
                           std::uint64_t seed);

struct RidgeFit {
    Mat weights;  // dim_in x dim_out
    double mse = 0.0;
};

// Minimizes |XW - Y|^2 + lambda |W|^2 via normal equations.
RidgeFit fit_linear_regressor(const Mat& x, const Mat& y, double lambda);

Mat matmul(const Mat& a, const Mat& b);

// Leave-nothing-out nearest-class-mean top-1 accuracy.
double class_separability(const Mat& features, const std::vector<int>& labels);

// Assigns each row of x to the nearest codeword (Euclidean).
std::vector<int> nearest_codeword(const Mat& x, const Mat& codewords);

void save_codebook(const std::string& path, const Codebook& cb);
Codebook load_codebook(const std::string& path);

}  // namespace eeglab
