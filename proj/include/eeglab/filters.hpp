#pragma once

#include <complex>
#include <vector>

#include "eeglab/common.hpp"
#include "eeglab/mat.hpp"
#include "eeglab/recording.hpp"

namespace eeglab {

enum class FilterKind { bandpass, notch };

// Single biquad section, a0 normalized to 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    double pole_modulus() const;
};

struct FilterSpec {
    FilterKind kind = FilterKind::bandpass;
    double lo = 0.0;  // low cutoff Hz, or notch center
    double hi = 0.0;  // high cutoff Hz, or notch Q
    double fs = 0.0;
    std::vector<Biquad> sections;

    bool stable() const;
};

// Order-2 Butterworth analog prototype -> bandpass (two biquads) via the
// bilinear transform with cutoff pre-warping.
FilterSpec design_bandpass(double low_hz, double high_hz, double fs);

// Cookbook biquad notch at center_hz with quality factor q.
FilterSpec design_notch(double center_hz, double q, double fs);

// Complex transfer function H(e^{j 2 pi f / fs}) of the cascade.
std::complex<double> frequency_response(const FilterSpec& spec, double freq_hz);
double gain_at(const FilterSpec& spec, double freq_hz);

// Runs one 1-D signal through the cascade (direct form II transposed,
// zero initial state). zero_phase applies a second backward pass.
std::vector<double> filter_signal(const FilterSpec& spec,
                                  const std::vector<double>& x,
                                  bool zero_phase = false);

// Filters every row (channel) along the time axis.
Mat apply_filter(const FilterSpec& spec, const Mat& m, bool zero_phase = false);
Recording apply_filter(const FilterSpec& spec, const Recording& rec,
                       bool zero_phase = false);

}  // namespace eeglab
