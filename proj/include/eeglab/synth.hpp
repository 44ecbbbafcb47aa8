#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "eeglab/recording.hpp"
#include "eeglab/schedule.hpp"

namespace eeglab {

// Ground-truth generator knobs. drift_amplitude sets both the OU stationary
// std and the per-block DC offset std. vigilance_tau_s = infinity disables
// the within-session attention decay.
struct NeuralModelParams {
    double evoked_amplitude = 0.0;  // uV
    std::pair<double, double> evoked_band{55.0, 95.0};
    double drift_amplitude = 0.0;  // uV
    double drift_timescale_s = 10.0;
    double vigilance_tau_s = std::numeric_limits<double>::infinity();
    double noise_std = 1.0;  // uV
    std::size_t n_channels = 128;
    double sampling_rate_hz = 1000.0;
    std::uint32_t subject_id = 0;
    std::uint64_t seed = 0;
    // One unit-norm vector per class. Left empty, synthesize_recording fills
    // them from the seed; shared-stimulus experiments should pass patterns
    // built once from the experiment seed so subjects agree.
    std::vector<std::vector<double>> spatial_patterns;

    void validate() const;
};

std::vector<std::vector<double>> make_spatial_patterns(std::size_t n_classes,
                                                       std::size_t n_channels,
                                                       std::uint64_t seed);

// Phase-locked unit-RMS carrier with attack/decay envelope, one value per
// sample of an event of n_samples length.
std::vector<double> evoked_carrier(std::size_t n_samples, double fs,
                                   double lo_hz, double hi_hz);

// samples = evoked + drift + noise over the whole schedule.
Recording synthesize_recording(const StimulusSchedule& sched,
                               const NeuralModelParams& params);

struct SegmentedData {
    std::vector<Segment> stimuli;
    std::vector<Segment> blanks;
};

// Cuts a synthesized (or loaded) recording back into labelled stimulus
// segments and blank windows according to the schedule.
SegmentedData segment_recording(const Recording& rec,
                                const StimulusSchedule& sched);

}  // namespace eeglab
