#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "eeglab/common.hpp"
#include "eeglab/mat.hpp"

namespace eeglab {

// Continuous multichannel recording, samples in microvolts, channels x time.
struct Recording {
    Mat samples;
    double sampling_rate_hz = 1000.0;
    std::uint32_t subject_id = 0;
    std::uint32_t session_id = 0;

    std::size_t n_channels() const { return samples.rows; }
    std::size_t n_samples() const { return samples.cols; }
};

// Fixed-length preprocessed window. class_label is kBlankLabel for blank
// segments, which then carry the (preceding, following) class pair.
struct Segment {
    Mat samples;  // channels x time
    int class_label = kBlankLabel;
    std::uint32_t block_index = 0;
    std::uint32_t subject_id = 0;
    std::uint32_t session_id = 0;
    std::uint64_t onset_ms = 0;
    // Image identity used for split grouping; not part of the binary container.
    std::uint32_t image_id = 0;
    std::optional<std::pair<int, int>> blank_neighbors;
    // Channels zeroed by z-scoring because they had no variance.
    std::vector<std::uint32_t> degenerate_channels;

    bool is_blank() const { return class_label == kBlankLabel; }
};

}  // namespace eeglab
