#pragma once

#include <string>
#include <vector>

#include "eeglab/recording.hpp"

namespace eeglab {

// EEGB1 container: a bag of segments sharing channel count and rate.
// image_id and blank_neighbors are not part of the on-disk format; callers
// reattach them from the schedule sidecar via onset_ms.
struct SegmentFile {
    std::uint32_t n_channels = 0;
    std::uint32_t sampling_rate_hz = 0;
    std::vector<Segment> segments;
};

void write_eegb(const std::string& path, const SegmentFile& file);
SegmentFile read_eegb(const std::string& path);

}  // namespace eeglab
