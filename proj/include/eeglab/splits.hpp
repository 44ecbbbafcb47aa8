#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "eeglab/recording.hpp"

namespace eeglab {

// Index-based split over a segment vector. Segments of one image id always
// land in the same part, across all subjects.
struct DatasetSplit {
    std::vector<std::size_t> train, val, test;
};

DatasetSplit make_splits(const std::vector<Segment>& segments,
                         std::array<double, 3> ratios, std::uint64_t seed);

// Restricts a split to one subject's segments (same image partition).
DatasetSplit filter_split(const DatasetSplit& split,
                          const std::vector<Segment>& segments,
                          std::uint32_t subject_id);

}  // namespace eeglab
