#pragma once

#include <cstddef>
#include <vector>

#include "eeglab/common.hpp"
#include "eeglab/filters.hpp"
#include "eeglab/mat.hpp"
#include "eeglab/recording.hpp"

namespace eeglab {

// Drops the first `discard` samples and keeps the next `target`.
Mat trim_samples(const Mat& raw, std::size_t discard = 20,
                 std::size_t target = 440);
Segment trim_segment(const Segment& raw, std::size_t discard = 20,
                     std::size_t target = 440);

// Per-channel z-score (population std). Zero-variance channels become all
// zeros and are listed in the result's degenerate_channels.
Segment zscore_per_channel(const Segment& seg);

// Cuts a blank interval into overlapping windows, trims each to the standard
// segment length, and tags them with the neighbouring class pair.
std::vector<Segment> split_blank(const Recording& rec, int prev_class,
                                 int next_class, std::size_t window = 500,
                                 std::size_t overlap = 100);

// The misapplied-filter operator: at each time index the vector across
// channels is filtered as if it were a 1-D time signal.
Segment contaminate_channel_axis(const Segment& seg, const FilterSpec& spec);
Mat contaminate_channel_axis(const Mat& m, const FilterSpec& spec);

}  // namespace eeglab
