#pragma once

#include <string>

#include "eeglab/schedule.hpp"
#include "eeglab/synth.hpp"

namespace eeglab {

// proper: temporal bandpass (+notch) on the continuous recording, then
// segmentation and per-segment z-scoring. contaminated: segmentation, then
// the same filters misapplied along the channel axis; no z-scoring, because
// the emulated mistake transposes channel and time axes for the whole
// preprocessing stage (a transposed z-score would normalize across channels
// at each sample, not across time), so slow temporal structure survives.
// none: raw segmentation only - no filtering and no z-scoring.
enum class Pipeline { proper, contaminated, none };

std::string pipeline_name(Pipeline p);
Pipeline pipeline_from_name(const std::string& s);

struct PreprocessSpec {
    Pipeline pipeline = Pipeline::proper;
    double band_lo = 14.0;
    double band_hi = 70.0;
    bool notch = true;
    double notch_hz = 50.0;
    double notch_q = 30.0;
    bool zero_phase = false;
};

SegmentedData run_pipeline(const Recording& rec, const StimulusSchedule& sched,
                           const PreprocessSpec& pp);

// Same filtering/z-scoring for already-cut segments (used by the CLI when
// reading segmented EEGB files; the proper pipeline then filters each
// segment on its own, which carries edge transients - prefer run_pipeline
// on continuous data when possible).
std::vector<Segment> preprocess_segments(std::vector<Segment> segs,
                                         const PreprocessSpec& pp, double fs);

}  // namespace eeglab
