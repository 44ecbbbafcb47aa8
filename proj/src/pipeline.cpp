#include "eeglab/pipeline.hpp"

#include "eeglab/filters.hpp"
#include "eeglab/segments.hpp"

namespace eeglab {

std::string pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::proper: return "proper";
        case Pipeline::contaminated: return "contaminated";
        case Pipeline::none: return "none";
    }
    throw SpecError("bad pipeline");
}

Pipeline pipeline_from_name(const std::string& s) {
    if (s == "proper") return Pipeline::proper;
    if (s == "contaminated") return Pipeline::contaminated;
    if (s == "none") return Pipeline::none;
    throw SpecError("unknown pipeline: " + s);
}

namespace {

void zscore_all(std::vector<Segment>& segs) {
    for (auto& s : segs) s = zscore_per_channel(s);
}

void contaminate_all(std::vector<Segment>& segs, const PreprocessSpec& pp,
                     double fs) {
    // The misapplied filters run along the channel axis; the nominal rate
    // stays the recording rate, as in the original mistake.
    FilterSpec band = design_bandpass(pp.band_lo, pp.band_hi, fs);
    for (auto& s : segs) s = contaminate_channel_axis(s, band);
    if (pp.notch) {
        FilterSpec notch = design_notch(pp.notch_hz, pp.notch_q, fs);
        for (auto& s : segs) s = contaminate_channel_axis(s, notch);
    }
}

}  // namespace

SegmentedData run_pipeline(const Recording& rec, const StimulusSchedule& sched,
                           const PreprocessSpec& pp) {
    SegmentedData out;
    switch (pp.pipeline) {
        case Pipeline::proper: {
            FilterSpec band =
                design_bandpass(pp.band_lo, pp.band_hi, rec.sampling_rate_hz);
            Recording filtered = apply_filter(band, rec, pp.zero_phase);
            if (pp.notch) {
                FilterSpec notch =
                    design_notch(pp.notch_hz, pp.notch_q, rec.sampling_rate_hz);
                filtered = apply_filter(notch, filtered, pp.zero_phase);
            }
            out = segment_recording(filtered, sched);
            break;
        }
        case Pipeline::contaminated:
            // Emulates transposing the channel and time axes during
            // preprocessing: the filters run along channels, and the
            // per-channel temporal z-score never happens (transposed, it
            // would normalize across channels at each sample instead), so
            // slow temporal structure survives into the segments.
            out = segment_recording(rec, sched);
            contaminate_all(out.stimuli, pp, rec.sampling_rate_hz);
            contaminate_all(out.blanks, pp, rec.sampling_rate_hz);
            return out;
        case Pipeline::none:
            // Raw segmentation: no filtering and no z-scoring.  Slow drift
            // and per-block offsets survive intact, which is exactly what the
            // leakage diagnostics probe for.
            out = segment_recording(rec, sched);
            return out;
    }
    zscore_all(out.stimuli);
    zscore_all(out.blanks);
    return out;
}

std::vector<Segment> preprocess_segments(std::vector<Segment> segs,
                                         const PreprocessSpec& pp, double fs) {
    switch (pp.pipeline) {
        case Pipeline::proper: {
            FilterSpec band = design_bandpass(pp.band_lo, pp.band_hi, fs);
            for (auto& s : segs)
                s.samples = apply_filter(band, s.samples, pp.zero_phase);
            if (pp.notch) {
                FilterSpec notch = design_notch(pp.notch_hz, pp.notch_q, fs);
                for (auto& s : segs)
                    s.samples = apply_filter(notch, s.samples, pp.zero_phase);
            }
            break;
        }
        case Pipeline::contaminated:
            contaminate_all(segs, pp, fs);
            return segs;
        case Pipeline::none:
            return segs;
    }
    zscore_all(segs);
    return segs;
}

}  // namespace eeglab
