#include "eeglab/segments.hpp"

#include <cmath>
#include <cstring>

namespace eeglab {

Mat trim_samples(const Mat& raw, std::size_t discard, std::size_t target) {
    if (raw.cols < discard + target)
        throw LengthError("segment too short to trim: have " +
                          std::to_string(raw.cols) + ", need " +
                          std::to_string(discard + target));
    Mat out(raw.rows, target);
    for (std::size_t r = 0; r < raw.rows; ++r)
        std::memcpy(out.row(r), raw.row(r) + discard, target * sizeof(double));
    return out;
}

Segment trim_segment(const Segment& raw, std::size_t discard,
                     std::size_t target) {
    Segment out = raw;
    out.samples = trim_samples(raw.samples, discard, target);
    return out;
}

Segment zscore_per_channel(const Segment& seg) {
    Segment out = seg;
    out.degenerate_channels.clear();
    const std::size_t n = seg.samples.cols;
    if (n == 0) return out;
    for (std::size_t c = 0; c < seg.samples.rows; ++c) {
        const double* src = seg.samples.row(c);
        double mean = 0.0;
        for (std::size_t t = 0; t < n; ++t) mean += src[t];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double d = src[t] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        double* dst = out.samples.row(c);
        if (var <= 0.0) {
            for (std::size_t t = 0; t < n; ++t) dst[t] = 0.0;
            out.degenerate_channels.push_back(static_cast<std::uint32_t>(c));
            continue;
        }
        double inv = 1.0 / std::sqrt(var);
        for (std::size_t t = 0; t < n; ++t) dst[t] = (src[t] - mean) * inv;
    }
    return out;
}

std::vector<Segment> split_blank(const Recording& rec, int prev_class,
                                 int next_class, std::size_t window,
                                 std::size_t overlap) {
    if (window == 0 || overlap >= window)
        throw SpecError("split_blank requires window > overlap >= 0");
    std::vector<Segment> out;
    const std::size_t n = rec.n_samples();
    if (n < window) return out;
    const std::size_t step = window - overlap;
    const double ms_per_sample = 1000.0 / rec.sampling_rate_hz;
    for (std::size_t start = 0; start + window <= n; start += step) {
        Mat win(rec.n_channels(), window);
        for (std::size_t c = 0; c < rec.n_channels(); ++c)
            std::memcpy(win.row(c), rec.samples.row(c) + start,
                        window * sizeof(double));
        Segment seg;
        // Each window is trimmed to the standard segment length; the recorded
        // onset stays at the window start.
        seg.samples = trim_samples(win);
        seg.class_label = kBlankLabel;
        seg.subject_id = rec.subject_id;
        seg.session_id = rec.session_id;
        seg.onset_ms = static_cast<std::uint64_t>(
            std::llround(static_cast<double>(start) * ms_per_sample));
        seg.blank_neighbors = std::make_pair(prev_class, next_class);
        out.push_back(std::move(seg));
    }
    return out;
}

Mat contaminate_channel_axis(const Mat& m, const FilterSpec& spec) {
    if (!m.all_finite()) throw DataError("non-finite sample in filter input");
    Mat out(m.rows, m.cols);
    std::vector<double> col(m.rows);
    for (std::size_t t = 0; t < m.cols; ++t) {
        for (std::size_t c = 0; c < m.rows; ++c) col[c] = m(c, t);
        col = filter_signal(spec, col);
        for (std::size_t c = 0; c < m.rows; ++c) out(c, t) = col[c];
    }
    return out;
}

Segment contaminate_channel_axis(const Segment& seg, const FilterSpec& spec) {
    Segment out = seg;
    out.samples = contaminate_channel_axis(seg.samples, spec);
    return out;
}

}  // namespace eeglab
