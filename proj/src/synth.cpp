#include "eeglab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>

#include "eeglab/rng.hpp"
#include "eeglab/segments.hpp"

namespace eeglab {

namespace {

// Fixed sub-seed tags so the independent noise/drift/offset streams never
// alias each other.
constexpr std::uint64_t kNoiseStream = 0x01;
constexpr std::uint64_t kDriftStream = 0x02;
constexpr std::uint64_t kOffsetStream = 0x03;
constexpr std::uint64_t kPatternStream = 0x04;

}  // namespace

void NeuralModelParams::validate() const {
    if (evoked_amplitude < 0.0 || drift_amplitude < 0.0 || noise_std < 0.0)
        throw SpecError("synth amplitudes must be non-negative");
    if (!(vigilance_tau_s > 0.0))
        throw SpecError("vigilance_tau_s must be positive (or infinite)");
    if (!(drift_timescale_s > 0.0))
        throw SpecError("drift_timescale_s must be positive");
    if (n_channels < 1) throw SpecError("need at least one channel");
    if (!(sampling_rate_hz > 0.0))
        throw SpecError("sampling rate must be positive");
    if (!(evoked_band.first > 0.0) ||
        !(evoked_band.first < evoked_band.second) ||
        !(evoked_band.second < sampling_rate_hz / 2.0))
        throw SpecError("evoked_band must satisfy 0 < lo < hi < fs/2");
}

std::vector<std::vector<double>> make_spatial_patterns(std::size_t n_classes,
                                                       std::size_t n_channels,
                                                       std::uint64_t seed) {
    DetRng rng(seed);
    std::vector<std::vector<double>> patterns(n_classes);
    for (auto& p : patterns) {
        p.resize(n_channels);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& v : p) {
                v = rng.normal();
                norm2 += v * v;
            }
        } while (norm2 <= 0.0);
        double inv = 1.0 / std::sqrt(norm2);
        for (double& v : p) v *= inv;
    }
    return patterns;
}

std::vector<double> evoked_carrier(std::size_t n_samples, double fs,
                                   double lo_hz, double hi_hz) {
    constexpr double kPi = std::numbers::pi;
    // Three in-band components with fixed phases: phase-locked to the event
    // onset so class means survive averaging.
    const double fracs[3] = {0.3, 0.5, 0.7};
    const double phases[3] = {0.0, kPi / 3.0, 2.0 * kPi / 3.0};
    const std::size_t attack =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * fs)));
    std::vector<double> c(n_samples, 0.0);
    for (std::size_t t = 0; t < n_samples; ++t) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) {
            double f = lo_hz + fracs[k] * (hi_hz - lo_hz);
            v += std::sin(2.0 * kPi * f * static_cast<double>(t) / fs +
                          phases[k]);
        }
        double env = 1.0;
        if (t < attack) env = static_cast<double>(t) / static_cast<double>(attack);
        std::size_t tail = n_samples - 1 - t;
        if (tail < attack)
            env = std::min(env, static_cast<double>(tail) /
                                    static_cast<double>(attack));
        c[t] = v * env;
    }
    double rms = 0.0;
    for (double v : c) rms += v * v;
    rms = std::sqrt(rms / static_cast<double>(n_samples));
    if (rms > 0.0)
        for (double& v : c) v /= rms;
    return c;
}

Recording synthesize_recording(const StimulusSchedule& sched,
                               const NeuralModelParams& params) {
    params.validate();
    if (sched.events.empty()) throw SpecError("empty schedule");
    const double fs = params.sampling_rate_hz;
    const std::size_t C = params.n_channels;
    const std::size_t T = static_cast<std::size_t>(
        std::llround(static_cast<double>(sched.total_duration_ms()) / 1000.0 * fs));
    const int n_classes = sched.n_classes();

    auto patterns = params.spatial_patterns;
    if (patterns.empty())
        patterns = make_spatial_patterns(static_cast<std::size_t>(n_classes), C,
                                         derive_seed(params.seed, kPatternStream));
    if (patterns.size() < static_cast<std::size_t>(n_classes))
        throw SpecError("fewer spatial patterns than classes");
    for (const auto& p : patterns)
        if (p.size() != C)
            throw SpecError("spatial pattern length != n_channels");

    Recording rec;
    rec.samples = Mat(C, T);
    rec.sampling_rate_hz = fs;
    rec.subject_id = params.subject_id;
    rec.session_id = 0;

    // White measurement noise.
    if (params.noise_std > 0.0) {
        DetRng rng(derive_seed(params.seed, kNoiseStream));
        for (std::size_t c = 0; c < C; ++c) {
            double* row = rec.samples.row(c);
            for (std::size_t t = 0; t < T; ++t)
                row[t] = rng.normal(0.0, params.noise_std);
        }
    }

    // Slow drift: stationary Ornstein-Uhlenbeck per channel plus a constant
    // offset per presentation-block region (regions split at the midpoints
    // between consecutive blocks' stimulus spans).
    if (params.drift_amplitude > 0.0) {
        const double sd = params.drift_amplitude;
        const double rho = std::exp(-1.0 / (fs * params.drift_timescale_s));
        const double innov = sd * std::sqrt(1.0 - rho * rho);
        DetRng rng(derive_seed(params.seed, kDriftStream));
        for (std::size_t c = 0; c < C; ++c) {
            double* row = rec.samples.row(c);
            double x = rng.normal(0.0, sd);
            for (std::size_t t = 0; t < T; ++t) {
                row[t] += x;
                x = rho * x + rng.normal(0.0, innov);
            }
        }

        // Stimulus span of each block, in samples.
        std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> span;
        for (const auto& e : sched.events) {
            if (e.is_blank()) continue;
            auto [it, fresh] = span.try_emplace(
                e.block_index, std::make_pair(e.onset_ms, e.onset_ms + e.duration_ms));
            if (!fresh) {
                it->second.first = std::min(it->second.first, e.onset_ms);
                it->second.second =
                    std::max(it->second.second, e.onset_ms + e.duration_ms);
            }
        }
        std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
        for (const auto& [b, se] : span) spans.push_back(se);
        std::vector<std::size_t> region_start(spans.size(), 0);
        for (std::size_t b = 1; b < spans.size(); ++b) {
            double mid_ms =
                0.5 * (static_cast<double>(spans[b - 1].second) +
                       static_cast<double>(spans[b].first));
            region_start[b] = std::min<std::size_t>(
                T, static_cast<std::size_t>(std::llround(mid_ms / 1000.0 * fs)));
        }
        DetRng org(derive_seed(params.seed, kOffsetStream));
        for (std::size_t c = 0; c < C; ++c) {
            double* row = rec.samples.row(c);
            for (std::size_t b = 0; b < spans.size(); ++b) {
                double off = org.normal(0.0, sd);
                std::size_t lo = region_start[b];
                std::size_t hi = (b + 1 < spans.size()) ? region_start[b + 1] : T;
                for (std::size_t t = lo; t < hi; ++t) row[t] += off;
            }
        }
    }

    // Stimulus-evoked component, attenuated by within-session vigilance decay.
    if (params.evoked_amplitude > 0.0) {
        std::vector<std::uint64_t> session_start;
        for (const auto& e : sched.events) {
            if (e.session_index >= session_start.size())
                session_start.resize(e.session_index + 1, UINT64_MAX);
            session_start[e.session_index] =
                std::min(session_start[e.session_index], e.onset_ms);
        }
        std::map<std::size_t, std::vector<double>> carriers;
        for (const auto& e : sched.events) {
            if (e.is_blank()) continue;
            std::size_t dur = static_cast<std::size_t>(
                std::llround(static_cast<double>(e.duration_ms) / 1000.0 * fs));
            auto it = carriers.find(dur);
            if (it == carriers.end())
                it = carriers
                         .emplace(dur, evoked_carrier(dur, fs,
                                                      params.evoked_band.first,
                                                      params.evoked_band.second))
                         .first;
            const auto& carrier = it->second;
            double t_sess =
                static_cast<double>(e.onset_ms - session_start[e.session_index]) /
                1000.0;
            double vig = std::isinf(params.vigilance_tau_s)
                             ? 1.0
                             : std::exp(-t_sess / params.vigilance_tau_s);
            double amp = params.evoked_amplitude * vig;
            std::size_t onset = static_cast<std::size_t>(
                std::llround(static_cast<double>(e.onset_ms) / 1000.0 * fs));
            const auto& pat = patterns[static_cast<std::size_t>(e.class_id)];
            for (std::size_t c = 0; c < C; ++c) {
                double g = amp * pat[c];
                double* row = rec.samples.row(c);
                for (std::size_t k = 0; k < dur && onset + k < T; ++k)
                    row[onset + k] += g * carrier[k];
            }
        }
    }
    return rec;
}

SegmentedData segment_recording(const Recording& rec,
                                const StimulusSchedule& sched) {
    SegmentedData out;
    const double fs = rec.sampling_rate_hz;
    const std::size_t T = rec.n_samples();
    const auto& events = sched.events;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        std::size_t onset = static_cast<std::size_t>(
            std::llround(static_cast<double>(e.onset_ms) / 1000.0 * fs));
        std::size_t dur = static_cast<std::size_t>(
            std::llround(static_cast<double>(e.duration_ms) / 1000.0 * fs));
        if (onset + dur > T)
            throw DataError("schedule event extends past recording end");
        if (!e.is_blank()) {
            Mat raw(rec.n_channels(), dur);
            for (std::size_t c = 0; c < rec.n_channels(); ++c)
                std::memcpy(raw.row(c), rec.samples.row(c) + onset,
                            dur * sizeof(double));
            Segment seg;
            seg.samples = trim_samples(raw);
            seg.class_label = e.class_id;
            seg.block_index = e.block_index;
            seg.subject_id = rec.subject_id;
            seg.session_id = e.session_index;
            seg.onset_ms = e.onset_ms;
            seg.image_id = e.image_id;
            out.stimuli.push_back(std::move(seg));
        } else {
            // Neighbouring classes: last stimulus before, first after.
            int prev = kBlankLabel, next = kBlankLabel;
            for (std::size_t j = i; j-- > 0;)
                if (!events[j].is_blank()) {
                    prev = events[j].class_id;
                    break;
                }
            for (std::size_t j = i + 1; j < events.size(); ++j)
                if (!events[j].is_blank()) {
                    next = events[j].class_id;
                    break;
                }
            Recording blank;
            blank.sampling_rate_hz = fs;
            blank.subject_id = rec.subject_id;
            blank.session_id = e.session_index;
            blank.samples = Mat(rec.n_channels(), dur);
            for (std::size_t c = 0; c < rec.n_channels(); ++c)
                std::memcpy(blank.samples.row(c), rec.samples.row(c) + onset,
                            dur * sizeof(double));
            auto windows = split_blank(blank, prev, next);
            for (auto& w : windows) {
                w.block_index = e.block_index;
                w.session_id = e.session_index;
                w.onset_ms += e.onset_ms;
                out.blanks.push_back(std::move(w));
            }
        }
    }
    return out;
}

}  // namespace eeglab
