#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include "eeglab/pipeline.hpp"
#include "eeglab/synth.hpp"

using namespace eeglab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Flattened nearest-class-mean classifier: means from `train`, accuracy on
// `test`. Labels are read through `label` so block/class reuse is easy.
template <typename LabelFn>
double nearest_mean_accuracy(const std::vector<const Segment*>& train,
                             const std::vector<const Segment*>& test,
                             LabelFn label) {
    std::map<int, std::vector<double>> sums;
    std::map<int, std::size_t> counts;
    for (const Segment* s : train) {
        auto& acc = sums[label(*s)];
        if (acc.empty()) acc.assign(s->samples.size(), 0.0);
        for (std::size_t i = 0; i < s->samples.size(); ++i)
            acc[i] += s->samples.v[i];
        ++counts[label(*s)];
    }
    for (auto& [l, acc] : sums)
        for (double& v : acc) v /= static_cast<double>(counts[l]);
    std::size_t hits = 0;
    for (const Segment* s : test) {
        double best = std::numeric_limits<double>::infinity();
        int best_label = -1;
        for (const auto& [l, mean] : sums) {
            double d = 0.0;
            for (std::size_t i = 0; i < mean.size(); ++i) {
                double e = s->samples.v[i] - mean[i];
                d += e * e;
            }
            if (d < best) {
                best = d;
                best_label = l;
            }
        }
        if (best_label == label(*s)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

double dft_power(const std::vector<double>& x, double f_over_fs) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < x.size(); ++t)
        acc += x[t] * std::exp(std::complex<double>(
                          0.0, -2.0 * std::numbers::pi * f_over_fs *
                                   static_cast<double>(t)));
    return std::norm(acc);
}

}  // namespace

TEST_CASE("parameter validation") {
    NeuralModelParams p;
    CHECK_NOTHROW(p.validate());
    auto bad = [&](auto mutate) {
        NeuralModelParams q = p;
        mutate(q);
        CHECK_THROWS_AS(q.validate(), SpecError);
    };
    bad([](auto& q) { q.evoked_amplitude = -1.0; });
    bad([](auto& q) { q.drift_amplitude = -0.5; });
    bad([](auto& q) { q.noise_std = -2.0; });
    bad([](auto& q) { q.vigilance_tau_s = 0.0; });
    bad([](auto& q) { q.vigilance_tau_s = -3.0; });
    bad([](auto& q) { q.drift_timescale_s = 0.0; });
    bad([](auto& q) { q.n_channels = 0; });
    bad([](auto& q) { q.sampling_rate_hz = 0.0; });
    bad([](auto& q) { q.evoked_band = {95.0, 55.0}; });
    bad([](auto& q) { q.evoked_band = {55.0, 600.0}; });
    NeuralModelParams inf_ok = p;
    inf_ok.vigilance_tau_s = kInf;
    CHECK_NOTHROW(inf_ok.validate());
}

TEST_CASE("identical seeds give bit-identical recordings") {
    auto sched = generate_schedule(Design::block, 2, 2, 1, 5);
    NeuralModelParams p;
    p.evoked_amplitude = 2.0;
    p.drift_amplitude = 1.0;
    p.noise_std = 1.0;
    p.n_channels = 4;
    p.seed = 99;
    Recording a = synthesize_recording(sched, p);
    Recording b = synthesize_recording(sched, p);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        CHECK(a.samples.v[i] == b.samples.v[i]);

    p.seed = 100;
    Recording c = synthesize_recording(sched, p);
    bool differs = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        if (a.samples.v[i] != c.samples.v[i]) differs = true;
    CHECK(differs);
}

TEST_CASE("zero evoked and zero drift produce plain white noise") {
    auto sched = generate_schedule(Design::block, 2, 2, 1, 5);
    NeuralModelParams p;
    p.evoked_amplitude = 0.0;
    p.drift_amplitude = 0.0;
    p.noise_std = 2.0;
    p.n_channels = 4;
    p.seed = 31;
    Recording rec = synthesize_recording(sched, p);
    const std::size_t T = rec.n_samples();
    REQUIRE(T >= 10000);

    double sum = 0.0, sum2 = 0.0;
    const std::size_t N = rec.samples.size();
    for (double v : rec.samples.v) {
        sum += v;
        sum2 += v * v;
    }
    double mean = sum / static_cast<double>(N);
    double stdev = std::sqrt(sum2 / static_cast<double>(N) - mean * mean);
    CHECK(std::abs(mean) <= 0.05);
    CHECK(stdev == doctest::Approx(2.0).epsilon(0.02));

    // Whiteness: lag-1 autocorrelation per channel stays near zero.
    for (std::size_t c = 0; c < p.n_channels; ++c) {
        const double* row = rec.samples.row(c);
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t + 1 < T; ++t) {
            num += row[t] * row[t + 1];
            den += row[t] * row[t];
        }
        CHECK(std::abs(num / den) <= 0.05);
    }
}

TEST_CASE("high-SNR evoked signal is separable far above chance") {
    // 40 classes x 3 images, rapid order: chance is 2.5%.
    auto sched = generate_schedule(Design::rapid, 40, 3, 1, 11, 30);
    NeuralModelParams p;
    p.evoked_amplitude = 5.0;
    p.drift_amplitude = 0.0;
    p.vigilance_tau_s = kInf;
    p.noise_std = 1.0;
    p.n_channels = 8;
    p.seed = 210;
    Recording rec = synthesize_recording(sched, p);

    PreprocessSpec pp;
    pp.pipeline = Pipeline::proper;
    pp.band_lo = 55.0;
    pp.band_hi = 95.0;
    pp.notch = false;
    SegmentedData data = run_pipeline(rec, sched, pp);
    REQUIRE(data.stimuli.size() == 120);

    std::vector<const Segment*> train, test;
    for (const auto& s : data.stimuli)
        (s.image_id % 3 == 2 ? test : train).push_back(&s);
    REQUIRE(test.size() == 40);
    double acc = nearest_mean_accuracy(
        train, test, [](const Segment& s) { return s.class_label; });
    CHECK(acc >= 10.0 * 0.025);
}

TEST_CASE("block-label accuracy is non-decreasing in drift amplitude") {
    auto sched = generate_schedule(Design::rapid, 4, 25, 1, 77, 20);
    REQUIRE(sched.n_blocks() == 5);
    const double amps[3] = {0.0, 0.3, 3.0};
    double mean_acc[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            NeuralModelParams p;
            p.evoked_amplitude = 0.0;
            p.drift_amplitude = amps[a];
            p.drift_timescale_s = 10.0;
            p.noise_std = 1.0;
            p.n_channels = 4;
            p.seed = 400 + seed;
            Recording rec = synthesize_recording(sched, p);
            SegmentedData data = segment_recording(rec, sched);
            std::vector<const Segment*> train, test;
            std::map<std::uint32_t, std::size_t> seen;
            for (const auto& s : data.stimuli)
                (seen[s.block_index]++ < 16 ? train : test).push_back(&s);
            double acc = nearest_mean_accuracy(
                train, test,
                [](const Segment& s) { return static_cast<int>(s.block_index); });
            mean_acc[a] += acc / 5.0;
        }
    }
    CHECK(mean_acc[0] <= mean_acc[1]);
    CHECK(mean_acc[1] <= mean_acc[2]);
    // The extremes are meaningfully apart, not a numerical tie.
    CHECK(mean_acc[2] >= mean_acc[0] + 0.3);
}

TEST_CASE("finite vigilance decays accuracy across the session") {
    auto sched = generate_schedule(Design::rapid, 10, 20, 1, 55, 50);
    const std::uint64_t span = sched.total_duration_ms();
    double first_mean = 0.0, last_mean = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        NeuralModelParams p;
        p.evoked_amplitude = 4.0;
        p.vigilance_tau_s = 40.0;
        p.drift_amplitude = 0.0;
        p.noise_std = 1.0;
        p.n_channels = 8;
        p.seed = 600 + seed;
        Recording rec = synthesize_recording(sched, p);
        SegmentedData data = segment_recording(rec, sched);
        std::vector<const Segment*> all, first_q, last_q;
        for (const auto& s : data.stimuli) {
            all.push_back(&s);
            if (s.onset_ms < span / 4) first_q.push_back(&s);
            if (s.onset_ms >= 3 * span / 4) last_q.push_back(&s);
        }
        REQUIRE(!first_q.empty());
        REQUIRE(!last_q.empty());
        auto lbl = [](const Segment& s) { return s.class_label; };
        first_mean += nearest_mean_accuracy(all, first_q, lbl) / 5.0;
        last_mean += nearest_mean_accuracy(all, last_q, lbl) / 5.0;
    }
    CHECK(first_mean >= last_mean);
    CHECK(first_mean >= 0.5);  // early segments are genuinely decodable
}

TEST_CASE("blank windows carry the flanking classes from the schedule") {
    auto sched = generate_schedule(Design::block, 3, 2, 1, 23);
    NeuralModelParams p;
    p.noise_std = 1.0;
    p.n_channels = 2;
    p.seed = 9;
    Recording rec = synthesize_recording(sched, p);
    SegmentedData data = segment_recording(rec, sched);
    // 2 interior blanks x 24 windows.
    REQUIRE(data.blanks.size() == 48);
    for (const auto& w : data.blanks) {
        REQUIRE(w.blank_neighbors.has_value());
        // Locate the blank event containing this window.
        const StimulusEvent* ev = nullptr;
        for (const auto& e : sched.events)
            if (e.is_blank() && w.onset_ms >= e.onset_ms &&
                w.onset_ms < e.onset_ms + e.duration_ms)
                ev = &e;
        REQUIRE(ev != nullptr);
        int prev = kBlankLabel, next = kBlankLabel;
        for (const auto& e : sched.events) {
            if (e.is_blank()) continue;
            if (e.onset_ms < ev->onset_ms) prev = e.class_id;
            if (e.onset_ms > ev->onset_ms && next == kBlankLabel)
                next = e.class_id;
        }
        CHECK(w.blank_neighbors->first == prev);
        CHECK(w.blank_neighbors->second == next);
    }
}

TEST_CASE("evoked carrier is unit-RMS, enveloped, and in-band") {
    auto c = evoked_carrier(440, 1000.0, 55.0, 95.0);
    REQUIRE(c.size() == 440);
    double rms = 0.0;
    for (double v : c) rms += v * v;
    rms = std::sqrt(rms / 440.0);
    CHECK(rms == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.front() == 0.0);
    CHECK(c.back() == 0.0);

    // Spectral mass concentrates inside the band.
    double in_band = 0.0, out_band = 0.0;
    for (double f = 5.0; f <= 495.0; f += 5.0) {
        double pw = dft_power(c, f / 1000.0);
        if (f >= 55.0 && f <= 95.0)
            in_band += pw;
        else
            out_band += pw;
    }
    CHECK(in_band >= 20.0 * out_band);
}

TEST_CASE("spatial patterns are unit-norm, distinct, deterministic") {
    auto pats = make_spatial_patterns(40, 16, 123);
    REQUIRE(pats.size() == 40);
    for (const auto& p : pats) {
        REQUIRE(p.size() == 16);
        double n2 = 0.0;
        for (double v : p) n2 += v * v;
        CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < pats.size(); ++i)
        for (std::size_t j = i + 1; j < pats.size(); ++j) {
            double dot = 0.0;
            for (std::size_t c = 0; c < 16; ++c) dot += pats[i][c] * pats[j][c];
            CHECK(std::abs(dot) < 0.99);
        }
    auto again = make_spatial_patterns(40, 16, 123);
    for (std::size_t i = 0; i < pats.size(); ++i)
        for (std::size_t c = 0; c < 16; ++c)
            CHECK(pats[i][c] == again[i][c]);
}

TEST_CASE("explicit spatial patterns are validated") {
    auto sched = generate_schedule(Design::block, 3, 1, 1, 4);
    NeuralModelParams p;
    p.evoked_amplitude = 1.0;
    p.n_channels = 4;
    p.seed = 3;
    p.spatial_patterns = make_spatial_patterns(2, 4, 8);  // too few classes
    CHECK_THROWS_AS(synthesize_recording(sched, p), SpecError);
    p.spatial_patterns = make_spatial_patterns(3, 5, 8);  // wrong channel count
    CHECK_THROWS_AS(synthesize_recording(sched, p), SpecError);
    p.spatial_patterns = make_spatial_patterns(3, 4, 8);
    CHECK_NOTHROW(synthesize_recording(sched, p));
}
