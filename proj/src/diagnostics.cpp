#include "eeglab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "eeglab/rng.hpp"

namespace eeglab {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int max_block(const std::vector<Segment>& data) {
    int hi = -1;
    for (const auto& s : data) hi = std::max(hi, static_cast<int>(s.block_index));
    return hi;
}

int max_class(const std::vector<Segment>& data) {
    int hi = -1;
    for (const auto& s : data)
        if (!s.is_blank()) hi = std::max(hi, s.class_label);
    return hi;
}

}  // namespace

void ReportRow::finalize() {
    increase_over_chance = accuracy - chance;
    if (!per_subject.empty()) {
        double m = 0.0;
        for (double v : per_subject) m += v;
        m /= static_cast<double>(per_subject.size());
        mean = m;
        if (per_subject.size() >= 2) {
            double var = 0.0;
            for (double v : per_subject) var += (v - m) * (v - m);
            std_dev = std::sqrt(var / static_cast<double>(per_subject.size()));
        } else {
            std_dev = 0.0;
        }
    }
}

nlohmann::json report_to_json(const DiagnosticReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) {
        nlohmann::json jr = {
            {"name", r.name},
            {"model", r.model},
            {"condition", r.condition},
            {"accuracy", r.accuracy},
            {"chance", r.chance},
            {"increase_over_chance", r.increase_over_chance},
            {"per_subject", r.per_subject},
            {"mean", r.mean},
            {"std", r.std_dev},
            {"extra", r.extra},
        };
        rows.push_back(jr);
    }
    return {{"experiment", rep.experiment},
            {"metadata", rep.metadata},
            {"rows", rows}};
}

void write_report_json(const std::string& path, const DiagnosticReport& rep) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << report_to_json(rep).dump(2) << "\n";
}

void write_report_csv(const std::string& path, const DiagnosticReport& rep) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << "name,model,condition,accuracy,chance,increase_over_chance,mean,std,"
          "per_subject,extra\n";
    for (const auto& r : rep.rows) {
        os << r.name << ',' << r.model << ',' << r.condition << ','
           << fmt(r.accuracy) << ',' << fmt(r.chance) << ','
           << fmt(r.increase_over_chance) << ',' << fmt(r.mean) << ','
           << fmt(r.std_dev) << ',';
        for (std::size_t i = 0; i < r.per_subject.size(); ++i) {
            if (i) os << ';';
            os << fmt(r.per_subject[i]);
        }
        os << ',';
        bool first = true;
        for (const auto& [k, v] : r.extra) {
            if (!first) os << ';';
            os << k << '=' << fmt(v);
            first = false;
        }
        os << '\n';
    }
}

ReportRow blank_leakage(const TrainedModel& model,
                        const std::vector<Segment>& blanks) {
    if (blanks.empty()) throw EvalError("no blank segments");
    for (const auto& b : blanks)
        if (!b.blank_neighbors)
            throw DataError("blank segment lacks neighbour labels");
    ReportRow row;
    row.name = "blank-leakage";
    row.model = family_name(model.spec.family) + "/" + head_name(model.spec.head);
    row.condition = "blank-pair";
    row.accuracy = 100.0 * evaluate(model, blanks, LabelKind::blank_pair);
    row.chance = 100.0 * chance_level(model.spec, LabelKind::blank_pair);
    row.finalize();
    return row;
}

ReportRow block_label_leakage(const std::vector<Segment>& data,
                              const DatasetSplit& split, const ModelSpec& spec,
                              const TrainConfig& cfg, std::uint64_t init_seed) {
    int n_blocks = max_block(data) + 1;
    if (n_blocks < 2)
        throw SpecError("block-label leakage needs >= 2 presentation blocks");
    ModelSpec bspec = spec;
    bspec.n_classes = static_cast<std::size_t>(n_blocks);
    TrainedModel model = build(bspec, init_seed);
    model = train(std::move(model), data, split.train, split.val,
                  LabelKind::block_label, cfg);
    ReportRow row;
    row.name = "block-label-leakage";
    row.model = family_name(spec.family) + "/" + head_name(spec.head);
    row.condition = "block-labels";
    row.accuracy =
        100.0 * evaluate(model, data, split.test, LabelKind::block_label);
    row.chance = 100.0 / static_cast<double>(n_blocks);
    row.extra["n_blocks"] = n_blocks;
    row.finalize();
    return row;
}

DiagnosticReport per_subject_vs_pooled(const std::vector<Segment>& data,
                                       const DatasetSplit& split,
                                       const ModelSpec& spec,
                                       const TrainConfig& cfg, LabelKind kind,
                                       std::uint64_t seed) {
    std::set<std::uint32_t> subject_set;
    for (const auto& s : data) subject_set.insert(s.subject_id);
    std::vector<std::uint32_t> subjects(subject_set.begin(), subject_set.end());
    if (subjects.size() < 2)
        throw SubjectError("per-subject comparison needs >= 2 subjects");

    ModelSpec mspec = spec;
    mspec.n_classes = static_cast<std::size_t>(
        kind == LabelKind::block_label ? max_block(data) + 1
                                       : max_class(data) + 1);
    std::string model_tag =
        family_name(spec.family) + "/" + head_name(spec.head);

    DiagnosticReport rep;
    rep.experiment = "per-subject-vs-pooled";
    rep.metadata["labels"] = label_kind_name(kind);
    rep.metadata["model"] = model_tag;
    rep.metadata["seed"] = std::to_string(seed);

    ReportRow per;
    per.name = "per-subject";
    per.model = model_tag;
    per.condition = "train per subject";
    per.chance = 100.0 / static_cast<double>(mspec.n_classes);
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        DatasetSplit sub = filter_split(split, data, subjects[i]);
        if (sub.train.empty() || sub.val.empty() || sub.test.empty())
            throw SubjectError("subject " + std::to_string(subjects[i]) +
                               " has an empty split");
        TrainConfig scfg = cfg;
        scfg.seed = derive_seed(seed, 0xA100 + i);
        TrainedModel m = build(mspec, derive_seed(seed, 0xA200 + i));
        m = train(std::move(m), data, sub.train, sub.val, kind, scfg);
        per.per_subject.push_back(100.0 *
                                  evaluate(m, data, sub.test, kind));
    }
    per.finalize();
    per.accuracy = per.mean;
    per.increase_over_chance = per.accuracy - per.chance;
    rep.rows.push_back(per);

    ReportRow pooled;
    pooled.name = "pooled";
    pooled.model = model_tag;
    pooled.condition = "train pooled";
    pooled.chance = per.chance;
    TrainConfig pcfg = cfg;
    pcfg.seed = derive_seed(seed, 0xB100);
    TrainedModel m = build(mspec, derive_seed(seed, 0xB200));
    m = train(std::move(m), data, split.train, split.val, kind, pcfg);
    for (std::uint32_t s : subjects) {
        DatasetSplit sub = filter_split(split, data, s);
        pooled.per_subject.push_back(100.0 *
                                     evaluate(m, data, sub.test, kind));
    }
    pooled.accuracy = 100.0 * evaluate(m, data, split.test, kind);
    pooled.finalize();
    rep.rows.push_back(pooled);
    return rep;
}

EncodingMatrix encoding_matrix(
    const std::vector<std::vector<double>>& class_means) {
    const std::size_t n = class_means.size();
    if (n < 2) throw DegenerateEncodingError("need >= 2 class means");
    std::vector<std::vector<double>> unit(n);
    for (std::size_t i = 0; i < n; ++i) {
        double norm2 = 0.0;
        for (double v : class_means[i]) norm2 += v * v;
        if (!(norm2 > 0.0))
            throw DegenerateEncodingError("zero class-mean encoding vector");
        double inv = 1.0 / std::sqrt(norm2);
        unit[i].resize(class_means[i].size());
        for (std::size_t d = 0; d < class_means[i].size(); ++d)
            unit[i][d] = class_means[i][d] * inv;
        if (unit[i].size() != unit[0].size())
            throw DegenerateEncodingError("class means of unequal dimension");
    }
    EncodingMatrix enc;
    enc.gram = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t d = 0; d < unit[i].size(); ++d)
                dot += unit[i][d] * unit[j][d];
            enc.gram(i, j) = dot;
        }
    return enc;
}

OneHotnessResult one_hotness(const EncodingMatrix& enc) {
    Mat b = enc.gram;
    for (std::size_t i = 0; i < b.rows; ++i) b(i, i) -= 1.0;
    DetResult det = abs_determinant(std::move(b));
    return {det.abs_det, det.underflow};
}

std::vector<std::vector<double>> class_mean_encodings(
    const TrainedModel& model, const std::vector<Segment>& data,
    const std::vector<std::size_t>& idx) {
    const std::size_t K = model.spec.n_classes;
    std::vector<std::vector<double>> sums(K);
    std::vector<std::size_t> counts(K, 0);
    for (std::size_t i : idx) {
        const Segment& seg = data[i];
        if (seg.is_blank()) continue;
        auto e = encode(model, seg);
        std::size_t c = static_cast<std::size_t>(seg.class_label);
        if (c >= K) throw SpecError("segment class exceeds model classes");
        if (sums[c].empty()) sums[c].assign(e.size(), 0.0);
        for (std::size_t d = 0; d < e.size(); ++d) sums[c][d] += e[d];
        ++counts[c];
    }
    for (std::size_t c = 0; c < K; ++c) {
        if (counts[c] == 0)
            throw DegenerateEncodingError("class " + std::to_string(c) +
                                          " has no segments to encode");
        for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
    }
    return sums;
}

DiagnosticReport duration_sweep(const DurationSweepOptions& opt,
                                const NeuralModelParams& params,
                                const ModelSpec& spec, const TrainConfig& cfg) {
    if (opt.minutes.size() < 2)
        throw SpecError("duration sweep needs >= 2 durations");
    DiagnosticReport rep;
    rep.experiment = "duration-sweep";
    rep.metadata["seed"] = std::to_string(opt.seed);
    rep.metadata["pipeline"] = pipeline_name(opt.preprocess.pipeline);
    for (double minutes : opt.minutes) {
        // A rapid session of m blocks lasts 35m - 10 seconds (25 s of
        // stimuli per block of 50, 10 s blanks in between).
        double secs = minutes * 60.0;
        long m = std::lround((secs + 10.0) / 35.0);
        if (m < 2) m = 2;
        std::uint32_t ipc = static_cast<std::uint32_t>(std::max(
            1.0,
            std::round(static_cast<double>(m) *
                       static_cast<double>(opt.block_size) /
                       static_cast<double>(opt.n_classes))));
        StimulusSchedule sched =
            generate_schedule(Design::rapid, opt.n_classes, ipc, 1,
                              derive_seed(opt.seed, 0xD000 +
                                          static_cast<std::uint64_t>(m)),
                              opt.block_size);
        NeuralModelParams p = params;
        p.seed = opt.seed;
        Recording rec = synthesize_recording(sched, p);
        SegmentedData segs = run_pipeline(rec, sched, opt.preprocess);
        DatasetSplit split = make_splits(segs.stimuli, opt.ratios,
                                         derive_seed(opt.seed, 0xE000));
        TrainConfig dcfg = cfg;
        dcfg.seed = derive_seed(opt.seed, 0xF000);
        ReportRow row = block_label_leakage(segs.stimuli, split, spec, dcfg,
                                            derive_seed(opt.seed, 0xF100));
        row.name = "duration-" + fmt(minutes);
        row.extra["duration_min"] = minutes;
        row.finalize();
        rep.rows.push_back(row);
        if (!segs.blanks.empty()) {
            // Blank-interval leakage needs a class-label model of the same
            // family; trained on the identical split with its own streams.
            ModelSpec cspec = spec;
            cspec.n_classes = opt.n_classes;
            TrainConfig bcfg = cfg;
            bcfg.seed = derive_seed(opt.seed, 0xF200);
            TrainedModel cm =
                train(build(cspec, derive_seed(opt.seed, 0xF300)),
                      segs.stimuli, split.train, split.val,
                      LabelKind::class_label, bcfg);
            ReportRow brow = blank_leakage(cm, segs.blanks);
            brow.name = "duration-" + fmt(minutes);
            brow.extra["duration_min"] = minutes;
            brow.finalize();
            rep.rows.push_back(brow);
        }
    }
    return rep;
}

}  // namespace eeglab
