#include "eeglab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "eeglab/rng.hpp"

namespace eeglab {

namespace {

void expect_keys(const nlohmann::json& j, const char* where,
                 std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!has_seed)
        throw ConfigError("seed is required (set it in the config, via "
                          "--seed, or via EEGLAB_SEED)");
    if (n_classes < 2) throw ConfigError("n_classes must be >= 2");
    if (images_per_class < 1) throw ConfigError("images_per_class must be >= 1");
    if (sessions < 1) throw ConfigError("sessions must be >= 1");
    if (subjects < 1) throw ConfigError("subjects must be >= 1");
    if (block_size < 1) throw ConfigError("block_size must be >= 1");
    double nyq = synth.sampling_rate_hz / 2.0;
    if (!(preprocess.band_lo > 0.0) || !(preprocess.band_lo < preprocess.band_hi) ||
        !(preprocess.band_hi < nyq))
        throw ConfigError("band must satisfy 0 < lo < hi < " +
                          std::to_string(nyq));
    if (preprocess.notch &&
        (!(preprocess.notch_hz > 0.0) || !(preprocess.notch_hz < nyq)))
        throw ConfigError("notch frequency must lie in (0, Nyquist)");
    if (analysis != "pooled" && analysis != "per-subject" && analysis != "both")
        throw ConfigError("analysis must be pooled, per-subject or both");
    if (analysis != "pooled" && subjects < 2)
        throw ConfigError("per-subject analysis needs >= 2 subjects");
    double rsum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(rsum - 1.0) > 1e-9)
        throw ConfigError("ratios must sum to 1");
    if (labels == LabelKind::blank_pair)
        throw ConfigError("labels must be class or block");
    if (report_one_hotness && labels != LabelKind::class_label)
        throw ConfigError("one_hotness reporting needs class labels");
    try {
        synth.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("synth: ") + e.what());
    }
    if (!(train.lr > 0.0) || train.batch < 1 || train.epochs < 1)
        throw ConfigError("train: lr > 0, batch >= 1, epochs >= 1 required");
}

namespace {

ExperimentConfig parse_config(const nlohmann::json& j) {
    expect_keys(j, "config",
                {"name", "design", "n_classes", "images_per_class", "sessions",
                 "subjects", "block_size", "pipeline", "band", "notch",
                 "notch_hz", "notch_q", "zero_phase", "synth", "model", "train",
                 "labels", "analysis", "blank_leakage", "one_hotness", "ratios",
                 "seed"});
    ExperimentConfig c;
    maybe(j, "name", c.name);
    if (j.contains("design")) {
        std::string d = j.at("design").get<std::string>();
        if (d == "blank") {
            // Blank-classification experiment: block schedule, class-label
            // training, leakage measured on the blank windows.
            c.design = Design::block;
            c.report_blank_leakage = true;
        } else {
            c.design = design_from_name(d);
        }
    }
    maybe(j, "n_classes", c.n_classes);
    maybe(j, "images_per_class", c.images_per_class);
    maybe(j, "sessions", c.sessions);
    maybe(j, "subjects", c.subjects);
    maybe(j, "block_size", c.block_size);
    if (j.contains("pipeline"))
        c.preprocess.pipeline =
            pipeline_from_name(j.at("pipeline").get<std::string>());
    if (j.contains("band")) {
        auto b = j.at("band");
        if (!b.is_array() || b.size() != 2)
            throw ConfigError("band must be [low, high]");
        c.preprocess.band_lo = b[0].get<double>();
        c.preprocess.band_hi = b[1].get<double>();
    }
    maybe(j, "notch", c.preprocess.notch);
    maybe(j, "notch_hz", c.preprocess.notch_hz);
    maybe(j, "notch_q", c.preprocess.notch_q);
    maybe(j, "zero_phase", c.preprocess.zero_phase);
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        expect_keys(s, "synth",
                    {"evoked_amplitude", "evoked_band", "drift_amplitude",
                     "drift_timescale_s", "vigilance_tau_s", "noise_std",
                     "n_channels", "sampling_rate_hz"});
        maybe(s, "evoked_amplitude", c.synth.evoked_amplitude);
        if (s.contains("evoked_band")) {
            auto b = s.at("evoked_band");
            if (!b.is_array() || b.size() != 2)
                throw ConfigError("evoked_band must be [low, high]");
            c.synth.evoked_band = {b[0].get<double>(), b[1].get<double>()};
        }
        maybe(s, "drift_amplitude", c.synth.drift_amplitude);
        maybe(s, "drift_timescale_s", c.synth.drift_timescale_s);
        if (s.contains("vigilance_tau_s")) {
            if (s.at("vigilance_tau_s").is_null())
                c.synth.vigilance_tau_s =
                    std::numeric_limits<double>::infinity();
            else
                c.synth.vigilance_tau_s = s.at("vigilance_tau_s").get<double>();
        }
        maybe(s, "noise_std", c.synth.noise_std);
        maybe(s, "n_channels", c.synth.n_channels);
        maybe(s, "sampling_rate_hz", c.synth.sampling_rate_hz);
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        expect_keys(m, "model",
                    {"family", "head", "encoder_dim", "downsample_factor",
                     "hidden", "conv_filters", "kernel", "stride", "pool_bins"});
        if (m.contains("family"))
            c.model.family = family_from_name(m.at("family").get<std::string>());
        if (m.contains("head"))
            c.model.head = head_from_name(m.at("head").get<std::string>());
        maybe(m, "encoder_dim", c.model.encoder_dim);
        maybe(m, "downsample_factor", c.model.downsample_factor);
        maybe(m, "hidden", c.model.hidden);
        maybe(m, "conv_filters", c.model.conv_filters);
        maybe(m, "kernel", c.model.kernel);
        maybe(m, "stride", c.model.stride);
        maybe(m, "pool_bins", c.model.pool_bins);
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        expect_keys(t, "train", {"lr", "batch", "epochs"});
        maybe(t, "lr", c.train.lr);
        maybe(t, "batch", c.train.batch);
        maybe(t, "epochs", c.train.epochs);
    }
    if (j.contains("labels"))
        c.labels = label_kind_from_name(j.at("labels").get<std::string>());
    maybe(j, "analysis", c.analysis);
    maybe(j, "blank_leakage", c.report_blank_leakage);
    maybe(j, "one_hotness", c.report_one_hotness);
    if (j.contains("ratios")) {
        auto r = j.at("ratios");
        if (!r.is_array() || r.size() != 3)
            throw ConfigError("ratios must have 3 entries");
        for (int i = 0; i < 3; ++i)
            c.ratios[static_cast<std::size_t>(i)] = r[i].get<double>();
    }
    if (j.contains("seed")) {
        c.seed = j.at("seed").get<std::uint64_t>();
        c.has_seed = true;
    }
    return c;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
    try {
        return parse_config(j);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config value error: ") + e.what());
    }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["design"] = design_name(c.design);
    j["n_classes"] = c.n_classes;
    j["images_per_class"] = c.images_per_class;
    j["sessions"] = c.sessions;
    j["subjects"] = c.subjects;
    j["block_size"] = c.block_size;
    j["pipeline"] = pipeline_name(c.preprocess.pipeline);
    j["band"] = {c.preprocess.band_lo, c.preprocess.band_hi};
    j["notch"] = c.preprocess.notch;
    j["notch_hz"] = c.preprocess.notch_hz;
    j["notch_q"] = c.preprocess.notch_q;
    j["zero_phase"] = c.preprocess.zero_phase;
    j["synth"] = {
        {"evoked_amplitude", c.synth.evoked_amplitude},
        {"evoked_band", {c.synth.evoked_band.first, c.synth.evoked_band.second}},
        {"drift_amplitude", c.synth.drift_amplitude},
        {"drift_timescale_s", c.synth.drift_timescale_s},
        {"noise_std", c.synth.noise_std},
        {"n_channels", c.synth.n_channels},
        {"sampling_rate_hz", c.synth.sampling_rate_hz},
    };
    if (std::isinf(c.synth.vigilance_tau_s))
        j["synth"]["vigilance_tau_s"] = nullptr;
    else
        j["synth"]["vigilance_tau_s"] = c.synth.vigilance_tau_s;
    j["model"] = {
        {"family", family_name(c.model.family)},
        {"head", head_name(c.model.head)},
        {"encoder_dim", c.model.encoder_dim},
        {"downsample_factor", c.model.downsample_factor},
        {"hidden", c.model.hidden},
        {"conv_filters", c.model.conv_filters},
        {"kernel", c.model.kernel},
        {"stride", c.model.stride},
        {"pool_bins", c.model.pool_bins},
    };
    j["train"] = {
        {"lr", c.train.lr}, {"batch", c.train.batch}, {"epochs", c.train.epochs}};
    j["labels"] = label_kind_name(c.labels);
    j["analysis"] = c.analysis;
    j["blank_leakage"] = c.report_blank_leakage;
    j["one_hotness"] = c.report_one_hotness;
    j["ratios"] = {c.ratios[0], c.ratios[1], c.ratios[2]};
    j["seed"] = c.seed;
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return config_from_json(j);
}

std::uint64_t config_hash(const ExperimentConfig& c) {
    std::string s = config_to_json(c).dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : s) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash_hex(const ExperimentConfig& c) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(config_hash(c)));
    return buf;
}

DiagnosticReport run_experiment(const ExperimentConfig& c,
                                const std::string& out_dir) {
    c.validate();
    std::filesystem::create_directories(out_dir);

    StimulusSchedule sched =
        generate_schedule(c.design, c.n_classes, c.images_per_class, c.sessions,
                          derive_seed(c.seed, streams::schedule), c.block_size);
    auto patterns =
        make_spatial_patterns(c.n_classes, c.synth.n_channels,
                              derive_seed(c.seed, streams::patterns));

    std::vector<Segment> stimuli, blanks;
    for (std::uint32_t s = 0; s < c.subjects; ++s) {
        NeuralModelParams p = c.synth;
        p.subject_id = s;
        p.seed = derive_seed(c.seed, streams::subject_base + s);
        p.spatial_patterns = patterns;
        Recording rec = synthesize_recording(sched, p);
        SegmentedData segs = run_pipeline(rec, sched, c.preprocess);
        for (auto& seg : segs.stimuli) stimuli.push_back(std::move(seg));
        for (auto& seg : segs.blanks) blanks.push_back(std::move(seg));
    }

    DatasetSplit split =
        make_splits(stimuli, c.ratios, derive_seed(c.seed, streams::split));

    int n_blocks = 0;
    for (const auto& s : stimuli)
        n_blocks = std::max(n_blocks, static_cast<int>(s.block_index) + 1);
    ModelSpec mspec = c.model;
    mspec.n_channels = c.synth.n_channels;
    mspec.input_len = 440;
    mspec.n_classes = (c.labels == LabelKind::block_label)
                          ? static_cast<std::size_t>(n_blocks)
                          : c.n_classes;
    if (c.labels == LabelKind::block_label && n_blocks < 2)
        throw ConfigError("block-label experiment needs >= 2 blocks");
    mspec = mspec.resolved();
    std::string model_tag =
        family_name(mspec.family) + "/" + head_name(mspec.head);

    DiagnosticReport rep;
    rep.experiment = c.name;
    rep.metadata["design"] = design_name(c.design);
    rep.metadata["pipeline"] = pipeline_name(c.preprocess.pipeline);
    rep.metadata["labels"] = label_kind_name(c.labels);
    rep.metadata["model"] = model_tag;
    rep.metadata["seed"] = std::to_string(c.seed);
    rep.metadata["config_hash"] = config_hash_hex(c);

    std::vector<std::uint32_t> subjects(c.subjects);
    for (std::uint32_t s = 0; s < c.subjects; ++s) subjects[s] = s;
    const double chance_pct = 100.0 / static_cast<double>(mspec.n_classes);

    bool want_pooled = c.analysis == "pooled" || c.analysis == "both";
    bool want_per_subject =
        c.analysis == "per-subject" || c.analysis == "both";

    std::vector<TrainedModel> subject_models;
    TrainedModel pooled_model;

    if (want_pooled) {
        TrainConfig cfg = c.train;
        cfg.seed = derive_seed(c.seed, streams::pooled_train);
        pooled_model = build(mspec, derive_seed(c.seed, streams::pooled_init));
        pooled_model = train(std::move(pooled_model), stimuli, split.train,
                             split.val, c.labels, cfg);
        ReportRow row;
        row.name = "pooled";
        row.model = model_tag;
        row.condition = pipeline_name(c.preprocess.pipeline);
        row.chance = chance_pct;
        row.accuracy =
            100.0 * evaluate(pooled_model, stimuli, split.test, c.labels);
        if (c.subjects >= 2)
            for (std::uint32_t s : subjects) {
                DatasetSplit sub = filter_split(split, stimuli, s);
                if (!sub.test.empty())
                    row.per_subject.push_back(
                        100.0 * evaluate(pooled_model, stimuli, sub.test,
                                         c.labels));
            }
        row.finalize();
        rep.rows.push_back(row);
    }

    if (want_per_subject) {
        ReportRow row;
        row.name = "per-subject";
        row.model = model_tag;
        row.condition = pipeline_name(c.preprocess.pipeline);
        row.chance = chance_pct;
        for (std::uint32_t s : subjects) {
            DatasetSplit sub = filter_split(split, stimuli, s);
            if (sub.train.empty() || sub.val.empty() || sub.test.empty())
                throw SubjectError("subject " + std::to_string(s) +
                                   " has an empty split");
            TrainConfig cfg = c.train;
            cfg.seed = derive_seed(c.seed, streams::per_subject_train + s);
            TrainedModel m = build(mspec, derive_seed(c.seed, streams::per_subject_init + s));
            m = train(std::move(m), stimuli, sub.train, sub.val, c.labels, cfg);
            row.per_subject.push_back(100.0 *
                                      evaluate(m, stimuli, sub.test, c.labels));
            subject_models.push_back(std::move(m));
        }
        row.finalize();
        row.accuracy = row.mean;
        row.increase_over_chance = row.accuracy - row.chance;
        rep.rows.push_back(row);
    }

    if (c.report_blank_leakage) {
        if (blanks.empty())
            throw ConfigError("blank_leakage requested but the schedule "
                              "produced no blank segments");
        if (want_pooled) {
            ReportRow row = blank_leakage(pooled_model, blanks);
            row.name = "blank-leakage-pooled";
            row.condition = pipeline_name(c.preprocess.pipeline);
            rep.rows.push_back(row);
        }
        if (want_per_subject) {
            ReportRow row;
            row.name = "blank-leakage-per-subject";
            row.model = model_tag;
            row.condition = pipeline_name(c.preprocess.pipeline);
            row.chance = 100.0 * 2.0 / static_cast<double>(mspec.n_classes);
            for (std::size_t i = 0; i < subject_models.size(); ++i) {
                std::vector<Segment> own;
                for (const auto& b : blanks)
                    if (b.subject_id == subjects[i]) own.push_back(b);
                row.per_subject.push_back(
                    100.0 *
                    evaluate(subject_models[i], own, LabelKind::blank_pair));
            }
            row.finalize();
            row.accuracy = row.mean;
            row.increase_over_chance = row.accuracy - row.chance;
            rep.rows.push_back(row);
        }
    }

    if (c.report_one_hotness) {
        const TrainedModel& enc_model =
            want_pooled ? pooled_model : subject_models.front();
        auto means = class_mean_encodings(enc_model, stimuli, split.test);
        auto oh = one_hotness(encoding_matrix(means));
        ReportRow row;
        row.name = "one-hotness-trained";
        row.model = model_tag;
        row.condition = "trained";
        row.extra["oh"] = oh.oh;
        row.extra["underflow"] = oh.underflow ? 1.0 : 0.0;
        rep.rows.push_back(row);

        TrainedModel fresh = build(mspec, derive_seed(c.seed, streams::untrained));
        auto umeans = class_mean_encodings(fresh, stimuli, split.test);
        auto uoh = one_hotness(encoding_matrix(umeans));
        ReportRow urow;
        urow.name = "one-hotness-untrained";
        urow.model = model_tag;
        urow.condition = "untrained";
        urow.extra["oh"] = uoh.oh;
        urow.extra["underflow"] = uoh.underflow ? 1.0 : 0.0;
        rep.rows.push_back(urow);
    }

    write_report_csv(out_dir + "/report.csv", rep);
    write_report_json(out_dir + "/report.json", rep);

    nlohmann::json manifest = {
        {"name", c.name},
        {"version", kVersion},
        {"seed", c.seed},
        {"config_hash", config_hash_hex(c)},
        {"config", config_to_json(c)},
        {"resolved",
         {{"param_count", mspec.param_count()},
          {"downsample_factor", mspec.downsample_factor},
          {"n_model_classes", mspec.n_classes},
          {"n_blocks", n_blocks},
          {"n_stimulus_segments", stimuli.size()},
          {"n_blank_segments", blanks.size()}}},
    };
    std::ofstream os(out_dir + "/manifest.json");
    if (!os) throw DataError("cannot write manifest");
    os << manifest.dump(2) << "\n";
    return rep;
}

DiagnosticReport sweep_experiment(const ExperimentConfig& base,
                                  const std::vector<SweepValue>& values,
                                  const std::string& out_dir, unsigned jobs,
                                  bool fresh_seeds) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    std::filesystem::create_directories(out_dir);
    std::vector<DiagnosticReport> partial(values.size());
    std::vector<std::string> errors(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            try {
                ExperimentConfig c = base;
                values[i].apply(c);
                if (fresh_seeds)
                    c.seed = derive_seed(base.seed, 0xF5EED + i);
                partial[i] =
                    run_experiment(c, out_dir + "/" + values[i].label);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    unsigned n_threads = std::max(1u, std::min<unsigned>(
                                          jobs, static_cast<unsigned>(
                                                    values.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!errors[i].empty())
            throw Error("sweep entry '" + values[i].label +
                        "' failed: " + errors[i]);

    DiagnosticReport merged;
    merged.experiment = base.name + "-sweep";
    merged.metadata["seed"] = std::to_string(base.seed);
    merged.metadata["fresh_seeds"] = fresh_seeds ? "true" : "false";
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (ReportRow row : partial[i].rows) {
            row.name = values[i].label + ":" + row.name;
            merged.rows.push_back(std::move(row));
        }
    }
    write_report_csv(out_dir + "/report.csv", merged);
    write_report_json(out_dir + "/report.json", merged);
    return merged;
}

}  // namespace eeglab
