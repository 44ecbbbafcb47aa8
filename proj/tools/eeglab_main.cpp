// eeglab — synthetic EEG generation, preprocessing, training and
// leakage diagnostics from one seeded JSON config.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eeglab/checkpoint.hpp"
#include "eeglab/eegb.hpp"
#include "eeglab/experiment.hpp"
#include "eeglab/rng.hpp"

namespace fs = std::filesystem;
using namespace eeglab;

namespace {

// Table-1 frequency bands, minus the 45-55 Hz power-line range.
const std::vector<std::string> kBandPresets = {"5-32", "32-45", "55-95",
                                               "32-95", "5-95"};

struct Overrides {
    std::string design, model, head, labels, analysis, pipeline;
    std::vector<double> band;
    std::optional<std::uint64_t> seed;
    bool blank_leakage = false;
    bool one_hotness = false;
    bool notch_on = false;
    bool notch_off = false;
    std::optional<std::uint32_t> subjects, n_classes, images_per_class,
        sessions, channels;
    std::optional<std::size_t> epochs;
    std::optional<double> evoked, drift;
};

ExperimentConfig make_config(const std::string& config_path,
                             const Overrides& o) {
    ExperimentConfig c;
    if (!config_path.empty()) c = load_config(config_path);
    try {
        if (!o.design.empty()) {
            if (o.design == "blank") {
                c.design = Design::block;
                c.report_blank_leakage = true;
            } else {
                c.design = design_from_name(o.design);
            }
        }
        if (!o.model.empty()) c.model.family = family_from_name(o.model);
        if (!o.head.empty()) c.model.head = head_from_name(o.head);
        if (!o.labels.empty()) c.labels = label_kind_from_name(o.labels);
        if (!o.pipeline.empty())
            c.preprocess.pipeline = pipeline_from_name(o.pipeline);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (!o.band.empty()) {
        c.preprocess.band_lo = o.band[0];
        c.preprocess.band_hi = o.band[1];
    }
    if (!o.analysis.empty()) c.analysis = o.analysis;
    if (o.notch_on) c.preprocess.notch = true;
    if (o.notch_off) c.preprocess.notch = false;
    if (o.blank_leakage) c.report_blank_leakage = true;
    if (o.one_hotness) c.report_one_hotness = true;
    if (o.subjects) c.subjects = *o.subjects;
    if (o.n_classes) c.n_classes = *o.n_classes;
    if (o.images_per_class) c.images_per_class = *o.images_per_class;
    if (o.sessions) c.sessions = *o.sessions;
    if (o.channels) c.synth.n_channels = *o.channels;
    if (o.epochs) c.train.epochs = *o.epochs;
    if (o.evoked) c.synth.evoked_amplitude = *o.evoked;
    if (o.drift) c.synth.drift_amplitude = *o.drift;
    if (o.seed) {
        c.seed = *o.seed;
        c.has_seed = true;
    } else if (!c.has_seed) {
        if (const char* env = std::getenv("EEGLAB_SEED")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end == env || *end != '\0')
                throw ConfigError("EEGLAB_SEED is not an unsigned integer");
            c.seed = v;
            c.has_seed = true;
        }
    }
    return c;
}

void print_report(const DiagnosticReport& rep) {
    for (const auto& r : rep.rows) {
        auto oh = r.extra.find("oh");
        if (oh != r.extra.end()) {
            std::printf("%-32s %-28s %-12s OH %.6g\n", r.name.c_str(),
                        r.model.c_str(), r.condition.c_str(), oh->second);
            continue;
        }
        std::printf("%-32s %-28s %-12s acc %6.2f%%  chance %5.2f%%  "
                    "+%.2f\n",
                    r.name.c_str(), r.model.c_str(), r.condition.c_str(),
                    r.accuracy, r.chance, r.increase_over_chance);
    }
}

// EEGB files carry no image ids or blank neighbours; rebuild both from the
// schedule sidecar by onset, mirroring segment_recording.
void attach_schedule_metadata(std::vector<Segment>& segs,
                              const StimulusSchedule& sched) {
    const auto& events = sched.events;
    for (auto& seg : segs) {
        if (!seg.is_blank()) {
            bool found = false;
            for (const auto& e : events)
                if (!e.is_blank() && e.onset_ms == seg.onset_ms) {
                    seg.image_id = e.image_id;
                    found = true;
                    break;
                }
            if (!found)
                throw DataError("stimulus segment at " +
                                std::to_string(seg.onset_ms) +
                                " ms not present in the schedule");
        } else {
            std::size_t host = events.size();
            for (std::size_t i = 0; i < events.size(); ++i)
                if (events[i].is_blank() &&
                    seg.onset_ms >= events[i].onset_ms &&
                    seg.onset_ms <
                        events[i].onset_ms + events[i].duration_ms) {
                    host = i;
                    break;
                }
            if (host == events.size())
                throw DataError("blank segment at " +
                                std::to_string(seg.onset_ms) +
                                " ms lies outside every scheduled blank");
            int prev = kBlankLabel, next = kBlankLabel;
            for (std::size_t j = host; j-- > 0;)
                if (!events[j].is_blank()) {
                    prev = events[j].class_id;
                    break;
                }
            for (std::size_t j = host + 1; j < events.size(); ++j)
                if (!events[j].is_blank()) {
                    next = events[j].class_id;
                    break;
                }
            seg.blank_neighbors = {prev, next};
        }
    }
}

std::string subject_file(std::uint32_t s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "subject_%02u.eegb", s);
    return buf;
}

void write_manifest(const std::string& path, nlohmann::json j) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
}

int cmd_synth(const ExperimentConfig& cfg, const std::string& out) {
    cfg.validate();
    fs::create_directories(out);
    auto sched = generate_schedule(cfg.design, cfg.n_classes,
                                   cfg.images_per_class, cfg.sessions,
                                   derive_seed(cfg.seed, streams::schedule),
                                   cfg.block_size);
    save_schedule(out + "/schedule.json", sched);
    auto patterns =
        make_spatial_patterns(cfg.n_classes, cfg.synth.n_channels,
                              derive_seed(cfg.seed, streams::patterns));
    for (std::uint32_t s = 0; s < cfg.subjects; ++s) {
        NeuralModelParams p = cfg.synth;
        p.subject_id = s;
        p.seed = derive_seed(cfg.seed, streams::subject_base + s);
        p.spatial_patterns = patterns;
        Recording rec = synthesize_recording(sched, p);
        SegmentFile f;
        f.n_channels = static_cast<std::uint32_t>(rec.n_channels());
        f.sampling_rate_hz =
            static_cast<std::uint32_t>(rec.sampling_rate_hz);
        Segment whole;
        whole.samples = std::move(rec.samples);
        whole.class_label = kBlankLabel;
        whole.subject_id = s;
        f.segments.push_back(std::move(whole));
        write_eegb(out + "/" + subject_file(s), f);
    }
    write_manifest(out + "/manifest.json",
                   {{"command", "synth"},
                    {"version", kVersion},
                    {"seed", cfg.seed},
                    {"config_hash", config_hash_hex(cfg)},
                    {"config", config_to_json(cfg)},
                    {"subjects", cfg.subjects},
                    {"duration_ms", sched.total_duration_ms()},
                    {"n_events", sched.events.size()}});
    std::printf("synth: %u subject(s), %zu events, %.1f s each -> %s\n",
                cfg.subjects, sched.events.size(),
                static_cast<double>(sched.total_duration_ms()) / 1000.0,
                out.c_str());
    return 0;
}

int cmd_preprocess(const ExperimentConfig& cfg, const std::string& in,
                   const std::string& out) {
    auto sched = load_schedule(in + "/schedule.json");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(in)) {
        std::string name = e.path().filename().string();
        if (name.rfind("subject_", 0) == 0 &&
            name.size() > 5 && name.substr(name.size() - 5) == ".eegb")
            files.push_back(e.path().string());
    }
    if (files.empty())
        throw DataError("no subject_*.eegb recordings in " + in);
    std::sort(files.begin(), files.end());

    SegmentFile stim, blank;
    for (const auto& path : files) {
        SegmentFile f = read_eegb(path);
        if (f.segments.size() != 1)
            throw DataError(path + ": expected one continuous segment");
        Recording rec;
        rec.samples = std::move(f.segments[0].samples);
        rec.sampling_rate_hz = f.sampling_rate_hz;
        rec.subject_id = f.segments[0].subject_id;
        rec.session_id = f.segments[0].session_id;
        SegmentedData d = run_pipeline(rec, sched, cfg.preprocess);
        stim.n_channels = blank.n_channels = f.n_channels;
        stim.sampling_rate_hz = blank.sampling_rate_hz = f.sampling_rate_hz;
        for (auto& s : d.stimuli) stim.segments.push_back(std::move(s));
        for (auto& s : d.blanks) blank.segments.push_back(std::move(s));
    }
    fs::create_directories(out);
    write_eegb(out + "/stimuli.eegb", stim);
    write_eegb(out + "/blanks.eegb", blank);
    save_schedule(out + "/schedule.json", sched);
    write_manifest(out + "/manifest.json",
                   {{"command", "preprocess"},
                    {"version", kVersion},
                    {"pipeline", pipeline_name(cfg.preprocess.pipeline)},
                    {"band", {cfg.preprocess.band_lo, cfg.preprocess.band_hi}},
                    {"notch", cfg.preprocess.notch},
                    {"zero_phase", cfg.preprocess.zero_phase},
                    {"n_stimuli", stim.segments.size()},
                    {"n_blanks", blank.segments.size()}});
    std::printf("preprocess (%s): %zu stimulus, %zu blank segments -> %s\n",
                pipeline_name(cfg.preprocess.pipeline).c_str(),
                stim.segments.size(), blank.segments.size(), out.c_str());
    return 0;
}

// Shared loader for train/diagnose: segments + schedule metadata + split.
struct LoadedData {
    SegmentFile stim;
    StimulusSchedule sched;
    DatasetSplit split;
    ModelSpec spec;  // resolved against the data
    int n_blocks = 0;
};

LoadedData load_for_training(const ExperimentConfig& cfg,
                             const std::string& in) {
    LoadedData d;
    d.sched = load_schedule(in + "/schedule.json");
    d.stim = read_eegb(in + "/stimuli.eegb");
    if (d.stim.segments.empty()) throw DataError("stimuli.eegb is empty");
    attach_schedule_metadata(d.stim.segments, d.sched);
    d.split = make_splits(d.stim.segments, cfg.ratios,
                          derive_seed(cfg.seed, streams::split));
    for (const auto& s : d.stim.segments)
        d.n_blocks = std::max(d.n_blocks, static_cast<int>(s.block_index) + 1);
    int n_classes = 0;
    for (const auto& s : d.stim.segments)
        n_classes = std::max(n_classes, s.class_label + 1);
    d.spec = cfg.model;
    d.spec.n_channels = d.stim.n_channels;
    d.spec.input_len = d.stim.segments[0].samples.cols;
    d.spec.n_classes = cfg.labels == LabelKind::block_label
                           ? static_cast<std::size_t>(d.n_blocks)
                           : static_cast<std::size_t>(n_classes);
    d.spec = d.spec.resolved();
    return d;
}

int cmd_train(const ExperimentConfig& cfg, const std::string& in,
              const std::string& out) {
    cfg.validate();
    LoadedData d = load_for_training(cfg, in);
    fs::create_directories(out);
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, streams::pooled_train);
    TrainedModel m =
        build(d.spec, derive_seed(cfg.seed, streams::pooled_init));
    m = train(std::move(m), d.stim.segments, d.split.train, d.split.val,
              cfg.labels, tc);
    save_model(out + "/model.eegm", m);
    write_history_csv(out + "/history.csv", m);
    double acc = evaluate(m, d.stim.segments, d.split.test, cfg.labels);
    double chance = chance_level(m.spec, cfg.labels);
    write_manifest(out + "/manifest.json",
                   {{"command", "train"},
                    {"version", kVersion},
                    {"seed", cfg.seed},
                    {"config_hash", config_hash_hex(cfg)},
                    {"model", family_name(d.spec.family)},
                    {"head", head_name(d.spec.head)},
                    {"labels", label_kind_name(cfg.labels)},
                    {"param_count", d.spec.param_count()},
                    {"checkpoint_epoch", m.checkpoint_epoch},
                    {"lowest_val_epoch", m.lowest_val_epoch},
                    {"test_accuracy", 100.0 * acc},
                    {"chance", 100.0 * chance},
                    {"n_train", d.split.train.size()},
                    {"n_val", d.split.val.size()},
                    {"n_test", d.split.test.size()}});
    std::printf("train %s/%s: test accuracy %.2f%% (chance %.2f%%) -> %s\n",
                family_name(d.spec.family).c_str(),
                head_name(d.spec.head).c_str(), 100.0 * acc, 100.0 * chance,
                out.c_str());
    return 0;
}

int cmd_diagnose(const ExperimentConfig& cfg, const std::string& in,
                 const std::string& model_path, bool d_blank, bool d_block,
                 bool d_subject, bool d_onehot, const std::string& out) {
    cfg.validate();
    if (!d_blank && !d_block && !d_subject && !d_onehot)
        throw ConfigError("pick at least one diagnostic: --blank-leakage, "
                          "--block-labels, --per-subject, --one-hotness");
    if ((d_blank || d_onehot) && model_path.empty())
        throw ConfigError("--model is required for --blank-leakage and "
                          "--one-hotness");
    LoadedData d = load_for_training(cfg, in);
    fs::create_directories(out);

    DiagnosticReport rep;
    rep.experiment = cfg.name;
    rep.metadata["seed"] = std::to_string(cfg.seed);
    rep.metadata["config_hash"] = config_hash_hex(cfg);
    rep.metadata["pipeline"] = pipeline_name(cfg.preprocess.pipeline);

    TrainedModel model;
    if (!model_path.empty()) model = load_model(model_path);

    if (d_blank) {
        SegmentFile blanks = read_eegb(in + "/blanks.eegb");
        if (blanks.segments.empty())
            throw DataError("blanks.eegb has no segments");
        attach_schedule_metadata(blanks.segments, d.sched);
        rep.rows.push_back(blank_leakage(model, blanks.segments));
    }
    if (d_block) {
        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg.seed, streams::pooled_train);
        rep.rows.push_back(block_label_leakage(
            d.stim.segments, d.split, d.spec, tc,
            derive_seed(cfg.seed, streams::pooled_init)));
    }
    if (d_subject) {
        TrainConfig tc = cfg.train;
        DiagnosticReport sub = per_subject_vs_pooled(
            d.stim.segments, d.split, d.spec, tc, cfg.labels, cfg.seed);
        for (auto& row : sub.rows) rep.rows.push_back(std::move(row));
    }
    if (d_onehot) {
        auto means =
            class_mean_encodings(model, d.stim.segments, d.split.test);
        auto oh = one_hotness(encoding_matrix(means));
        ReportRow row;
        row.name = "one-hotness-trained";
        row.model = family_name(model.spec.family) + "/" +
                    head_name(model.spec.head);
        row.condition = "trained";
        row.extra["oh"] = oh.oh;
        rep.rows.push_back(row);
        TrainedModel fresh =
            build(model.spec, derive_seed(cfg.seed, streams::untrained));
        auto um = class_mean_encodings(fresh, d.stim.segments, d.split.test);
        auto uoh = one_hotness(encoding_matrix(um));
        ReportRow urow = row;
        urow.name = "one-hotness-untrained";
        urow.condition = "untrained";
        urow.extra["oh"] = uoh.oh;
        rep.rows.push_back(urow);
    }
    write_report_csv(out + "/report.csv", rep);
    write_report_json(out + "/report.json", rep);
    print_report(rep);
    return 0;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& out) {
    DiagnosticReport rep = run_experiment(cfg, out);
    print_report(rep);
    std::printf("report -> %s/report.{csv,json}\n", out.c_str());
    return 0;
}

std::string num_label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
              std::vector<std::string> values, unsigned jobs,
              bool fresh_seeds, const std::string& out) {
    std::vector<SweepValue> sweep;
    if (axis == "band") {
        if (values.empty()) values = kBandPresets;
        for (const auto& v : values) {
            double lo = 0.0, hi = 0.0;
            if (std::sscanf(v.c_str(), "%lf-%lf", &lo, &hi) != 2)
                throw ConfigError("band value '" + v +
                                  "' is not of the form lo-hi");
            sweep.push_back({v, [lo, hi](ExperimentConfig& c) {
                                 c.preprocess.band_lo = lo;
                                 c.preprocess.band_hi = hi;
                             }});
        }
    } else if (axis == "drift") {
        if (values.empty())
            throw ConfigError("drift sweep needs --values amplitudes");
        for (const auto& v : values) {
            char* end = nullptr;
            double a = std::strtod(v.c_str(), &end);
            if (end == v.c_str() || *end != '\0')
                throw ConfigError("drift value '" + v + "' is not a number");
            sweep.push_back({num_label(a), [a](ExperimentConfig& c) {
                                 c.synth.drift_amplitude = a;
                             }});
        }
    } else if (axis == "duration") {
        if (values.empty()) values = {"4", "11", "23"};
        for (const auto& v : values) {
            char* end = nullptr;
            double mins = std::strtod(v.c_str(), &end);
            if (end == v.c_str() || *end != '\0' || mins <= 0.0)
                throw ConfigError("duration value '" + v +
                                  "' is not a positive number of minutes");
            sweep.push_back(
                {num_label(mins), [mins](ExperimentConfig& c) {
                     // Rapid-design block-label leakage at this duration: one
                     // session whose block count matches 35 s per block.
                     c.design = Design::rapid;
                     c.labels = LabelKind::block_label;
                     c.sessions = 1;
                     long m = std::max(
                         2L, std::lround((mins * 60.0 + 10.0) / 35.0));
                     long ipc = std::max(
                         1L, std::lround(static_cast<double>(m) *
                                         static_cast<double>(c.block_size) /
                                         static_cast<double>(c.n_classes)));
                     c.images_per_class = static_cast<std::uint32_t>(ipc);
                 }});
        }
    } else {
        throw ConfigError("axis must be band, duration or drift");
    }
    DiagnosticReport rep = sweep_experiment(cfg, sweep, out, jobs, fresh_seeds);
    print_report(rep);
    std::printf("report -> %s/report.{csv,json}\n", out.c_str());
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& out) {
    if (inputs.empty()) throw ConfigError("report needs input report.json files");
    DiagnosticReport merged;
    merged.experiment = "merged";
    std::string sources;
    for (const auto& path : inputs) {
        std::ifstream is(path);
        if (!is) throw DataError("cannot open report: " + path);
        nlohmann::json j;
        try {
            is >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ": " + e.what());
        }
        std::string exp = j.value("experiment", std::string("report"));
        if (!sources.empty()) sources += ";";
        sources += exp;
        for (const auto& jr : j.at("rows")) {
            ReportRow r;
            r.name = inputs.size() > 1 ? exp + ":" + jr.at("name").get<std::string>()
                                       : jr.at("name").get<std::string>();
            r.model = jr.value("model", std::string());
            r.condition = jr.value("condition", std::string());
            r.accuracy = jr.value("accuracy", 0.0);
            r.chance = jr.value("chance", 0.0);
            r.increase_over_chance = jr.value("increase_over_chance", 0.0);
            if (jr.contains("per_subject"))
                r.per_subject = jr.at("per_subject").get<std::vector<double>>();
            r.mean = jr.value("mean", 0.0);
            r.std_dev = jr.value("std", 0.0);
            if (jr.contains("extra"))
                r.extra =
                    jr.at("extra").get<std::map<std::string, double>>();
            merged.rows.push_back(std::move(r));
        }
    }
    merged.metadata["sources"] = sources;
    fs::create_directories(out);
    write_report_csv(out + "/report.csv", merged);
    write_report_json(out + "/report.json", merged);
    print_report(merged);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eeglab: synthetic EEG leakage diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string input_dir;
    std::string output_dir = "out";
    std::string model_path;
    std::string axis;
    std::vector<std::string> values, report_inputs;
    unsigned jobs = 1;
    bool fresh_seeds = false;
    bool d_blank = false, d_block = false, d_subject = false,
         d_onehot = false;
    Overrides o;

    auto add_common = [&](CLI::App* cmd, bool with_input) {
        cmd->add_option("-c,--config", config_path, "JSON experiment config");
        cmd->add_option("-o,--output", output_dir, "output directory");
        cmd->add_option("--seed", o.seed,
                        "seed override (fallback: EEGLAB_SEED)");
        if (with_input)
            cmd->add_option("-i,--input", input_dir, "input directory")
                ->required();
        cmd->add_option("--design", o.design, "block|rapid|blank");
        cmd->add_option("--band", o.band, "bandpass low high (Hz)")
            ->expected(2);
        cmd->add_flag("--notch", o.notch_on, "enable the 50 Hz notch");
        cmd->add_flag("--no-notch", o.notch_off,
                      "disable the 50 Hz notch");
        cmd->add_option("--pipeline", o.pipeline,
                        "proper|contaminated|none");
        cmd->add_option("--model", o.model,
                        "linear-softmax|channelwise-cnn|pooled-cnn|"
                        "recurrent-encoder");
        cmd->add_option("--head", o.head, "direct|fc40|relu-fc40|relu-only");
        cmd->add_option("--labels", o.labels, "class|block");
        cmd->add_option("--analysis", o.analysis,
                        "pooled|per-subject|both");
        cmd->add_flag("--blank-leakage", o.blank_leakage,
                      "also report blank-interval leakage");
        cmd->add_flag("--one-hotness", o.one_hotness,
                      "also report encoding one-hotness");
        cmd->add_option("--subjects", o.subjects, "number of subjects");
        cmd->add_option("--classes", o.n_classes, "number of classes");
        cmd->add_option("--images-per-class", o.images_per_class,
                        "stimuli per class");
        cmd->add_option("--sessions", o.sessions, "sessions (block design)");
        cmd->add_option("--channels", o.channels, "synthetic channel count");
        cmd->add_option("--epochs", o.epochs, "training epochs");
        cmd->add_option("--evoked", o.evoked, "evoked amplitude (uV)");
        cmd->add_option("--drift", o.drift, "drift amplitude (uV)");
    };

    CLI::App* run = app.add_subcommand("run", "full experiment -> report");
    add_common(run, false);

    CLI::App* synth =
        app.add_subcommand("synth", "write synthetic recordings + schedule");
    add_common(synth, false);

    CLI::App* pre = app.add_subcommand(
        "preprocess", "filter + segment recordings into EEGB datasets");
    add_common(pre, true);

    CLI::App* tr =
        app.add_subcommand("train", "train a model on preprocessed segments");
    add_common(tr, true);

    CLI::App* diag =
        app.add_subcommand("diagnose", "leakage diagnostics on a dataset");
    add_common(diag, true);
    diag->add_option("--model-file", model_path, "trained model (EEGM)");
    diag->add_flag("--blanks", d_blank, "blank-interval leakage");
    diag->add_flag("--block-labels", d_block, "block-label leakage");
    diag->add_flag("--per-subject", d_subject,
                   "per-subject vs pooled comparison");
    diag->add_flag("--encoding", d_onehot, "one-hotness of encodings");

    CLI::App* sweep =
        app.add_subcommand("sweep", "repeat an experiment along one axis");
    add_common(sweep, false);
    sweep->add_option("--axis", axis, "band|duration|drift")->required();
    sweep->add_option("--values", values,
                      "axis values (band: lo-hi; duration: minutes; "
                      "drift: amplitude)");
    sweep->add_option("--jobs", jobs, "max concurrent runs");
    sweep->add_flag("--fresh-seeds", fresh_seeds,
                    "derive a distinct seed per value");

    CLI::App* rpt = app.add_subcommand("report", "merge report.json files");
    rpt->add_option("-o,--output", output_dir, "output directory");
    rpt->add_option("inputs", report_inputs, "report.json files");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(rpt)) return cmd_report(report_inputs, output_dir);
        ExperimentConfig cfg = make_config(config_path, o);
        if (app.got_subcommand(run)) return cmd_run(cfg, output_dir);
        if (app.got_subcommand(synth)) return cmd_synth(cfg, output_dir);
        if (app.got_subcommand(pre))
            return cmd_preprocess(cfg, input_dir, output_dir);
        if (app.got_subcommand(tr)) return cmd_train(cfg, input_dir, output_dir);
        if (app.got_subcommand(diag))
            return cmd_diagnose(cfg, input_dir, model_path, d_blank, d_block,
                                d_subject, d_onehot, output_dir);
        if (app.got_subcommand(sweep))
            return cmd_sweep(cfg, axis, values, jobs, fresh_seeds, output_dir);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
