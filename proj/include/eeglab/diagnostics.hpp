#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eeglab/linalg.hpp"
#include "eeglab/model.hpp"
#include "eeglab/pipeline.hpp"
#include "eeglab/splits.hpp"
#include "eeglab/synth.hpp"
#include "eeglab/train.hpp"

namespace eeglab {

// One report row. Accuracies are percent; increase_over_chance is exactly
// accuracy - chance in percent points.
struct ReportRow {
    std::string name;
    std::string model;
    std::string condition;
    double accuracy = 0.0;
    double chance = 0.0;
    double increase_over_chance = 0.0;
    std::vector<double> per_subject;
    double mean = 0.0;
    double std_dev = 0.0;  // population std; meaningful for >= 2 subjects
    std::map<std::string, double> extra;

    // Fills increase and the per-subject mean/std.
    void finalize();
};

struct DiagnosticReport {
    std::string experiment;
    std::map<std::string, std::string> metadata;
    std::vector<ReportRow> rows;
};

nlohmann::json report_to_json(const DiagnosticReport& rep);
void write_report_json(const std::string& path, const DiagnosticReport& rep);
void write_report_csv(const std::string& path, const DiagnosticReport& rep);

// Fraction of blank segments classified as one of their neighbouring
// classes; chance is 2/n_classes.
ReportRow blank_leakage(const TrainedModel& model,
                        const std::vector<Segment>& blanks);

// Trains spec on block labels over the given split and reports accuracy
// against 1/n_blocks chance.
ReportRow block_label_leakage(const std::vector<Segment>& data,
                              const DatasetSplit& split, const ModelSpec& spec,
                              const TrainConfig& cfg, std::uint64_t init_seed);

// (a) train+test per subject, (b) train pooled / test per subject.
DiagnosticReport per_subject_vs_pooled(const std::vector<Segment>& data,
                                       const DatasetSplit& split,
                                       const ModelSpec& spec,
                                       const TrainConfig& cfg, LabelKind kind,
                                       std::uint64_t seed);

// Gram matrix of unit-normalized class-mean encodings.
struct EncodingMatrix {
    Mat gram;
};

EncodingMatrix encoding_matrix(
    const std::vector<std::vector<double>>& class_means);

struct OneHotnessResult {
    double oh = 0.0;
    bool underflow = false;
};

// OH = |det(A - I)|.
OneHotnessResult one_hotness(const EncodingMatrix& enc);

// Class-mean encoder outputs over the indexed segments; every class of the
// model must be represented.
std::vector<std::vector<double>> class_mean_encodings(
    const TrainedModel& model, const std::vector<Segment>& data,
    const std::vector<std::size_t>& idx);

struct DurationSweepOptions {
    std::vector<double> minutes;
    std::uint32_t n_classes = 10;
    std::uint32_t block_size = 50;
    PreprocessSpec preprocess;
    std::array<double, 3> ratios{0.8, 0.1, 0.1};
    std::uint64_t seed = 0;
};

// For each duration, builds a rapid-design session of matching length and
// reports block-label increase over chance.
DiagnosticReport duration_sweep(const DurationSweepOptions& opt,
                                const NeuralModelParams& params,
                                const ModelSpec& spec, const TrainConfig& cfg);

}  // namespace eeglab
