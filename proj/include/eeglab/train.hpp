#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eeglab/model.hpp"
#include "eeglab/recording.hpp"
#include "eeglab/splits.hpp"

namespace eeglab {

enum class LabelKind { class_label, block_label, blank_pair };

std::string label_kind_name(LabelKind k);
LabelKind label_kind_from_name(const std::string& s);

// Training label for a segment. blank_pair is an evaluation-only kind.
int label_of(const Segment& seg, LabelKind kind);

struct TrainConfig {
    double lr = 0.001;
    std::size_t batch = 16;
    std::size_t epochs = 200;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 0;
};

// Mini-batch Adam on cross-entropy. Deterministic given (model, data, cfg).
// Returns the checkpoint with the highest validation accuracy (ties go to
// the earliest epoch); full history is kept on the result.
TrainedModel train(TrainedModel model, const std::vector<Segment>& data,
                   const std::vector<std::size_t>& train_idx,
                   const std::vector<std::size_t>& val_idx, LabelKind kind,
                   const TrainConfig& cfg);

double evaluate(const TrainedModel& m, const std::vector<Segment>& data,
                const std::vector<std::size_t>& idx, LabelKind kind);
double evaluate(const TrainedModel& m, const std::vector<Segment>& segs,
                LabelKind kind);

// 1/K for class/block labels, 2/K for the blank-pair rule.
double chance_level(const ModelSpec& spec, LabelKind kind);

// Columns: epoch, train_loss, train_acc, val_acc.
void write_history_csv(const std::string& path, const TrainedModel& m);

}  // namespace eeglab
