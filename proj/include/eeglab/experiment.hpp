#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eeglab/diagnostics.hpp"
#include "eeglab/model.hpp"
#include "eeglab/pipeline.hpp"
#include "eeglab/schedule.hpp"
#include "eeglab/synth.hpp"
#include "eeglab/train.hpp"

namespace eeglab {

// Full description of one seeded experiment. Output locations are passed
// separately so the manifest hash only covers what shapes the numbers.
struct ExperimentConfig {
    std::string name = "experiment";
    Design design = Design::block;
    std::uint32_t n_classes = 10;
    std::uint32_t images_per_class = 10;
    std::uint32_t sessions = 1;
    std::uint32_t subjects = 2;
    std::uint32_t block_size = 50;  // rapid design presentation blocks
    PreprocessSpec preprocess;
    NeuralModelParams synth;  // subject_id/seed/patterns filled per run
    ModelSpec model;          // n_channels/input_len/n_classes set per run
    TrainConfig train;
    LabelKind labels = LabelKind::class_label;
    std::string analysis = "pooled";  // pooled | per-subject | both
    bool report_blank_leakage = false;
    bool report_one_hotness = false;
    std::array<double, 3> ratios{0.8, 0.1, 0.1};
    std::uint64_t seed = 0;
    bool has_seed = false;

    void validate() const;  // throws ConfigError
};

// Sub-seed stream tags shared by run_experiment and the staged CLI
// commands, so `synth` + `preprocess` + `train` reproduce a `run` exactly.
namespace streams {
inline constexpr std::uint64_t schedule = 0x10;
inline constexpr std::uint64_t patterns = 0x11;
inline constexpr std::uint64_t split = 0x12;
inline constexpr std::uint64_t pooled_init = 0x13;
inline constexpr std::uint64_t pooled_train = 0x14;
inline constexpr std::uint64_t untrained = 0x15;
inline constexpr std::uint64_t subject_base = 0x1000;
inline constexpr std::uint64_t per_subject_init = 0x2000;
inline constexpr std::uint64_t per_subject_train = 0x3000;
}  // namespace streams

// Strict parser: unknown keys anywhere are a ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the canonical JSON serialization.
std::uint64_t config_hash(const ExperimentConfig& c);
std::string config_hash_hex(const ExperimentConfig& c);

// synth -> preprocess -> split -> train -> diagnose; writes report.csv,
// report.json and manifest.json into out_dir.
DiagnosticReport run_experiment(const ExperimentConfig& c,
                                const std::string& out_dir);

struct SweepValue {
    std::string label;
    std::function<void(ExperimentConfig&)> apply;
};

// One run per value; rows are merged in value order. jobs > 1 runs entries
// concurrently.
DiagnosticReport sweep_experiment(const ExperimentConfig& base,
                                  const std::vector<SweepValue>& values,
                                  const std::string& out_dir, unsigned jobs,
                                  bool fresh_seeds);

}  // namespace eeglab
