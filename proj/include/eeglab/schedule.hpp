#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eeglab/common.hpp"

namespace eeglab {

enum class Design { block, rapid };

std::string design_name(Design d);
Design design_from_name(const std::string& name);

struct StimulusEvent {
    std::uint64_t onset_ms = 0;
    std::uint64_t duration_ms = 0;
    int class_id = kBlankLabel;  // kBlankLabel for blank intervals
    std::uint32_t block_index = 0;
    std::uint32_t session_index = 0;
    std::uint32_t image_id = 0;  // meaningful for stimulus events only

    bool is_blank() const { return class_id == kBlankLabel; }
};

struct StimulusSchedule {
    Design design = Design::block;
    std::uint64_t stimulus_duration_ms = 500;
    std::uint64_t blank_duration_ms = 10000;
    std::vector<StimulusEvent> events;

    std::uint64_t total_duration_ms() const;
    std::size_t n_stimuli() const;
    std::uint32_t n_blocks() const;
    std::uint32_t n_sessions() const;
    int n_classes() const;
};

// Block design: classes are partitioned over sessions; within a session each
// class forms one presentation block of images_per_class stimuli, blocks
// separated by 10 s blanks. Rapid design: one session, a seeded global
// permutation of all stimuli cut into presentation blocks of block_size,
// again separated by blanks.
StimulusSchedule generate_schedule(Design design, std::uint32_t n_classes,
                                   std::uint32_t images_per_class,
                                   std::uint32_t sessions, std::uint64_t seed,
                                   std::uint32_t block_size = 50);

// Block-order labels for every stimulus event, in event order.
std::vector<std::uint32_t> assign_block_labels(const StimulusSchedule& sched);

nlohmann::json schedule_to_json(const StimulusSchedule& sched);
StimulusSchedule schedule_from_json(const nlohmann::json& j);
void save_schedule(const std::string& path, const StimulusSchedule& sched);
StimulusSchedule load_schedule(const std::string& path);

}  // namespace eeglab
