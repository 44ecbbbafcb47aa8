#include "eeglab/schedule.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "eeglab/rng.hpp"

namespace eeglab {

std::string design_name(Design d) {
    return d == Design::block ? "block" : "rapid";
}

Design design_from_name(const std::string& name) {
    if (name == "block") return Design::block;
    if (name == "rapid") return Design::rapid;
    throw SpecError("unknown design: " + name);
}

std::uint64_t StimulusSchedule::total_duration_ms() const {
    if (events.empty()) return 0;
    const auto& last = events.back();
    return last.onset_ms + last.duration_ms;
}

std::size_t StimulusSchedule::n_stimuli() const {
    std::size_t n = 0;
    for (const auto& e : events)
        if (!e.is_blank()) ++n;
    return n;
}

std::uint32_t StimulusSchedule::n_blocks() const {
    std::uint32_t hi = 0;
    bool any = false;
    for (const auto& e : events) {
        if (e.is_blank()) continue;
        hi = std::max(hi, e.block_index);
        any = true;
    }
    return any ? hi + 1 : 0;
}

std::uint32_t StimulusSchedule::n_sessions() const {
    std::uint32_t hi = 0;
    for (const auto& e : events) hi = std::max(hi, e.session_index);
    return events.empty() ? 0 : hi + 1;
}

int StimulusSchedule::n_classes() const {
    int hi = -1;
    for (const auto& e : events)
        if (!e.is_blank()) hi = std::max(hi, e.class_id);
    return hi + 1;
}

StimulusSchedule generate_schedule(Design design, std::uint32_t n_classes,
                                   std::uint32_t images_per_class,
                                   std::uint32_t sessions, std::uint64_t seed,
                                   std::uint32_t block_size) {
    if (n_classes < 2) throw SpecError("need at least 2 classes");
    if (images_per_class < 1) throw SpecError("need at least 1 image per class");
    if (sessions < 1) throw SpecError("need at least 1 session");
    if (block_size < 1) throw SpecError("block_size must be positive");

    StimulusSchedule sched;
    sched.design = design;
    DetRng rng(derive_seed(seed, 0xb10c));

    std::uint64_t t = 0;
    std::uint32_t block = 0;

    auto push_stimulus = [&](int cls, std::uint32_t img_idx,
                             std::uint32_t session) {
        StimulusEvent e;
        e.onset_ms = t;
        e.duration_ms = sched.stimulus_duration_ms;
        e.class_id = cls;
        e.block_index = block;
        e.session_index = session;
        e.image_id = static_cast<std::uint32_t>(cls) * images_per_class + img_idx;
        sched.events.push_back(e);
        t += e.duration_ms;
    };
    auto push_blank = [&](std::uint32_t session) {
        StimulusEvent e;
        e.onset_ms = t;
        e.duration_ms = sched.blank_duration_ms;
        e.class_id = kBlankLabel;
        e.block_index = block;  // index of the preceding block
        e.session_index = session;
        sched.events.push_back(e);
        t += e.duration_ms;
    };

    if (design == Design::block) {
        if (sessions > n_classes)
            throw SpecError("more sessions than classes in block design");
        // Classes 0..n-1 split into consecutive per-session groups, extras
        // going to the earliest sessions; presentation order is shuffled
        // within each session.
        std::uint32_t base = n_classes / sessions, extra = n_classes % sessions;
        std::uint32_t next_class = 0;
        for (std::uint32_t s = 0; s < sessions; ++s) {
            std::uint32_t count = base + (s < extra ? 1 : 0);
            std::vector<int> cls(count);
            std::iota(cls.begin(), cls.end(), static_cast<int>(next_class));
            next_class += count;
            rng.shuffle(cls);
            for (std::uint32_t b = 0; b < count; ++b) {
                std::vector<std::uint32_t> order(images_per_class);
                std::iota(order.begin(), order.end(), 0u);
                rng.shuffle(order);
                for (std::uint32_t img : order) push_stimulus(cls[b], img, s);
                if (b + 1 < count) {
                    push_blank(s);
                }
                ++block;
            }
        }
    } else {
        // Rapid: one session, global permutation of all stimuli.
        std::vector<std::pair<int, std::uint32_t>> stimuli;
        stimuli.reserve(static_cast<std::size_t>(n_classes) * images_per_class);
        for (std::uint32_t c = 0; c < n_classes; ++c)
            for (std::uint32_t i = 0; i < images_per_class; ++i)
                stimuli.emplace_back(static_cast<int>(c), i);
        rng.shuffle(stimuli);
        for (std::size_t k = 0; k < stimuli.size(); ++k) {
            push_stimulus(stimuli[k].first, stimuli[k].second, 0);
            bool block_end = (k + 1) % block_size == 0;
            if (block_end || k + 1 == stimuli.size()) {
                if (k + 1 < stimuli.size()) push_blank(0);
                ++block;
            }
        }
    }
    return sched;
}

std::vector<std::uint32_t> assign_block_labels(const StimulusSchedule& sched) {
    if (sched.n_blocks() == 0) throw SpecError("schedule has no blocks");
    std::vector<std::uint32_t> labels;
    labels.reserve(sched.n_stimuli());
    for (const auto& e : sched.events)
        if (!e.is_blank()) labels.push_back(e.block_index);
    return labels;
}

nlohmann::json schedule_to_json(const StimulusSchedule& sched) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : sched.events) {
        events.push_back({{"onset_ms", e.onset_ms},
                          {"duration_ms", e.duration_ms},
                          {"class_id", e.class_id},
                          {"block_index", e.block_index},
                          {"session_index", e.session_index},
                          {"image_id", e.image_id}});
    }
    return {{"design", design_name(sched.design)}, {"events", events}};
}

StimulusSchedule schedule_from_json(const nlohmann::json& j) {
    StimulusSchedule sched;
    sched.design = design_from_name(j.at("design").get<std::string>());
    for (const auto& je : j.at("events")) {
        StimulusEvent e;
        e.onset_ms = je.at("onset_ms").get<std::uint64_t>();
        e.duration_ms = je.at("duration_ms").get<std::uint64_t>();
        e.class_id = je.at("class_id").get<int>();
        e.block_index = je.at("block_index").get<std::uint32_t>();
        e.session_index = je.at("session_index").get<std::uint32_t>();
        e.image_id = je.at("image_id").get<std::uint32_t>();
        sched.events.push_back(e);
        if (!e.is_blank() && e.duration_ms > 0)
            sched.stimulus_duration_ms = e.duration_ms;
        if (e.is_blank() && e.duration_ms > 0)
            sched.blank_duration_ms = e.duration_ms;
    }
    return sched;
}

void save_schedule(const std::string& path, const StimulusSchedule& sched) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << schedule_to_json(sched).dump(2) << "\n";
}

StimulusSchedule load_schedule(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open for reading: " + path);
    nlohmann::json j;
    is >> j;
    return schedule_from_json(j);
}

}  // namespace eeglab
