#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <vector>

#include "eeglab/schedule.hpp"

using namespace eeglab;

namespace {

void check_ordered_non_overlapping(const StimulusSchedule& s) {
    for (std::size_t i = 1; i < s.events.size(); ++i) {
        const auto& prev = s.events[i - 1];
        const auto& cur = s.events[i];
        CHECK(cur.onset_ms >= prev.onset_ms + prev.duration_ms);
    }
}

}  // namespace

TEST_CASE("block design matches the four-session timing") {
    auto s = generate_schedule(Design::block, 40, 50, 4, 7);
    CHECK(s.design == Design::block);
    CHECK(s.n_stimuli() == 2000);
    CHECK(s.n_blocks() == 40);
    CHECK(s.n_sessions() == 4);
    check_ordered_non_overlapping(s);

    // Per session: 10 class blocks of 50 x 0.5 s separated by 9 x 10 s
    // blanks, i.e. a 340 s span.
    for (std::uint32_t sess = 0; sess < 4; ++sess) {
        std::uint64_t lo = ~0ull, hi = 0;
        std::size_t n_blanks = 0;
        std::set<int> classes;
        for (const auto& e : s.events) {
            if (e.session_index != sess) continue;
            lo = std::min(lo, e.onset_ms);
            hi = std::max(hi, e.onset_ms + e.duration_ms);
            if (e.is_blank())
                ++n_blanks;
            else
                classes.insert(e.class_id);
        }
        CHECK(hi - lo == 340000);
        CHECK(n_blanks == 9);
        // Classes are partitioned in consecutive runs of 10 per session.
        CHECK(classes.size() == 10);
        CHECK(*classes.begin() == static_cast<int>(sess * 10));
        CHECK(*classes.rbegin() == static_cast<int>(sess * 10 + 9));
    }
    CHECK(s.total_duration_ms() == 4 * 340000);
}

TEST_CASE("within a block all class ids are equal and blocks map to classes") {
    auto s = generate_schedule(Design::block, 12, 5, 3, 21);
    std::map<std::uint32_t, std::set<int>> block_classes;
    for (const auto& e : s.events)
        if (!e.is_blank()) block_classes[e.block_index].insert(e.class_id);
    CHECK(block_classes.size() == 12);
    std::set<int> seen;
    for (const auto& [blk, classes] : block_classes) {
        CHECK(classes.size() == 1);  // one class per block
        seen.insert(*classes.begin());
    }
    CHECK(seen.size() == 12);  // ...and each class owns exactly one block
}

TEST_CASE("rapid design matches the 11.5 minute timing") {
    auto s = generate_schedule(Design::rapid, 40, 25, 1, 3);
    CHECK(s.n_stimuli() == 1000);
    CHECK(s.n_blocks() == 20);
    CHECK(s.n_sessions() == 1);
    check_ordered_non_overlapping(s);
    // 1000 x 0.5 s of stimulus plus 19 x 10 s blanks.
    CHECK(s.total_duration_ms() == 690000);

    auto labels = assign_block_labels(s);
    REQUIRE(labels.size() == 1000);
    std::map<std::uint32_t, std::size_t> counts;
    for (auto l : labels) ++counts[l];
    CHECK(counts.size() == 20);
    for (std::uint32_t b = 0; b < 20; ++b) CHECK(counts[b] == 50);

    // Blocks cut a global permutation, so each mixes several true classes.
    std::map<std::uint32_t, std::set<int>> block_classes;
    for (const auto& e : s.events)
        if (!e.is_blank()) block_classes[e.block_index].insert(e.class_id);
    for (const auto& [blk, classes] : block_classes) CHECK(classes.size() >= 2);
}

TEST_CASE("every image id appears exactly once") {
    for (auto s : {generate_schedule(Design::rapid, 8, 6, 1, 5),
                   generate_schedule(Design::block, 8, 6, 2, 5)}) {
        std::vector<std::uint32_t> ids;
        for (const auto& e : s.events)
            if (!e.is_blank()) ids.push_back(e.image_id);
        std::sort(ids.begin(), ids.end());
        REQUIRE(ids.size() == 48);
        for (std::uint32_t i = 0; i < 48; ++i) CHECK(ids[i] == i);
        // image_id encodes (class, index-within-class)
        for (const auto& e : s.events)
            if (!e.is_blank()) CHECK(e.image_id / 6 == static_cast<std::uint32_t>(e.class_id));
    }
}

TEST_CASE("minimal block schedule has two stimuli around one blank") {
    auto s = generate_schedule(Design::block, 2, 1, 1, 9);
    REQUIRE(s.events.size() == 3);
    CHECK(!s.events[0].is_blank());
    CHECK(s.events[1].is_blank());
    CHECK(!s.events[2].is_blank());
    check_ordered_non_overlapping(s);
    CHECK(s.events[1].duration_ms == 10000);
    CHECK(s.events[0].duration_ms == 500);
}

TEST_CASE("a single presentation block labels every stimulus zero") {
    auto s = generate_schedule(Design::rapid, 2, 3, 1, 11, /*block_size=*/50);
    CHECK(s.n_blocks() == 1);
    auto labels = assign_block_labels(s);
    REQUIRE(labels.size() == 6);
    for (auto l : labels) CHECK(l == 0);
}

TEST_CASE("schedules are deterministic in the seed") {
    auto a = generate_schedule(Design::rapid, 10, 10, 1, 42);
    auto b = generate_schedule(Design::rapid, 10, 10, 1, 42);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].onset_ms == b.events[i].onset_ms);
        CHECK(a.events[i].class_id == b.events[i].class_id);
        CHECK(a.events[i].image_id == b.events[i].image_id);
        CHECK(a.events[i].block_index == b.events[i].block_index);
    }
    auto c = generate_schedule(Design::rapid, 10, 10, 1, 43);
    bool differs = false;
    for (std::size_t i = 0; i < a.events.size(); ++i)
        if (a.events[i].class_id != c.events[i].class_id) differs = true;
    CHECK(differs);
}

TEST_CASE("JSON sidecar round-trips every event field") {
    auto s = generate_schedule(Design::block, 4, 3, 2, 13);
    const char* path = "schedule_test_roundtrip.json";
    save_schedule(path, s);
    auto t = load_schedule(path);
    CHECK(t.design == s.design);
    CHECK(t.stimulus_duration_ms == s.stimulus_duration_ms);
    CHECK(t.blank_duration_ms == s.blank_duration_ms);
    REQUIRE(t.events.size() == s.events.size());
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        CHECK(t.events[i].onset_ms == s.events[i].onset_ms);
        CHECK(t.events[i].duration_ms == s.events[i].duration_ms);
        CHECK(t.events[i].class_id == s.events[i].class_id);
        CHECK(t.events[i].block_index == s.events[i].block_index);
        CHECK(t.events[i].session_index == s.events[i].session_index);
        CHECK(t.events[i].image_id == s.events[i].image_id);
    }
    std::remove(path);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(generate_schedule(Design::block, 1, 5, 1, 0), SpecError);
    CHECK_THROWS_AS(generate_schedule(Design::block, 4, 0, 1, 0), SpecError);
    CHECK_THROWS_AS(generate_schedule(Design::block, 4, 5, 0, 0), SpecError);
    CHECK_THROWS_AS(generate_schedule(Design::block, 4, 5, 5, 0), SpecError);
    CHECK_THROWS_AS(generate_schedule(Design::rapid, 4, 5, 1, 0, 0), SpecError);
    CHECK_THROWS_AS(design_from_name("fast"), SpecError);
}

TEST_CASE("blank events carry the preceding block index") {
    auto s = generate_schedule(Design::rapid, 6, 25, 1, 17, 25);
    // 150 stimuli in 6 blocks of 25 -> 5 interior blanks.
    std::uint32_t expected_block = 0;
    std::size_t blanks = 0;
    for (const auto& e : s.events) {
        if (e.is_blank()) {
            CHECK(e.block_index == expected_block);
            ++blanks;
        } else {
            expected_block = e.block_index;
        }
    }
    CHECK(blanks == 5);
}
