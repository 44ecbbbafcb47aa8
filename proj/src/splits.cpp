#include "eeglab/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "eeglab/rng.hpp"

namespace eeglab {

DatasetSplit make_splits(const std::vector<Segment>& segments,
                         std::array<double, 3> ratios, std::uint64_t seed) {
    double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw SpecError("split ratios must sum to 1");
    for (double r : ratios)
        if (r < 0.0) throw SpecError("split ratios must be non-negative");

    // Distinct images per class.
    std::map<int, std::set<std::uint32_t>> images;
    for (const auto& s : segments) {
        if (s.is_blank())
            throw SpecError("make_splits expects stimulus segments only");
        images[s.class_label].insert(s.image_id);
    }
    if (images.empty()) throw SpecError("no segments to split");

    // part_of[(class, image)] = 0/1/2
    std::map<std::pair<int, std::uint32_t>, int> part_of;
    for (const auto& [cls, ids] : images) {
        const std::size_t n = ids.size();
        if (n < 3)
            throw StratificationError("class " + std::to_string(cls) + " has " +
                                      std::to_string(n) +
                                      " images; need at least 3");
        // Largest-remainder allocation of n images to the three parts.
        std::array<std::size_t, 3> take{};
        std::array<double, 3> frac{};
        std::size_t assigned = 0;
        for (int p = 0; p < 3; ++p) {
            double ideal = ratios[p] * static_cast<double>(n);
            take[p] = static_cast<std::size_t>(std::floor(ideal));
            frac[p] = ideal - static_cast<double>(take[p]);
            assigned += take[p];
        }
        while (assigned < n) {
            int best = 0;
            for (int p = 1; p < 3; ++p)
                if (frac[p] > frac[best]) best = p;
            ++take[best];
            frac[best] = -1.0;
            ++assigned;
        }
        // Every part with a nonzero ratio gets at least one image.
        for (int p = 0; p < 3; ++p) {
            while (ratios[p] > 0.0 && take[p] == 0) {
                int donor = 0;
                for (int q = 1; q < 3; ++q)
                    if (take[q] > take[donor]) donor = q;
                if (take[donor] <= 1)
                    throw StratificationError(
                        "cannot give every split an image for class " +
                        std::to_string(cls));
                --take[donor];
                ++take[p];
            }
        }

        std::vector<std::uint32_t> order(ids.begin(), ids.end());
        DetRng rng(derive_seed(seed, static_cast<std::uint64_t>(cls) + 1));
        rng.shuffle(order);
        std::size_t pos = 0;
        for (int p = 0; p < 3; ++p)
            for (std::size_t k = 0; k < take[p]; ++k)
                part_of[{cls, order[pos++]}] = p;
    }

    DatasetSplit split;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        int p = part_of.at({s.class_label, s.image_id});
        (p == 0 ? split.train : p == 1 ? split.val : split.test).push_back(i);
    }
    return split;
}

DatasetSplit filter_split(const DatasetSplit& split,
                          const std::vector<Segment>& segments,
                          std::uint32_t subject_id) {
    DatasetSplit out;
    auto keep = [&](const std::vector<std::size_t>& src,
                    std::vector<std::size_t>& dst) {
        for (std::size_t i : src)
            if (segments[i].subject_id == subject_id) dst.push_back(i);
    };
    keep(split.train, out.train);
    keep(split.val, out.val);
    keep(split.test, out.test);
    return out;
}

}  // namespace eeglab
