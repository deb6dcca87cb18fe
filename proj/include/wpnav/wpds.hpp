#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpnav/goselo.hpp"
#include "wpnav/planner.hpp"

namespace wpnav {

// Supervised-learning dataset: one GOSELO image and one 10x2 waypoint label
// per sample, both stored as flat float32 (row-major, channel-last).
struct SlDataset {
    std::int64_t count = 0;
    std::vector<float> images;  // count * 64*64*6
    std::vector<float> labels;  // count * 10*2
    bool unreachable_warning = false;  // more than 50% of layouts were discarded

    static constexpr std::int64_t image_floats =
        std::int64_t(kGoseloSize) * kGoseloSize * kGoseloChannels;
    static constexpr std::int64_t label_floats = std::int64_t(kWaypointCount) * 2;

    const float* image(std::int64_t i) const { return images.data() + i * image_floats; }
    float* image(std::int64_t i) { return images.data() + i * image_floats; }
    const float* label(std::int64_t i) const { return labels.data() + i * label_floats; }
    float* label(std::int64_t i) { return labels.data() + i * label_floats; }
    void resize(std::int64_t n) {
        count = n;
        images.assign(std::size_t(n * image_floats), 0.0f);
        labels.assign(std::size_t(n * label_floats), 0.0f);
    }
    // first n samples of a deterministic generation stream
    SlDataset prefix(std::int64_t n) const;
};

// WPDS file: "WPDS", version u32, sample_count u64, image dims 3x u32
// (64, 64, 6), label dims 2x u32 (10, 2); then per sample the float32 image
// followed by the float32 label. Little-endian throughout.
void save_wpds(const SlDataset& ds, const std::string& path);
SlDataset load_wpds(const std::string& path);

}  // namespace wpnav
