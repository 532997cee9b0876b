#include "graphwords/keypoint.hpp"

#include <algorithm>
#include <numeric>

namespace graphwords {

SeedSet select_seeds(const std::vector<KeyPoint>& keypoints, std::size_t n_seeds) {
    std::vector<std::size_t> order(keypoints.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const KeyPoint& ka = keypoints[a];
        const KeyPoint& kb = keypoints[b];
        if (ka.response != kb.response) return ka.response > kb.response;
        if (ka.y != kb.y) return ka.y < kb.y;
        if (ka.x != kb.x) return ka.x < kb.x;
        return a < b;
    });
    order.resize(std::min(n_seeds, order.size()));
    return SeedSet{std::move(order)};
}

}  // namespace graphwords
