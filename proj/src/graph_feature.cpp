#include "graphwords/graph_feature.hpp"

#include <algorithm>
#include <stdexcept>

namespace graphwords {

void LayerSpec::validate() const {
    if (neighbor_counts.empty()) {
        throw std::invalid_argument("LayerSpec: neighbor_counts must not be empty");
    }
    if (neighbor_counts.front() != 0) {
        throw std::invalid_argument("LayerSpec: first layer must have 0 neighbors");
    }
    for (std::size_t i = 1; i < neighbor_counts.size(); ++i) {
        if (neighbor_counts[i] <= neighbor_counts[i - 1]) {
            throw std::invalid_argument("LayerSpec: neighbor_counts must be strictly increasing");
        }
    }
}

std::vector<std::size_t> knn_neighbors(std::size_t seed_index,
                                       const std::vector<KeyPoint>& keypoints, std::size_t k) {
    if (seed_index >= keypoints.size()) {
        throw std::invalid_argument("knn_neighbors: seed index out of range");
    }
    const KeyPoint& seed = keypoints[seed_index];

    std::vector<std::size_t> order;
    order.reserve(keypoints.size() > 0 ? keypoints.size() - 1 : 0);
    for (std::size_t i = 0; i < keypoints.size(); ++i) {
        if (i != seed_index) order.push_back(i);
    }
    auto sq_dist = [&](std::size_t i) {
        const double dx = keypoints[i].x - seed.x;
        const double dy = keypoints[i].y - seed.y;
        return dx * dx + dy * dy;
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = sq_dist(a), db = sq_dist(b);
        if (da != db) return da < db;
        if (keypoints[a].y != keypoints[b].y) return keypoints[a].y < keypoints[b].y;
        if (keypoints[a].x != keypoints[b].x) return keypoints[a].x < keypoints[b].x;
        return a < b;
    });
    if (order.size() > k) order.resize(k);
    return order;
}

std::vector<GraphFeature> build_graph_features(const ImageRecord& image, const SeedSet& seeds,
                                               const LayerSpec& layers) {
    layers.validate();
    for (const std::size_t s : seeds.seed_indices) {
        if (s >= image.keypoints.size()) {
            throw std::invalid_argument("build_graph_features: seed index out of range for image " +
                                        image.image_id);
        }
    }

    std::vector<GraphFeature> features;
    features.reserve(seeds.seed_indices.size() * layers.layer_count());

    const std::size_t max_k = layers.neighbor_counts.back();
    for (const std::size_t seed_index : seeds.seed_indices) {
        // One neighbor query for the top layer; lower layers are prefixes.
        const std::vector<std::size_t> neighbors = knn_neighbors(seed_index, image.keypoints, max_k);

        for (std::size_t layer = 0; layer < layers.layer_count(); ++layer) {
            const std::size_t want = layers.neighbor_counts[layer];
            const std::size_t have = std::min(want, neighbors.size());

            GraphFeature f;
            f.layer = layer;
            f.seed_index = seed_index;
            f.short_graph = have < want;
            f.node_indices.push_back(seed_index);
            f.node_indices.insert(f.node_indices.end(), neighbors.begin(),
                                  neighbors.begin() + static_cast<std::ptrdiff_t>(have));
            f.node_descriptors.reserve(f.node_indices.size());
            for (const std::size_t idx : f.node_indices) {
                f.node_descriptors.push_back(image.keypoints[idx].descriptor);
            }
            if (f.node_indices.size() >= 2) {
                std::vector<Point2> pts;
                pts.reserve(f.node_indices.size());
                for (const std::size_t idx : f.node_indices) {
                    pts.push_back({image.keypoints[idx].x, image.keypoints[idx].y});
                }
                f.edges = delaunay_edges(pts);
            }
            features.push_back(std::move(f));
        }
    }
    return features;
}

}  // namespace graphwords
