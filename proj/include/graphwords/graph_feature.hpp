#pragma once

#include <cstddef>
#include <vector>

#include "graphwords/delaunay.hpp"
#include "graphwords/keypoint.hpp"

namespace graphwords {

/// Neighbor counts per layer. Layer l's graph has neighbor_counts[l] + 1
/// nodes; the first entry is 0 (the isolated-seed layer) and the list is
/// strictly increasing.
struct LayerSpec {
    std::vector<std::size_t> neighbor_counts = {0, 3, 6, 9};

    std::size_t layer_count() const { return neighbor_counts.size(); }
    void validate() const;  ///< throws std::invalid_argument on a bad spec
};

/// One layered graph word: the seed, its nearest neighbors and the Delaunay
/// edges over them. Node descriptors are copied so a feature stays usable
/// after its source image is gone (codebook words cross image boundaries).
struct GraphFeature {
    std::size_t layer = 0;
    std::size_t seed_index = 0;
    /// Keypoint indices, seed first, then neighbors by ascending spatial
    /// distance. Edges below use local positions in this list.
    std::vector<std::size_t> node_indices;
    EdgeSet edges;
    std::vector<std::vector<double>> node_descriptors;
    /// True when the image had fewer points than the layer asks for.
    bool short_graph = false;

    std::size_t node_count() const { return node_indices.size(); }
};

/// The k spatially nearest keypoints to the seed (Euclidean on (x, y)),
/// excluding the seed itself, sorted by ascending distance. Distance ties are
/// broken by ascending (y, x), then index. Returns fewer than k indices when
/// the image runs out of points.
std::vector<std::size_t> knn_neighbors(std::size_t seed_index,
                                       const std::vector<KeyPoint>& keypoints,
                                       std::size_t k);

/// One GraphFeature per (seed, layer) pair, seed-major. Node sets are nested
/// across layers of the same seed because the neighbor list of a larger layer
/// extends the smaller one.
std::vector<GraphFeature> build_graph_features(const ImageRecord& image,
                                               const SeedSet& seeds,
                                               const LayerSpec& layers);

}  // namespace graphwords
