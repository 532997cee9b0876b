#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace graphwords {

/// One detected interest point with its fixed-length descriptor.
/// Descriptor length is a dataset-wide constant (64 for SURF-style input,
/// smaller for synthetic data).
struct KeyPoint {
    double x = 0.0;
    double y = 0.0;
    double scale = 1.0;        ///< detector scale, > 0
    double orientation = 0.0;  ///< radians in [0, 2pi)
    double response = 0.0;     ///< detector response, >= 0
    std::vector<double> descriptor;
};

enum class Split { train, test };

inline const char* to_string(Split s) { return s == Split::train ? "train" : "test"; }

/// All keypoints of one image, already restricted to the object bounding box
/// upstream. Immutable after load; safe to share across workers.
struct ImageRecord {
    std::string image_id;
    std::string object_label;
    std::string scene_id;
    Split split = Split::train;
    std::vector<KeyPoint> keypoints;
};

/// Indices of the seed keypoints of one image, ordered by descending response.
struct SeedSet {
    std::vector<std::size_t> seed_indices;
};

/// Selects the min(n_seeds, |keypoints|) highest-response keypoints.
/// Ties on response are broken by ascending (y, x), then by input index, so
/// the result is deterministic. For any k1 <= k2 the k1-selection is a prefix
/// of the k2-selection. An empty keypoint list yields an empty SeedSet.
SeedSet select_seeds(const std::vector<KeyPoint>& keypoints, std::size_t n_seeds);

}  // namespace graphwords
