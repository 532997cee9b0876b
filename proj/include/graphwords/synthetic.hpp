#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "graphwords/dataset.hpp"
#include "graphwords/delaunay.hpp"
#include "graphwords/keypoint.hpp"

namespace graphwords {

/// Recipe for one synthetic scene: a template constellation, a per-point
/// prototype assignment, and the randomized similarity transform / noise
/// applied on top. With all ranges collapsed (identity transform, zero
/// jitter, zero noise) the generated record reproduces the template
/// verbatim.
struct SceneSpec {
    std::size_t descriptor_dim = 0;
    std::vector<std::vector<double>> prototypes;
    /// One entry per template point: prototype index, or -1 to draw a
    /// prototype uniformly at random per scene.
    std::vector<int> prototype_assignment;
    std::vector<Point2> template_points;

    double descriptor_noise = 0.0;                  ///< sigma per component
    double position_jitter = 0.0;                   ///< sigma per axis
    std::array<double, 2> rotation_range{0.0, 0.0};  ///< radians
    std::array<double, 2> scale_range{1.0, 1.0};     ///< uniform scale factor
    std::array<double, 2> translation_range{0.0, 0.0};
    std::array<double, 2> response_range{1.0, 1.0};

    std::string image_id;
    std::string object_label;
    std::string scene_id;
    Split split = Split::train;
};

/// Deterministic scene generation: the same spec and seed give a bit
/// identical record. Throws std::invalid_argument on an empty template or a
/// bad prototype reference.
ImageRecord generate_synthetic_scene(const SceneSpec& spec, std::uint64_t rng_seed);

/// Knobs for the bundled benchmark (defaults are what the acceptance run
/// uses).
struct BenchmarkSpec {
    std::size_t images_per_class = 16;
    std::size_t points_per_class_unit = 15;  ///< points per blob / prototype
    std::size_t descriptor_dim = 8;
    double descriptor_noise = 0.05;
    double position_jitter = 0.6;
};

/// The two-part synthetic benchmark.
///
/// constellation_pair: classes "blobs" and "ring" draw descriptors from the
/// same prototype pool with identical per-image marginals, but arrange them
/// differently in the plane (prototype-pure spatial blobs vs a ring that
/// cycles through prototypes). Isolated-point histograms cannot separate the
/// two; graph features that see descriptor co-occurrence within a spatial
/// neighborhood can.
///
/// descriptor_pair: classes "pool_a" and "pool_b" share the scatter layout
/// and differ only in their descriptor pools, so isolated points separate
/// them easily.
struct SyntheticBenchmark {
    Dataset constellation_pair;
    Dataset descriptor_pair;
};

SyntheticBenchmark make_synthetic_benchmark(const BenchmarkSpec& spec, std::uint64_t rng_seed);

}  // namespace graphwords
