#include "graphwords/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "graphwords/random.hpp"

namespace graphwords {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

ImageRecord generate_synthetic_scene(const SceneSpec& spec, std::uint64_t rng_seed) {
    if (spec.template_points.empty()) {
        throw std::invalid_argument("generate_synthetic_scene: template has no points");
    }
    if (spec.prototype_assignment.size() != spec.template_points.size()) {
        throw std::invalid_argument(
            "generate_synthetic_scene: one prototype assignment per template point required");
    }
    if (spec.prototypes.empty()) {
        throw std::invalid_argument("generate_synthetic_scene: no prototypes");
    }
    for (const auto& p : spec.prototypes) {
        if (p.size() != spec.descriptor_dim) {
            throw std::invalid_argument("generate_synthetic_scene: prototype dimension mismatch");
        }
    }
    for (const int a : spec.prototype_assignment) {
        if (a != -1 && (a < 0 || static_cast<std::size_t>(a) >= spec.prototypes.size())) {
            throw std::invalid_argument("generate_synthetic_scene: bad prototype index");
        }
    }

    std::mt19937_64 rng(rng_seed);

    // Scene-level similarity transform, then per-point draws in template
    // order. The draw order is part of the determinism contract.
    const double angle = uniform(rng, spec.rotation_range[0], spec.rotation_range[1]);
    const double scale = uniform(rng, spec.scale_range[0], spec.scale_range[1]);
    const double tx = uniform(rng, spec.translation_range[0], spec.translation_range[1]);
    const double ty = uniform(rng, spec.translation_range[0], spec.translation_range[1]);
    const double c = std::cos(angle), s = std::sin(angle);

    ImageRecord rec;
    rec.image_id = spec.image_id;
    rec.object_label = spec.object_label;
    rec.scene_id = spec.scene_id;
    rec.split = spec.split;
    rec.keypoints.reserve(spec.template_points.size());

    for (std::size_t i = 0; i < spec.template_points.size(); ++i) {
        const Point2& t = spec.template_points[i];
        KeyPoint kp;
        kp.x = scale * (c * t.x - s * t.y) + tx;
        kp.y = scale * (s * t.x + c * t.y) + ty;
        if (spec.position_jitter > 0.0) {
            kp.x += spec.position_jitter * normal01(rng);
            kp.y += spec.position_jitter * normal01(rng);
        }

        int proto = spec.prototype_assignment[i];
        if (proto == -1) {
            proto = static_cast<int>(uniform_index(rng, spec.prototypes.size()));
        }
        kp.descriptor = spec.prototypes[static_cast<std::size_t>(proto)];
        if (spec.descriptor_noise > 0.0) {
            for (double& v : kp.descriptor) v += spec.descriptor_noise * normal01(rng);
        }

        kp.scale = 1.0;
        kp.orientation = 0.0;
        kp.response = uniform(rng, spec.response_range[0], spec.response_range[1]);
        rec.keypoints.push_back(std::move(kp));
    }
    return rec;
}

namespace {

std::vector<double> axis_prototype(std::size_t dim, std::size_t axis, double value) {
    std::vector<double> v(dim, 0.0);
    v[axis] = value;
    return v;
}

/// Sunflower (golden-angle) layout: n well-spread, non-collinear points in a
/// disk of the given radius.
std::vector<Point2> sunflower_points(std::size_t n, double radius, Point2 center = {0.0, 0.0}) {
    constexpr double golden_angle = 2.399963229728653;
    std::vector<Point2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = radius * std::sqrt((static_cast<double>(i) + 0.5) / static_cast<double>(n));
        const double a = golden_angle * static_cast<double>(i);
        pts.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    return pts;
}

std::vector<Point2> ring_points(std::size_t n, double radius) {
    std::vector<Point2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        pts.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    return pts;
}

struct ClassLayout {
    std::vector<Point2> template_points;
    std::vector<int> assignment;
    std::vector<std::vector<double>> prototypes;
};

/// Four prototype-pure spatial blobs: nearby points share a prototype, so a
/// graph over one neighborhood sees a homogeneous descriptor set.
ClassLayout blobs_layout(const BenchmarkSpec& spec) {
    ClassLayout layout;
    for (std::size_t j = 0; j < 4; ++j) {
        layout.prototypes.push_back(axis_prototype(spec.descriptor_dim, j, 2.0));
    }
    const double half = 20.0;
    const Point2 centers[4] = {{-half, -half}, {half, -half}, {-half, half}, {half, half}};
    for (std::size_t j = 0; j < 4; ++j) {
        const auto blob = sunflower_points(spec.points_per_class_unit, 6.0, centers[j]);
        layout.template_points.insert(layout.template_points.end(), blob.begin(), blob.end());
        layout.assignment.insert(layout.assignment.end(), spec.points_per_class_unit,
                                 static_cast<int>(j));
    }
    return layout;
}

/// One ring cycling through the same prototypes: identical per-image
/// descriptor marginals as blobs_layout, but every neighborhood mixes
/// prototypes.
ClassLayout ring_layout(const BenchmarkSpec& spec) {
    ClassLayout layout;
    for (std::size_t j = 0; j < 4; ++j) {
        layout.prototypes.push_back(axis_prototype(spec.descriptor_dim, j, 2.0));
    }
    const std::size_t n = 4 * spec.points_per_class_unit;
    layout.template_points = ring_points(n, 28.0);
    for (std::size_t i = 0; i < n; ++i) layout.assignment.push_back(static_cast<int>(i % 4));
    return layout;
}

/// Shared scatter layout for the descriptor pair; only the prototype pool
/// differs between the two classes.
ClassLayout scatter_layout(const BenchmarkSpec& spec, std::size_t axis_base) {
    ClassLayout layout;
    for (std::size_t j = 0; j < 4; ++j) {
        layout.prototypes.push_back(
            axis_prototype(spec.descriptor_dim, (axis_base + j) % spec.descriptor_dim, 2.0));
    }
    const std::size_t n = 4 * spec.points_per_class_unit;
    layout.template_points = sunflower_points(n, 28.0);
    for (std::size_t i = 0; i < n; ++i) layout.assignment.push_back(static_cast<int>(i % 4));
    return layout;
}

Dataset make_pair(const BenchmarkSpec& spec, std::uint64_t seed,
                  const std::string& label_a, const ClassLayout& layout_a,
                  const std::string& label_b, const ClassLayout& layout_b) {
    Dataset ds;
    ds.descriptor_dim = spec.descriptor_dim;

    const std::pair<const std::string*, const ClassLayout*> classes[2] = {{&label_a, &layout_a},
                                                                          {&label_b, &layout_b}};
    for (std::size_t ci = 0; ci < 2; ++ci) {
        for (std::size_t img = 0; img < spec.images_per_class; ++img) {
            SceneSpec scene;
            scene.descriptor_dim = spec.descriptor_dim;
            scene.prototypes = classes[ci].second->prototypes;
            scene.prototype_assignment = classes[ci].second->assignment;
            scene.template_points = classes[ci].second->template_points;
            scene.descriptor_noise = spec.descriptor_noise;
            scene.position_jitter = spec.position_jitter;
            scene.rotation_range = {0.0, kTwoPi};
            scene.scale_range = {0.8, 1.25};
            scene.translation_range = {-10.0, 10.0};
            scene.response_range = {0.5, 1.5};

            char idbuf[64];
            std::snprintf(idbuf, sizeof(idbuf), "%s_%02zu", classes[ci].first->c_str(), img);
            scene.image_id = idbuf;
            scene.object_label = *classes[ci].first;
            scene.scene_id = "scene" + std::to_string(img % 4);

            ds.records.push_back(
                generate_synthetic_scene(scene, derive_seed(seed, ci * 1000 + img)));
        }
    }
    return ds;
}

}  // namespace

SyntheticBenchmark make_synthetic_benchmark(const BenchmarkSpec& spec, std::uint64_t rng_seed) {
    if (spec.descriptor_dim < 8) {
        throw std::invalid_argument("make_synthetic_benchmark: descriptor_dim must be >= 8");
    }
    SyntheticBenchmark bench;
    bench.constellation_pair = make_pair(spec, derive_seed(rng_seed, 101), "blobs",
                                         blobs_layout(spec), "ring", ring_layout(spec));
    bench.descriptor_pair = make_pair(spec, derive_seed(rng_seed, 202), "pool_a",
                                      scatter_layout(spec, 0), "pool_b", scatter_layout(spec, 4));
    return bench;
}

}  // namespace graphwords
