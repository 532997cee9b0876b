#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <set>

#include "graphwords/graph_feature.hpp"
#include "test_util.hpp"

using namespace graphwords;

namespace {

ImageRecord image_from_points(const std::vector<Point2>& pts, std::size_t dim = 2) {
    ImageRecord rec;
    rec.image_id = "img";
    rec.object_label = "obj";
    rec.scene_id = "scene";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        KeyPoint kp;
        kp.x = pts[i].x;
        kp.y = pts[i].y;
        kp.response = 1.0;
        kp.descriptor.assign(dim, static_cast<double>(i));
        rec.keypoints.push_back(std::move(kp));
    }
    return rec;
}

}  // namespace

TEST_CASE("knn picks the closest points") {
    const auto img = image_from_points({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    CHECK(knn_neighbors(0, img.keypoints, 2) == std::vector<std::size_t>{1, 2});
    CHECK(knn_neighbors(0, img.keypoints, 0).empty());
    CHECK(knn_neighbors(0, img.keypoints, 10) == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("knn distance ties fall to the smaller (y, x)") {
    // two points at distance 1 from the seed: one above, one to the right;
    // (y, x) ordering puts (1, 0) after (0, 1)? no: compare y first
    const auto img = image_from_points({{0, 0}, {1, 0}, {0, 1}});
    // d(1)=1 at (x=1, y=0); d(2)=1 at (x=0, y=1); tie -> y=0 first
    CHECK(knn_neighbors(0, img.keypoints, 1) == std::vector<std::size_t>{1});

    // enumerate the reversed input order: winner must still be the point
    // with the smaller (y, x), independent of index order
    const auto img2 = image_from_points({{0, 0}, {0, 1}, {1, 0}});
    CHECK(knn_neighbors(0, img2.keypoints, 1) == std::vector<std::size_t>{2});
}

TEST_CASE("knn output is sorted by ascending distance and prefix-stable") {
    std::mt19937_64 rng(3);
    const auto pts = testutil::random_points(rng, 20);
    const auto img = image_from_points(pts);
    const auto k9 = knn_neighbors(4, img.keypoints, 9);
    REQUIRE(k9.size() == 9);

    auto dist = [&](std::size_t i) {
        const double dx = img.keypoints[i].x - img.keypoints[4].x;
        const double dy = img.keypoints[i].y - img.keypoints[4].y;
        return std::hypot(dx, dy);
    };
    for (std::size_t i = 1; i < k9.size(); ++i) CHECK(dist(k9[i - 1]) <= dist(k9[i]));
    for (std::size_t k = 0; k <= 9; ++k) {
        const auto prefix = knn_neighbors(4, img.keypoints, k);
        CHECK(std::equal(prefix.begin(), prefix.end(), k9.begin()));
    }
}

TEST_CASE("two layers on four points") {
    const auto img = image_from_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    LayerSpec layers;
    layers.neighbor_counts = {0, 3};
    const auto features = build_graph_features(img, SeedSet{{0}}, layers);

    REQUIRE(features.size() == 2);
    CHECK(features[0].layer == 0);
    CHECK(features[0].node_count() == 1);
    CHECK(features[0].edges.pairs.empty());
    CHECK(features[1].layer == 1);
    CHECK(features[1].node_count() == 4);
    CHECK(!features[1].edges.pairs.empty());
    CHECK(!features[1].short_graph);
    // seed first, then neighbors by distance
    CHECK(features[1].node_indices.front() == 0);
    // descriptors copied per node
    CHECK(features[1].node_descriptors.size() == 4);
    CHECK(features[1].node_descriptors[0] == img.keypoints[0].descriptor);
}

TEST_CASE("short graphs are flagged, not dropped") {
    const auto img = image_from_points({{0, 0}, {1, 0}, {2, 0}});
    LayerSpec layers;
    layers.neighbor_counts = {0, 3};
    const auto features = build_graph_features(img, SeedSet{{0}}, layers);
    REQUIRE(features.size() == 2);
    CHECK(features[1].node_count() == 3);
    CHECK(features[1].short_graph);
}

TEST_CASE("paper-scale feature counts and node sizes") {
    std::mt19937_64 rng(9);
    const auto img = image_from_points(testutil::random_points(rng, 400));
    const SeedSet seeds = select_seeds(img.keypoints, 300);
    REQUIRE(seeds.seed_indices.size() == 300);

    const auto features = build_graph_features(img, seeds, LayerSpec{});
    CHECK(features.size() == 1200);

    std::set<std::size_t> node_counts;
    for (const auto& f : features) {
        node_counts.insert(f.node_count());
        CHECK_FALSE(f.short_graph);
    }
    CHECK(node_counts == std::set<std::size_t>{1, 4, 7, 10});
}

TEST_CASE("node sets are nested across layers") {
    std::mt19937_64 rng(17);
    const auto img = image_from_points(testutil::random_points(rng, 30));
    const SeedSet seeds = select_seeds(img.keypoints, 5);
    const auto features = build_graph_features(img, seeds, LayerSpec{});

    for (std::size_t s = 0; s < 5; ++s) {
        for (std::size_t l = 0; l + 1 < 4; ++l) {
            const auto& lower = features[s * 4 + l].node_indices;
            const auto& upper = features[s * 4 + l + 1].node_indices;
            CHECK(std::equal(lower.begin(), lower.end(), upper.begin()));
        }
    }
}

TEST_CASE("graph features are invariant to similarity transforms") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        auto img = image_from_points(testutil::random_points(rng, 25));
        for (std::size_t i = 0; i < img.keypoints.size(); ++i) {
            img.keypoints[i].response = uniform01(rng);
        }
        const SeedSet seeds = select_seeds(img.keypoints, 4);
        const auto reference = build_graph_features(img, seeds, LayerSpec{});

        const double angle = uniform(rng, 0.0, 6.28318);
        const double s = uniform(rng, 0.3, 3.0);
        const double tx = uniform(rng, -40.0, 40.0), ty = uniform(rng, -40.0, 40.0);
        ImageRecord moved = img;
        for (auto& kp : moved.keypoints) {
            const double x = kp.x, y = kp.y;
            kp.x = s * (std::cos(angle) * x - std::sin(angle) * y) + tx;
            kp.y = s * (std::sin(angle) * x + std::cos(angle) * y) + ty;
        }
        const auto transformed = build_graph_features(moved, seeds, LayerSpec{});

        REQUIRE(transformed.size() == reference.size());
        for (std::size_t i = 0; i < reference.size(); ++i) {
            CHECK(transformed[i].node_indices == reference[i].node_indices);
            CHECK(transformed[i].edges == reference[i].edges);
        }
    }
}

TEST_CASE("layer spec validation") {
    LayerSpec bad;
    bad.neighbor_counts = {1, 3};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.neighbor_counts = {0, 3, 3};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.neighbor_counts = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_NOTHROW(LayerSpec{}.validate());
}
