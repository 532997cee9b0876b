// Acceptance suite: one pass/fail line per criterion, each run against its
// stated tolerance and wall-clock budget. Exits nonzero if any criterion
// fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphwords/cdk.hpp"
#include "graphwords/codebook.hpp"
#include "graphwords/dataset.hpp"
#include "graphwords/delaunay.hpp"
#include "graphwords/graph_feature.hpp"
#include "graphwords/pipeline.hpp"
#include "graphwords/retrieval.hpp"
#include "graphwords/synthetic.hpp"
#include "test_util.hpp"

using namespace graphwords;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

double singleton_rho_closed_form(double d, double beta) {
    const double e = std::exp(-d / beta);
    return (1.0 - e) / (1.0 + e);
}

/// Expected AP of a uniformly random ranking with R relevant among N.
double chance_map(std::size_t n, std::size_t r) {
    double sum = 0.0;
    for (std::size_t p = 1; p <= n; ++p) {
        const double before = static_cast<double>(p - 1) * static_cast<double>(r - 1) /
                              static_cast<double>(n - 1);
        sum += (1.0 + before) / static_cast<double>(p);
    }
    return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------------------

Outcome criterion_closed_form() {
    Outcome out;
    std::mt19937_64 rng(1001);
    CdkParams params;
    params.flavor = DistanceFlavor::l2;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const double beta = uniform(rng, 0.01, 1.0);
        const double d = uniform(rng, 0.0, 4.0);
        const auto a = testutil::singleton_feature({0.0});
        const auto b = testutil::singleton_feature({d});
        params.beta = beta;
        for (unsigned t : {0u, 1u, 2u}) {
            params.iterations = t;
            const double err =
                std::abs(graph_dissimilarity(a, b, params) - singleton_rho_closed_form(d, beta));
            worst = std::max(worst, err);
        }
    }
    out.require(worst < 1e-9, "max error " + std::to_string(worst));
    out.note("max |rho - closed form| = " + std::to_string(worst));
    return out;
}

Outcome criterion_approximation_bound() {
    Outcome out;
    std::mt19937_64 rng(1002);
    CdkParams params;
    params.flavor = DistanceFlavor::l2;
    params.iterations = 2;
    for (int trial = 0; trial < 200; ++trial) {
        const double beta = uniform(rng, 0.01, 1.0);
        const double d = uniform(rng, 0.0, beta / 10.0);
        const auto a = testutil::singleton_feature({0.0});
        const auto b = testutil::singleton_feature({d});
        params.beta = beta;
        const double rho = graph_dissimilarity(a, b, params);
        const double x = d / (2.0 * beta);
        out.require(std::abs(rho - x) <= x * x * x / 3.0 + 1e-12,
                    "bound violated at d=" + std::to_string(d) + " beta=" + std::to_string(beta));
    }
    return out;
}

Outcome criterion_cdk_invariants() {
    Outcome out;
    std::mt19937_64 rng(1003);
    CdkParams params;
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = testutil::random_feature(rng, 1, 2 + uniform_index(rng, 9), 6);
        const auto b = testutil::random_feature(rng, 1, 2 + uniform_index(rng, 9), 6);
        const PairMatrices pm = assemble_pair_matrices(a, b, params.flavor);
        for (unsigned t : {0u, 1u, 2u}) {
            params.iterations = t;
            const Eigen::MatrixXd k = cdk_iterate(pm, params);
            out.require(std::abs(k.sum() - 1.0) < 1e-9, "kernel sum off at t=" + std::to_string(t));
        }

        params.iterations = 2;
        const double ab = graph_dissimilarity(a, b, params);
        const double ba = graph_dissimilarity(b, a, params);
        out.require(std::abs(ab - ba) < 1e-12, "asymmetry " + std::to_string(std::abs(ab - ba)));
        out.require(graph_dissimilarity(a, a, params) <= 1e-9, "rho(A,A) nonzero");

        std::vector<std::size_t> perm(b.node_count());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        deterministic_shuffle(perm, rng);
        const double permuted = graph_dissimilarity(a, testutil::permute_feature(b, perm), params);
        out.require(std::abs(permuted - ab) < 1e-12, "permutation variance");
    }
    return out;
}

Outcome criterion_delaunay_oracle() {
    Outcome out;
    std::mt19937_64 rng(1004);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + uniform_index(rng, 10);
        const auto pts = testutil::random_points(rng, n);
        const Triangulation tri = delaunay_triangulation(pts);
        out.require(testutil::triangulation_passes_circle_oracle(pts, tri),
                    "circumcircle violation at trial " + std::to_string(trial));
        out.require(tri.edges.pairs.size() <= 3 * n - 6, "edge bound violated");
    }
    return out;
}

Outcome criterion_affine_invariance() {
    Outcome out;
    std::mt19937_64 rng(1005);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 12 + uniform_index(rng, 12);
        const auto pts = testutil::random_points(rng, n);

        ImageRecord img;
        img.image_id = "affine";
        for (const auto& p : pts) {
            KeyPoint kp;
            kp.x = p.x;
            kp.y = p.y;
            kp.response = uniform01(rng);
            kp.descriptor = {0.0};
            img.keypoints.push_back(kp);
        }
        const SeedSet seeds = select_seeds(img.keypoints, 3);
        const auto reference = build_graph_features(img, seeds, LayerSpec{});
        const EdgeSet ref_edges = delaunay_edges(pts);

        const double angle = uniform(rng, 0.0, 6.283185307179586);
        const double s = uniform(rng, 0.3, 3.0);
        const double tx = uniform(rng, -100.0, 100.0), ty = uniform(rng, -100.0, 100.0);
        auto transform = [&](double x, double y) {
            return Point2{s * (std::cos(angle) * x - std::sin(angle) * y) + tx,
                          s * (std::sin(angle) * x + std::cos(angle) * y) + ty};
        };

        std::vector<Point2> moved_pts;
        ImageRecord moved = img;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Point2 q = transform(pts[i].x, pts[i].y);
            moved_pts.push_back(q);
            moved.keypoints[i].x = q.x;
            moved.keypoints[i].y = q.y;
        }

        out.require(delaunay_edges(moved_pts) == ref_edges, "edge set changed under similarity");
        const auto transformed = build_graph_features(moved, seeds, LayerSpec{});
        bool same = transformed.size() == reference.size();
        for (std::size_t i = 0; same && i < reference.size(); ++i) {
            same = transformed[i].node_indices == reference[i].node_indices &&
                   transformed[i].edges == reference[i].edges;
        }
        out.require(same, "graph features changed under similarity");
    }
    return out;
}

Outcome criterion_medoid_oracle() {
    Outcome out;
    std::mt19937_64 rng(1006);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 30);
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = uniform01(rng);
        }
        const DissimilarityFn d = [&m](std::size_t i, std::size_t j) { return m[i][j]; };
        std::vector<std::size_t> members(n);
        std::iota(members.begin(), members.end(), std::size_t{0});

        // exhaustive argmin, smallest id on ties
        std::size_t expected = 0;
        double best = 1e300;
        for (std::size_t c = 0; c < n; ++c) {
            double sum = 0.0;
            for (std::size_t o = 0; o < n; ++o) {
                if (o != c) sum += m[c][o];
            }
            if (sum < best) {
                best = sum;
                expected = c;
            }
        }
        out.require(cluster_medoid(members, d) == expected,
                    "medoid mismatch at trial " + std::to_string(trial));
    }
    return out;
}

Outcome criterion_ap_map_oracle() {
    Outcome out;

    // exhaustive AP check over all rankings of length <= 6 with <= 3 relevant
    for (std::size_t len = 1; len <= 6; ++len) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << len); ++mask) {
            std::vector<int> flags(len);
            std::size_t relevant = 0;
            for (std::size_t i = 0; i < len; ++i) {
                flags[i] = static_cast<int>((mask >> i) & 1);
                relevant += static_cast<std::size_t>(flags[i]);
            }
            if (relevant > 3) continue;

            double expected = 0.0;
            for (std::size_t r = 0; r < len; ++r) {
                if (flags[r] == 0) continue;
                std::size_t hits = 0;
                for (std::size_t k = 0; k <= r; ++k) hits += static_cast<std::size_t>(flags[k]);
                expected += static_cast<double>(hits) / static_cast<double>(r + 1);
            }
            if (relevant > 0) expected /= static_cast<double>(relevant);
            out.require(average_precision(flags) == expected,
                        "AP differs from enumeration at len=" + std::to_string(len) +
                            " mask=" + std::to_string(mask));
        }
    }

    // evaluate vs a brute-force oracle on a 10-image corpus
    std::mt19937_64 rng(1007);
    std::vector<SignatureEntry> train, test;
    const std::string labels[2] = {"A", "B"};
    for (int i = 0; i < 10; ++i) {
        train.push_back({"t" + std::to_string(i), labels[i % 2],
                         testutil::random_descriptor(rng, 3)});
    }
    for (int i = 0; i < 6; ++i) {
        test.push_back({"q" + std::to_string(i), labels[i % 2],
                        testutil::random_descriptor(rng, 3)});
    }
    const EvalReport report = evaluate(test, train, EvalConfig{});

    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& q : test) {
        std::vector<std::pair<double, std::string>> order;
        for (const auto& t : train) {
            double d = 0.0;
            for (std::size_t k = 0; k < 3; ++k) d += std::abs(q.vec[k] - t.vec[k]);
            order.emplace_back(d, t.image_id);
        }
        std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            return x.second < y.second;
        });
        double ap = 0.0;
        std::size_t hits = 0, total = 0, ranknum = 0;
        for (const auto& [d, id] : order) {
            ++ranknum;
            const bool rel = labels[(id[1] - '0') % 2] == q.object_label;
            total += rel;
            if (rel) {
                ++hits;
                ap += static_cast<double>(hits) / static_cast<double>(ranknum);
            }
        }
        auto& [sum, count] = acc[q.object_label];
        sum += ap / static_cast<double>(total);
        ++count;
    }
    for (const auto& [label, pair] : acc) {
        const double expected = pair.first / pair.second;
        out.require(std::abs(report.per_object_map.at(label) - expected) < 1e-12,
                    "MAP oracle mismatch for " + label);
    }
    return out;
}

// ---------------------------------------------------------------------------

struct BenchmarkRun {
    // per layer-subset tag: object label -> MAP
    std::map<std::string, std::map<std::string, double>> maps;
};

PipelineConfig benchmark_config(const fs::path& out_dir) {
    PipelineConfig cfg;
    cfg.output_dir = out_dir;
    cfg.n_seeds = 16;
    cfg.layers = LayerSpec{};  // {0, 3, 6, 9}
    cfg.first_pass_k = 24;
    cfg.dictionary_sizes = {16};
    cfg.rng_seed = 20110;
    cfg.n_threads = 0;
    cfg.benchmark.images_per_class = 16;
    cfg.benchmark.points_per_class_unit = 15;
    return cfg;
}

std::string subset_tag(const std::vector<std::size_t>& subset) {
    std::string tag;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i > 0) tag += '-';
        tag += std::to_string(subset[i]);
    }
    return tag;
}

BenchmarkRun run_benchmark_pair(const fs::path& out_dir, const std::string& pair_name) {
    PipelineConfig cfg = benchmark_config(out_dir);
    run_synth(cfg);
    cfg.dataset_manifest = out_dir / "datasets" / pair_name / "manifest.json";
    run_extract(cfg);
    run_build_dict(cfg);
    run_signatures(cfg);
    run_evaluate(cfg);

    BenchmarkRun result;
    const std::vector<std::vector<std::size_t>> subsets = {{0},       {1},          {2},
                                                           {3},       {0, 1},       {0, 1, 2},
                                                           {0, 1, 2, 3}};
    for (const auto& subset : subsets) {
        const fs::path report_path =
            reports_dir(cfg) / ("report_size16_layers" + subset_tag(subset) + ".json");
        std::ifstream in(report_path);
        if (!in) throw std::runtime_error("missing report " + report_path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        // minimal parse: pull the per-object map values
        const std::string body = ss.str();
        const auto parsed = nlohmann::json::parse(body);
        for (const auto& [label, value] : parsed.at("per_object_map").items()) {
            result.maps[subset_tag(subset)][label] = value.get<double>();
        }
    }
    return result;
}

Outcome criterion_qualitative_claim(double* benchmark_seconds) {
    Outcome out;
    const auto started = std::chrono::steady_clock::now();

    const fs::path dir = fs::temp_directory_path() / "graphwords_acceptance_benchmark";
    fs::remove_all(dir);

    const BenchmarkRun constellation =
        run_benchmark_pair(dir / "constellation", "constellation_pair");
    const BenchmarkRun descriptor = run_benchmark_pair(dir / "descriptor", "descriptor_pair");

    *benchmark_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    // layer 0 is blind on the constellation pair: within 0.10 of the exact
    // chance MAP for a random ranking (8 relevant among 16 train images)
    const double chance = chance_map(16, 8);
    const double layer0_blobs = constellation.maps.at("0").at("blobs");
    const double layer0_ring = constellation.maps.at("0").at("ring");
    out.require(std::abs(layer0_blobs - chance) <= 0.10,
                "layer-0 blobs MAP " + std::to_string(layer0_blobs) + " vs chance " +
                    std::to_string(chance));
    out.require(std::abs(layer0_ring - chance) <= 0.10,
                "layer-0 ring MAP " + std::to_string(layer0_ring) + " vs chance " +
                    std::to_string(chance));

    // layer 0 separates the descriptor pair
    const double layer0_descriptor =
        (descriptor.maps.at("0").at("pool_a") + descriptor.maps.at("0").at("pool_b")) / 2.0;
    out.require(layer0_descriptor >= 0.9,
                "layer-0 descriptor-pair MAP " + std::to_string(layer0_descriptor));

    // the 9-neighbor layer separates the constellation pair
    const double layer3_blobs = constellation.maps.at("3").at("blobs");
    const double layer3_ring = constellation.maps.at("3").at("ring");
    out.require(layer3_blobs >= 0.8, "9-neighbor blobs MAP " + std::to_string(layer3_blobs));
    out.require(layer3_ring >= 0.8, "9-neighbor ring MAP " + std::to_string(layer3_ring));

    // nested signature: overall mean at least max single layer minus 0.02
    auto overall = [&](const std::string& tag) {
        double sum = 0.0;
        sum += constellation.maps.at(tag).at("blobs");
        sum += constellation.maps.at(tag).at("ring");
        sum += descriptor.maps.at(tag).at("pool_a");
        sum += descriptor.maps.at(tag).at("pool_b");
        return sum / 4.0;
    };
    double best_single = 0.0;
    for (const std::string tag : {"0", "1", "2", "3"}) {
        best_single = std::max(best_single, overall(tag));
    }
    const double nested = overall("0-1-2-3");
    out.require(nested >= best_single - 0.02,
                "nested " + std::to_string(nested) + " vs best single " +
                    std::to_string(best_single));

    char summary[256];
    std::snprintf(summary, sizeof(summary),
                  "layer0 const %.3f/%.3f (chance %.3f), layer0 desc %.3f, layer3 const "
                  "%.3f/%.3f, nested %.3f, best single %.3f",
                  layer0_blobs, layer0_ring, chance, layer0_descriptor, layer3_blobs, layer3_ring,
                  nested, best_single);
    out.note(summary);
    return out;
}

Outcome criterion_determinism() {
    Outcome out;
    const fs::path dir_a = fs::temp_directory_path() / "graphwords_acceptance_det_a";
    const fs::path dir_b = fs::temp_directory_path() / "graphwords_acceptance_det_b";

    auto run_once = [](const fs::path& dir) {
        fs::remove_all(dir);
        PipelineConfig cfg = benchmark_config(dir);
        run_synth(cfg);
        cfg.dataset_manifest = dir / "datasets" / "constellation_pair" / "manifest.json";
        run_extract(cfg);
        run_build_dict(cfg);
        run_signatures(cfg);
        run_evaluate(cfg);
        std::ifstream in(sweep_csv_path(cfg), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    const std::string first = run_once(dir_a);
    const std::string second = run_once(dir_b);
    out.require(!first.empty(), "empty sweep CSV");
    out.require(first == second, "sweep CSVs differ between identical runs");
    return out;
}

Outcome criterion_paper_parameters() {
    Outcome out;
    std::mt19937_64 rng(1010);

    ImageRecord img;
    img.image_id = "sanity";
    const auto pts = testutil::random_points(rng, 400);
    for (const auto& p : pts) {
        KeyPoint kp;
        kp.x = p.x;
        kp.y = p.y;
        kp.response = uniform01(rng);
        kp.descriptor = testutil::random_descriptor(rng, 8);
        img.keypoints.push_back(std::move(kp));
    }

    const SeedSet seeds = select_seeds(img.keypoints, 300);
    out.require(seeds.seed_indices.size() == 300, "seed count");
    const auto features = build_graph_features(img, seeds, LayerSpec{});
    out.require(features.size() == 1200,
                "feature count " + std::to_string(features.size()) + " != 1200");

    std::set<std::size_t> counts;
    for (const auto& f : features) counts.insert(f.node_count());
    out.require(counts == std::set<std::size_t>{1, 4, 7, 10}, "layer node counts wrong");
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        std::string name;
        double budget_seconds;
        std::function<Outcome()> run;
    };

    double benchmark_seconds = 120.0;
    const std::vector<Criterion> criteria = {
        {1, "closed form on isolated points", 1.0, criterion_closed_form},
        {2, "small-distance approximation bound", 1.0, criterion_approximation_bound},
        {3, "kernel normalization, symmetry, permutation invariance", 10.0,
         criterion_cdk_invariants},
        {4, "triangulation empty-circumcircle oracle", 10.0, criterion_delaunay_oracle},
        {5, "similarity-transform invariance", 10.0, criterion_affine_invariance},
        {6, "medoid exhaustive oracle", 5.0, criterion_medoid_oracle},
        {7, "average precision and MAP oracles", 5.0, criterion_ap_map_oracle},
        {8, "synthetic benchmark qualitative claim", 120.0,
         [&] { return criterion_qualitative_claim(&benchmark_seconds); }},
        {9, "end-to-end determinism", 0.0, criterion_determinism},  // budget set below
        {10, "seed and layer parameter sanity", 1.0, criterion_paper_parameters},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto started = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        double budget = c.budget_seconds;
        if (c.number == 9) budget = 2.0 * benchmark_seconds;
        if (budget > 0.0 && elapsed > budget) {
            outcome.pass = false;
            outcome.detail += (outcome.detail.empty() ? "" : "; ") + std::string("over budget ") +
                              std::to_string(budget) + "s";
        }

        std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", outcome.pass ? "PASS" : "FAIL",
                    c.number, c.name.c_str(), elapsed, outcome.detail.empty() ? "" : " -- ",
                    outcome.detail.c_str());
        if (!outcome.pass) ++failures;
    }

    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
