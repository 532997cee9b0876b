#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "graphwords/cdk.hpp"
#include "graphwords/graph_feature.hpp"
#include "graphwords/keypoint.hpp"

namespace graphwords {

enum class Linkage { single, complete, average };

const char* to_string(Linkage l);
Linkage linkage_from_string(const std::string& s);

/// Pairwise dissimilarity, addressed by item index.
using DissimilarityFn = std::function<double(std::size_t, std::size_t)>;

/// One agglomerative cluster: its member item ids and the member that
/// minimizes the sum of dissimilarities to all members.
struct Cluster {
    std::vector<std::size_t> member_ids;  // ascending
    std::size_t medoid_id = 0;
};

/// The member of member_ids minimizing the summed dissimilarity to all
/// members; ties fall to the smallest id. Sums are accumulated in ascending
/// id order so results are bit-stable.
std::size_t cluster_medoid(const std::vector<std::size_t>& member_ids,
                           const DissimilarityFn& dissim);

/// Bottom-up clustering over items 0..n_items-1: starts from singletons and
/// merges the closest pair under the linkage until target_k clusters remain.
/// Ties on the merge distance fall to the pair with the lexicographically
/// smallest (min member id, min member id). target_k > n_items returns all
/// singletons. Clusters come back ordered by their smallest member id, each
/// with its medoid computed.
std::vector<Cluster> agglomerative_cluster(std::size_t n_items,
                                           const DissimilarityFn& dissim,
                                           std::size_t target_k, Linkage linkage);

/// Per-layer visual dictionary: the medoid features that survived two-pass
/// clustering, plus everything needed to recompute assignments later.
struct Codebook {
    std::size_t layer = 0;
    std::vector<GraphFeature> words;
    CdkParams params;
    Linkage linkage = Linkage::average;

    struct ObjectEntry {
        std::string object_label;
        std::size_t feature_count = 0;
        std::size_t first_pass_clusters = 0;
    };
    struct BuildManifest {
        std::vector<ObjectEntry> objects;
        std::size_t requested_size = 0;
        std::size_t final_size = 0;
        std::vector<std::string> warnings;
    };
    BuildManifest manifest;
};

/// Options for build_dictionary.
struct DictionaryParams {
    std::size_t first_pass_k = 500;
    std::size_t final_size = 0;
    CdkParams cdk;
    Linkage linkage = Linkage::average;
    unsigned n_threads = 0;  ///< 0 = hardware concurrency
};

/// Builds the layer's dictionary from training features.
///
/// Pass 1 clusters each object's features separately into first_pass_k
/// clusters and keeps the medoids; pass 2 clusters the pooled medoids into
/// final_size words. Layer 0 compares features with point_dissimilarity,
/// higher layers with graph_dissimilarity. Objects are processed in sorted
/// label order and pass 1 runs them concurrently; the result is
/// deterministic. An object with no features at this layer is skipped with a
/// manifest warning.
Codebook build_dictionary(const std::vector<ImageRecord>& training,
                          const std::vector<std::vector<GraphFeature>>& features_per_record,
                          std::size_t layer, const DictionaryParams& opts);

/// Codebook files are self-contained JSON: layer, params, linkage, manifest
/// and each word's full feature, so signatures never need the training set.
/// config_hash ties the artifact to the pipeline configuration it came from
/// ("" when unused).
void save_codebook(const Codebook& cb, const std::filesystem::path& path,
                   const std::string& config_hash = "");
Codebook load_codebook(const std::filesystem::path& path,
                       std::string* config_hash = nullptr);

}  // namespace graphwords
