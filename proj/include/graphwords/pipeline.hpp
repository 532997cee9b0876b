#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graphwords/cdk.hpp"
#include "graphwords/codebook.hpp"
#include "graphwords/graph_feature.hpp"
#include "graphwords/retrieval.hpp"
#include "graphwords/signature.hpp"
#include "graphwords/synthetic.hpp"

namespace graphwords {

/// Resolved configuration of one pipeline run. Defaults mirror the reference
/// experimental setup (300 seeds, layers 0/3/6/9, alpha 1e-4, beta 0.1, two
/// kernel iterations, 500 first-pass clusters, L1 signature distance).
struct PipelineConfig {
    std::filesystem::path dataset_manifest;
    std::filesystem::path output_dir = "out";

    std::size_t n_seeds = 300;
    LayerSpec layers;
    CdkParams cdk;
    Linkage linkage = Linkage::average;
    std::size_t first_pass_k = 500;
    std::vector<std::size_t> dictionary_sizes = {50, 100, 500, 1000, 2000, 5000};
    Normalization normalization = Normalization::l1_normalized;
    SignatureMetric metric = SignatureMetric::l1;
    double split_fraction = 0.5;
    std::uint64_t rng_seed = 1;
    unsigned n_threads = 0;

    // synth command
    BenchmarkSpec benchmark;
};

PipelineConfig load_config(const std::filesystem::path& path);
/// Canonical JSON of everything that influences results (the output
/// directory is excluded; artifacts stay valid when moved).
std::string resolved_config_json(const PipelineConfig& cfg);
/// FNV-1a hash of resolved_config_json, hex encoded. Stored in every
/// artifact; stages refuse inputs whose hash differs from the active config.
std::string config_hash(const PipelineConfig& cfg);

/// Thrown when staged artifacts carry a different config hash than the
/// running configuration.
class artifact_mismatch_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// synth: writes the bundled benchmark datasets under
/// output_dir/datasets/{constellation_pair,descriptor_pair}/manifest.json.
void run_synth(const PipelineConfig& cfg);

/// extract: builds seeds and graph features for every image and writes one
/// JSON Lines dump per image under output_dir/features/, plus a manifest
/// with per-image counts and the config hash. Idempotent.
void run_extract(const PipelineConfig& cfg);

/// build-dict: builds and persists the codebook for one (layer, size) pair,
/// or for every configured layer and sweep size when unset.
void run_build_dict(const PipelineConfig& cfg, std::optional<std::size_t> layer = {},
                    std::optional<std::size_t> size = {});

/// signatures: computes train and test signatures for every sweep size with
/// existing codebooks; one JSON Lines file per size.
void run_signatures(const PipelineConfig& cfg);

/// evaluate: one report per (size, layer subset) over the single layers and
/// the nested prefixes, written as JSON plus a combined sweep.csv.
void run_evaluate(const PipelineConfig& cfg);

// Staged-artifact paths (relative to cfg.output_dir).
std::filesystem::path features_dir(const PipelineConfig& cfg);
std::filesystem::path codebook_path(const PipelineConfig& cfg, std::size_t layer,
                                    std::size_t size);
std::filesystem::path signatures_path(const PipelineConfig& cfg, std::size_t size);
std::filesystem::path reports_dir(const PipelineConfig& cfg);
std::filesystem::path sweep_csv_path(const PipelineConfig& cfg);

/// Deterministic split of the configured dataset (recomputed on demand; the
/// split is a pure function of the dataset and config).
SplitResult resolve_split(const PipelineConfig& cfg, const Dataset& dataset);

}  // namespace graphwords
