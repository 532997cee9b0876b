#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "graphwords/keypoint.hpp"
#include "graphwords/signature.hpp"

namespace graphwords {

/// One image's signature vector plus the labels ranking needs.
struct SignatureEntry {
    std::string image_id;
    std::string object_label;
    std::vector<double> vec;
};

/// Full ordering of a corpus for one query, ascending by distance, distance
/// ties broken by image_id.
struct RankedList {
    std::string query_id;
    std::vector<std::pair<std::string, double>> entries;
};

struct EvalConfig {
    SignatureMetric metric = SignatureMetric::l1;
    std::vector<std::size_t> layer_subset;  // echoed into reports
    std::size_t dictionary_size = 0;        // echoed into reports
};

struct EvalReport {
    std::map<std::string, double> per_object_map;  // object label -> MAP
    double overall_mean = 0.0;                     // unweighted mean over objects
    EvalConfig config;
    std::vector<std::string> warnings;
};

RankedList rank(const SignatureEntry& query, const std::vector<SignatureEntry>& corpus,
                SignatureMetric metric);

/// Non-interpolated average precision over the full ranked list:
/// AP = (1/R) * sum over relevant ranks r of precision@r. A list with no
/// relevant item scores 0 (callers warn).
double average_precision(const std::vector<int>& relevance_flags);

/// Ranks every test signature against the training corpus and aggregates
/// per-object MAP (mean AP over that object's test images) plus the
/// unweighted mean over objects. A test object absent from train is reported
/// as a warning and excluded from the overall mean.
EvalReport evaluate(const std::vector<SignatureEntry>& test,
                    const std::vector<SignatureEntry>& train, const EvalConfig& config);

/// Per-object stratified random split: ceil(fraction * n) of each object's
/// images go to train. Deterministic given rng_seed; an object with a single
/// image goes to train with a warning.
struct SplitResult {
    std::vector<ImageRecord> train;
    std::vector<ImageRecord> test;
    std::vector<std::string> warnings;
};
SplitResult split_dataset(const std::vector<ImageRecord>& records, double fraction,
                          std::uint64_t rng_seed);

}  // namespace graphwords
