#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "graphwords/codebook.hpp"

namespace graphwords {

enum class Normalization { raw_counts, l1_normalized };
enum class SignatureMetric { l1, l2, hamming };

const char* to_string(Normalization n);
const char* to_string(SignatureMetric m);
Normalization normalization_from_string(const std::string& s);
SignatureMetric signature_metric_from_string(const std::string& s);

/// Per-layer histograms over the layer codebooks. With raw_counts each entry
/// is the number of features assigned to that word; with l1_normalized each
/// layer sums to 1 (or stays all-zero when the image had no features there).
struct Signature {
    std::vector<std::vector<double>> layer_histograms;
    Normalization normalization = Normalization::l1_normalized;
};

/// Index of the codebook word closest to the feature; ties fall to the
/// smallest index. Layer 0 compares single-node descriptors directly, higher
/// layers use the kernel dissimilarity. Throws std::runtime_error on an
/// empty codebook and std::invalid_argument on a layer mismatch.
std::size_t assign_word(const GraphFeature& feature, const Codebook& codebook);

/// Histogram of closest-word assignments per layer; every feature lands in
/// exactly one bin (assignment without rejection).
Signature compute_signature(const std::vector<std::vector<GraphFeature>>& features_per_layer,
                            const std::vector<Codebook>& codebooks,
                            Normalization normalization);

/// Concatenation of the selected per-layer histograms, in layer order.
/// layer_subset must be ascending and non-empty; {0}, {0,1}, {0,1,2} and
/// {0,1,2,3} give the single-layer and nested variants.
std::vector<double> nested_concat(const Signature& sig,
                                  const std::vector<std::size_t>& layer_subset);

/// Distance between two signature vectors of equal length. hamming counts
/// bins that differ by more than 1e-12.
double signature_distance(const std::vector<double>& u, const std::vector<double>& v,
                          SignatureMetric metric);

}  // namespace graphwords
