#include "graphwords/signature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace graphwords {

const char* to_string(Normalization n) {
    return n == Normalization::raw_counts ? "raw_counts" : "l1_normalized";
}

const char* to_string(SignatureMetric m) {
    switch (m) {
        case SignatureMetric::l1: return "l1";
        case SignatureMetric::l2: return "l2";
        default: return "hamming";
    }
}

Normalization normalization_from_string(const std::string& s) {
    if (s == "raw_counts") return Normalization::raw_counts;
    if (s == "l1_normalized") return Normalization::l1_normalized;
    throw std::invalid_argument("unknown normalization '" + s + "'");
}

SignatureMetric signature_metric_from_string(const std::string& s) {
    if (s == "l1") return SignatureMetric::l1;
    if (s == "l2") return SignatureMetric::l2;
    if (s == "hamming") return SignatureMetric::hamming;
    throw std::invalid_argument("unknown signature metric '" + s + "'");
}

std::size_t assign_word(const GraphFeature& feature, const Codebook& codebook) {
    if (codebook.words.empty()) {
        throw std::runtime_error("assign_word: codebook for layer " +
                                 std::to_string(codebook.layer) + " is empty");
    }
    if (feature.layer != codebook.layer) {
        throw std::invalid_argument("assign_word: feature layer " + std::to_string(feature.layer) +
                                    " does not match codebook layer " +
                                    std::to_string(codebook.layer));
    }

    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < codebook.words.size(); ++w) {
        double d;
        if (codebook.layer == 0) {
            d = point_dissimilarity(feature.node_descriptors.front(),
                                    codebook.words[w].node_descriptors.front(),
                                    codebook.params.flavor);
        } else {
            d = graph_dissimilarity(feature, codebook.words[w], codebook.params);
        }
        if (d < best_d) {  // strict: equidistant words fall to the smaller index
            best_d = d;
            best = w;
        }
    }
    return best;
}

Signature compute_signature(const std::vector<std::vector<GraphFeature>>& features_per_layer,
                            const std::vector<Codebook>& codebooks, Normalization normalization) {
    if (features_per_layer.size() != codebooks.size()) {
        throw std::invalid_argument("compute_signature: one codebook per layer required");
    }

    Signature sig;
    sig.normalization = normalization;
    sig.layer_histograms.resize(codebooks.size());

    for (std::size_t layer = 0; layer < codebooks.size(); ++layer) {
        auto& hist = sig.layer_histograms[layer];
        hist.assign(codebooks[layer].words.size(), 0.0);
        for (const GraphFeature& f : features_per_layer[layer]) {
            hist[assign_word(f, codebooks[layer])] += 1.0;
        }
        if (normalization == Normalization::l1_normalized) {
            double total = 0.0;
            for (const double v : hist) total += v;
            if (total > 0.0) {
                for (double& v : hist) v /= total;
            }
            // no features at this layer: keep the all-zero vector
        }
    }
    return sig;
}

std::vector<double> nested_concat(const Signature& sig,
                                  const std::vector<std::size_t>& layer_subset) {
    if (layer_subset.empty()) {
        throw std::invalid_argument("nested_concat: layer subset must not be empty");
    }
    std::vector<double> out;
    std::size_t prev = 0;
    bool first = true;
    for (const std::size_t layer : layer_subset) {
        if (!first && layer <= prev) {
            throw std::invalid_argument("nested_concat: layer subset must be ascending");
        }
        if (layer >= sig.layer_histograms.size()) {
            throw std::invalid_argument("nested_concat: layer " + std::to_string(layer) +
                                        " not present in signature");
        }
        const auto& hist = sig.layer_histograms[layer];
        out.insert(out.end(), hist.begin(), hist.end());
        prev = layer;
        first = false;
    }
    return out;
}

double signature_distance(const std::vector<double>& u, const std::vector<double>& v,
                          SignatureMetric metric) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("signature_distance: length mismatch");
    }
    double acc = 0.0;
    switch (metric) {
        case SignatureMetric::l1:
            for (std::size_t i = 0; i < u.size(); ++i) acc += std::abs(u[i] - v[i]);
            return acc;
        case SignatureMetric::l2:
            for (std::size_t i = 0; i < u.size(); ++i) acc += (u[i] - v[i]) * (u[i] - v[i]);
            return std::sqrt(acc);
        default:
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (std::abs(u[i] - v[i]) > 1e-12) acc += 1.0;
            }
            return acc;
    }
}

}  // namespace graphwords
