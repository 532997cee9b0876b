#pragma once

// Shared JSON encoding of GraphFeature for codebook files and feature dumps.

#include <json.hpp>

#include "graphwords/graph_feature.hpp"

namespace graphwords::detail {

inline nlohmann::ordered_json feature_to_json(const GraphFeature& f, bool with_descriptors) {
    nlohmann::ordered_json j;
    j["seed_index"] = f.seed_index;
    j["layer"] = f.layer;
    j["node_indices"] = f.node_indices;
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [u, v] : f.edges.pairs) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    j["short"] = f.short_graph;
    if (with_descriptors) j["node_descriptors"] = f.node_descriptors;
    return j;
}

template <typename Json>
GraphFeature feature_from_json(const Json& j) {
    GraphFeature f;
    f.seed_index = j.at("seed_index").template get<std::size_t>();
    f.layer = j.at("layer").template get<std::size_t>();
    f.node_indices = j.at("node_indices").template get<std::vector<std::size_t>>();
    for (const auto& e : j.at("edges")) {
        f.edges.pairs.emplace_back(e.at(0).template get<std::uint32_t>(),
                                   e.at(1).template get<std::uint32_t>());
    }
    f.short_graph = j.at("short").template get<bool>();
    if (j.contains("node_descriptors")) {
        f.node_descriptors =
            j.at("node_descriptors").template get<std::vector<std::vector<double>>>();
    }
    return f;
}

}  // namespace graphwords::detail
