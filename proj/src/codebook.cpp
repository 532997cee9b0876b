#include "graphwords/codebook.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "feature_json.hpp"
#include "graphwords/parallel.hpp"

namespace graphwords {

using nlohmann::ordered_json;

const char* to_string(Linkage l) {
    switch (l) {
        case Linkage::single: return "single";
        case Linkage::complete: return "complete";
        default: return "average";
    }
}

Linkage linkage_from_string(const std::string& s) {
    if (s == "single") return Linkage::single;
    if (s == "complete") return Linkage::complete;
    if (s == "average") return Linkage::average;
    throw std::invalid_argument("unknown linkage '" + s + "'");
}

std::size_t cluster_medoid(const std::vector<std::size_t>& member_ids,
                           const DissimilarityFn& dissim) {
    if (member_ids.empty()) throw std::invalid_argument("cluster_medoid: empty cluster");

    std::vector<std::size_t> members = member_ids;
    std::sort(members.begin(), members.end());

    std::size_t best = members.front();
    double best_sum = std::numeric_limits<double>::infinity();
    for (const std::size_t candidate : members) {
        double sum = 0.0;
        for (const std::size_t other : members) {
            if (other != candidate) sum += dissim(candidate, other);
        }
        if (sum < best_sum) {  // strict: first (smallest id) minimum wins
            best_sum = sum;
            best = candidate;
        }
    }
    return best;
}

std::vector<Cluster> agglomerative_cluster(std::size_t n_items, const DissimilarityFn& dissim,
                                           std::size_t target_k, Linkage linkage) {
    if (n_items == 0) throw std::invalid_argument("agglomerative_cluster: no items");
    if (target_k == 0) throw std::invalid_argument("agglomerative_cluster: target_k must be >= 1");

    struct Node {
        std::vector<std::size_t> members;  // ascending; front() is the tie-break key
        bool active = true;
    };
    std::vector<Node> nodes(n_items);
    for (std::size_t i = 0; i < n_items; ++i) nodes[i].members = {i};

    // Pairwise linkage distances, updated in place by Lance-Williams rules.
    std::vector<std::vector<double>> dist(n_items, std::vector<double>(n_items, 0.0));
    for (std::size_t i = 0; i < n_items; ++i) {
        for (std::size_t j = i + 1; j < n_items; ++j) {
            dist[i][j] = dist[j][i] = dissim(i, j);
        }
    }

    std::size_t active_count = n_items;
    const std::size_t want = std::min(target_k, n_items);
    while (active_count > want) {
        // Scan order is ascending (key_i, key_j); a strict improvement test
        // therefore resolves distance ties to the smallest key pair.
        std::size_t best_i = n_items, best_j = n_items;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_items; ++i) {
            if (!nodes[i].active) continue;
            for (std::size_t j = i + 1; j < n_items; ++j) {
                if (!nodes[j].active) continue;
                if (dist[i][j] < best) {
                    best = dist[i][j];
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i == n_items) break;  // nothing mergeable

        const double size_i = static_cast<double>(nodes[best_i].members.size());
        const double size_j = static_cast<double>(nodes[best_j].members.size());
        for (std::size_t k = 0; k < n_items; ++k) {
            if (!nodes[k].active || k == best_i || k == best_j) continue;
            double updated = 0.0;
            switch (linkage) {
                case Linkage::single: updated = std::min(dist[k][best_i], dist[k][best_j]); break;
                case Linkage::complete: updated = std::max(dist[k][best_i], dist[k][best_j]); break;
                case Linkage::average:
                    updated = (size_i * dist[k][best_i] + size_j * dist[k][best_j]) /
                              (size_i + size_j);
                    break;
            }
            dist[k][best_i] = dist[best_i][k] = updated;
        }

        auto& into = nodes[best_i].members;
        auto& from = nodes[best_j].members;
        into.insert(into.end(), from.begin(), from.end());
        std::inplace_merge(into.begin(), into.end() - static_cast<std::ptrdiff_t>(from.size()),
                           into.end());
        nodes[best_j].active = false;
        --active_count;
    }

    std::vector<Cluster> clusters;
    clusters.reserve(active_count);
    for (const auto& node : nodes) {
        if (!node.active) continue;
        Cluster c;
        c.member_ids = node.members;
        c.medoid_id = cluster_medoid(node.members, dissim);
        clusters.push_back(std::move(c));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.member_ids.front() < b.member_ids.front(); });
    return clusters;
}

namespace {

/// Pairwise dissimilarity over one item set, precomputed once (upper
/// triangle, row-parallel) and then shared by every merge step.
class CachedDissimilarity {
  public:
    CachedDissimilarity(const std::vector<const GraphFeature*>& items, std::size_t layer,
                        const CdkParams& params, unsigned n_threads) {
        n_ = items.size();
        cache_.assign(n_ * n_, 0.0);
        parallel_for(n_, n_threads, [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                double d;
                if (layer == 0) {
                    d = point_dissimilarity(items[i]->node_descriptors.front(),
                                            items[j]->node_descriptors.front(), params.flavor);
                } else {
                    d = graph_dissimilarity(*items[i], *items[j], params);
                }
                cache_[i * n_ + j] = d;
                cache_[j * n_ + i] = d;
            }
        });
    }

    double operator()(std::size_t i, std::size_t j) const { return cache_[i * n_ + j]; }

  private:
    std::size_t n_ = 0;
    std::vector<double> cache_;
};

}  // namespace

Codebook build_dictionary(const std::vector<ImageRecord>& training,
                          const std::vector<std::vector<GraphFeature>>& features_per_record,
                          std::size_t layer, const DictionaryParams& opts) {
    if (training.empty()) throw std::invalid_argument("build_dictionary: empty training set");
    if (training.size() != features_per_record.size()) {
        throw std::invalid_argument("build_dictionary: records and feature lists disagree");
    }
    if (opts.first_pass_k == 0 || opts.final_size == 0) {
        throw std::invalid_argument("build_dictionary: cluster counts must be >= 1");
    }
    opts.cdk.validate();

    // Group this layer's features by object, labels in sorted order.
    std::map<std::string, std::vector<const GraphFeature*>> by_object;
    for (std::size_t r = 0; r < training.size(); ++r) {
        auto& bucket = by_object[training[r].object_label];
        for (const GraphFeature& f : features_per_record[r]) {
            if (f.layer == layer) bucket.push_back(&f);
        }
    }

    Codebook cb;
    cb.layer = layer;
    cb.params = opts.cdk;
    cb.linkage = opts.linkage;
    cb.manifest.requested_size = opts.final_size;

    struct PassOneResult {
        std::vector<const GraphFeature*> medoids;
    };
    std::vector<std::pair<std::string, std::vector<const GraphFeature*>>> objects(
        by_object.begin(), by_object.end());
    std::vector<PassOneResult> pass1(objects.size());

    // Pass 1: cluster each object's features separately and keep the medoids.
    // Objects run concurrently; each owns its dissimilarity cache.
    parallel_for(objects.size(), opts.n_threads, [&](std::size_t oi) {
        const auto& items = objects[oi].second;
        if (items.empty()) return;
        CachedDissimilarity dissim(items, layer, opts.cdk, 1);
        const auto clusters =
            agglomerative_cluster(items.size(), std::cref(dissim), opts.first_pass_k, opts.linkage);
        for (const auto& c : clusters) pass1[oi].medoids.push_back(items[c.medoid_id]);
    });

    std::vector<const GraphFeature*> pooled;
    for (std::size_t oi = 0; oi < objects.size(); ++oi) {
        const auto& [label, items] = objects[oi];
        if (items.empty()) {
            cb.manifest.warnings.push_back("object '" + label + "' has no features at layer " +
                                           std::to_string(layer) + "; skipped");
            continue;
        }
        cb.manifest.objects.push_back({label, items.size(), pass1[oi].medoids.size()});
        pooled.insert(pooled.end(), pass1[oi].medoids.begin(), pass1[oi].medoids.end());
    }
    if (pooled.empty()) {
        throw std::runtime_error("build_dictionary: no features at layer " + std::to_string(layer));
    }

    // Pass 2 over the pooled medoids of all objects.
    if (opts.final_size > pooled.size()) {
        cb.manifest.warnings.push_back(
            "requested " + std::to_string(opts.final_size) + " words but only " +
            std::to_string(pooled.size()) + " pass-1 medoids are available");
    }
    CachedDissimilarity dissim(pooled, layer, opts.cdk, opts.n_threads);
    const auto clusters =
        agglomerative_cluster(pooled.size(), std::cref(dissim), opts.final_size, opts.linkage);
    for (const auto& c : clusters) cb.words.push_back(*pooled[c.medoid_id]);
    cb.manifest.final_size = cb.words.size();
    return cb;
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path,
                   const std::string& config_hash) {
    ordered_json j;
    j["format"] = "graphwords-codebook";
    j["version"] = 1;
    j["config_hash"] = config_hash;
    j["layer"] = cb.layer;
    j["params"] = {{"alpha", cb.params.alpha},
                   {"beta", cb.params.beta},
                   {"iterations", cb.params.iterations},
                   {"distance_flavor", to_string(cb.params.flavor)}};
    j["linkage"] = to_string(cb.linkage);

    ordered_json manifest;
    manifest["requested_size"] = cb.manifest.requested_size;
    manifest["final_size"] = cb.manifest.final_size;
    manifest["objects"] = ordered_json::array();
    for (const auto& o : cb.manifest.objects) {
        manifest["objects"].push_back({{"object_label", o.object_label},
                                       {"feature_count", o.feature_count},
                                       {"first_pass_clusters", o.first_pass_clusters}});
    }
    manifest["warnings"] = cb.manifest.warnings;
    j["manifest"] = std::move(manifest);

    j["words"] = ordered_json::array();
    for (const auto& w : cb.words) j["words"].push_back(detail::feature_to_json(w, true));

    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("codebook: cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Codebook load_codebook(const std::filesystem::path& path, std::string* config_hash) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("codebook: cannot open " + path.string());
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error("codebook: parse error in " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "graphwords-codebook") {
        throw std::runtime_error("codebook: " + path.string() + " is not a codebook file");
    }
    if (config_hash) *config_hash = j.value("config_hash", "");

    Codebook cb;
    cb.layer = j.at("layer").get<std::size_t>();
    const auto& p = j.at("params");
    cb.params.alpha = p.at("alpha").get<double>();
    cb.params.beta = p.at("beta").get<double>();
    cb.params.iterations = p.at("iterations").get<unsigned>();
    cb.params.flavor = distance_flavor_from_string(p.at("distance_flavor").get<std::string>());
    cb.linkage = linkage_from_string(j.at("linkage").get<std::string>());

    const auto& m = j.at("manifest");
    cb.manifest.requested_size = m.at("requested_size").get<std::size_t>();
    cb.manifest.final_size = m.at("final_size").get<std::size_t>();
    for (const auto& o : m.at("objects")) {
        cb.manifest.objects.push_back({o.at("object_label").get<std::string>(),
                                       o.at("feature_count").get<std::size_t>(),
                                       o.at("first_pass_clusters").get<std::size_t>()});
    }
    cb.manifest.warnings = m.at("warnings").get<std::vector<std::string>>();

    for (const auto& w : j.at("words")) cb.words.push_back(detail::feature_from_json(w));
    return cb;
}

}  // namespace graphwords
