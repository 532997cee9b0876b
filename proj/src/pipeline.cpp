#include "graphwords/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "feature_json.hpp"
#include "graphwords/dataset.hpp"
#include "graphwords/parallel.hpp"

namespace graphwords {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string layers_tag(const std::vector<std::size_t>& subset, char sep) {
    std::string tag;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i > 0) tag += sep;
        tag += std::to_string(subset[i]);
    }
    return tag;
}

void check_known_keys(const ordered_json& j, const std::vector<std::string>& known,
                      const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::runtime_error("config: unknown key '" + key + "' in " + where);
        }
    }
}

struct LoadedFeatures {
    // Parallel to dataset.records; descriptors reattached from the dataset.
    std::vector<std::vector<GraphFeature>> per_record;
};

ordered_json read_json_file(const fs::path& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(what + ": cannot open " + path.string());
    try {
        return ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error(what + ": parse error in " + path.string() + ": " + e.what());
    }
}

}  // namespace

PipelineConfig load_config(const fs::path& path) {
    const ordered_json j = read_json_file(path, "config");
    check_known_keys(j,
                     {"dataset_manifest", "output_dir", "n_seeds", "layers", "cdk", "linkage",
                      "first_pass_k", "dictionary_sizes", "normalization", "metric",
                      "split_fraction", "rng_seed", "n_threads", "benchmark"},
                     path.string());

    PipelineConfig cfg;
    if (j.contains("dataset_manifest")) {
        cfg.dataset_manifest = j.at("dataset_manifest").get<std::string>();
        if (cfg.dataset_manifest.is_relative()) {
            cfg.dataset_manifest = path.parent_path() / cfg.dataset_manifest;
        }
    }
    if (j.contains("output_dir")) {
        cfg.output_dir = j.at("output_dir").get<std::string>();
        if (cfg.output_dir.is_relative()) cfg.output_dir = path.parent_path() / cfg.output_dir;
    }
    if (j.contains("n_seeds")) cfg.n_seeds = j.at("n_seeds").get<std::size_t>();
    if (j.contains("layers")) {
        cfg.layers.neighbor_counts = j.at("layers").get<std::vector<std::size_t>>();
        cfg.layers.validate();
    }
    if (j.contains("cdk")) {
        const auto& c = j.at("cdk");
        check_known_keys(c, {"alpha", "beta", "iterations", "distance_flavor"}, "cdk");
        if (c.contains("alpha")) cfg.cdk.alpha = c.at("alpha").get<double>();
        if (c.contains("beta")) cfg.cdk.beta = c.at("beta").get<double>();
        if (c.contains("iterations")) cfg.cdk.iterations = c.at("iterations").get<unsigned>();
        if (c.contains("distance_flavor")) {
            cfg.cdk.flavor = distance_flavor_from_string(c.at("distance_flavor").get<std::string>());
        }
        cfg.cdk.validate();
    }
    if (j.contains("linkage")) cfg.linkage = linkage_from_string(j.at("linkage").get<std::string>());
    if (j.contains("first_pass_k")) cfg.first_pass_k = j.at("first_pass_k").get<std::size_t>();
    if (j.contains("dictionary_sizes")) {
        cfg.dictionary_sizes = j.at("dictionary_sizes").get<std::vector<std::size_t>>();
    }
    if (j.contains("normalization")) {
        cfg.normalization = normalization_from_string(j.at("normalization").get<std::string>());
    }
    if (j.contains("metric")) {
        cfg.metric = signature_metric_from_string(j.at("metric").get<std::string>());
    }
    if (j.contains("split_fraction")) cfg.split_fraction = j.at("split_fraction").get<double>();
    if (j.contains("rng_seed")) cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    if (j.contains("n_threads")) cfg.n_threads = j.at("n_threads").get<unsigned>();
    if (j.contains("benchmark")) {
        const auto& b = j.at("benchmark");
        check_known_keys(b,
                         {"images_per_class", "points_per_class_unit", "descriptor_dim",
                          "descriptor_noise", "position_jitter"},
                         "benchmark");
        if (b.contains("images_per_class")) {
            cfg.benchmark.images_per_class = b.at("images_per_class").get<std::size_t>();
        }
        if (b.contains("points_per_class_unit")) {
            cfg.benchmark.points_per_class_unit = b.at("points_per_class_unit").get<std::size_t>();
        }
        if (b.contains("descriptor_dim")) {
            cfg.benchmark.descriptor_dim = b.at("descriptor_dim").get<std::size_t>();
        }
        if (b.contains("descriptor_noise")) {
            cfg.benchmark.descriptor_noise = b.at("descriptor_noise").get<double>();
        }
        if (b.contains("position_jitter")) {
            cfg.benchmark.position_jitter = b.at("position_jitter").get<double>();
        }
    }
    return cfg;
}

std::string resolved_config_json(const PipelineConfig& cfg) {
    ordered_json j;
    j["dataset_manifest"] = cfg.dataset_manifest.string();
    j["n_seeds"] = cfg.n_seeds;
    j["layers"] = cfg.layers.neighbor_counts;
    j["cdk"] = {{"alpha", cfg.cdk.alpha},
                {"beta", cfg.cdk.beta},
                {"iterations", cfg.cdk.iterations},
                {"distance_flavor", to_string(cfg.cdk.flavor)}};
    j["linkage"] = to_string(cfg.linkage);
    j["first_pass_k"] = cfg.first_pass_k;
    j["dictionary_sizes"] = cfg.dictionary_sizes;
    j["normalization"] = to_string(cfg.normalization);
    j["metric"] = to_string(cfg.metric);
    j["split_fraction"] = cfg.split_fraction;
    j["rng_seed"] = cfg.rng_seed;
    j["benchmark"] = {{"images_per_class", cfg.benchmark.images_per_class},
                      {"points_per_class_unit", cfg.benchmark.points_per_class_unit},
                      {"descriptor_dim", cfg.benchmark.descriptor_dim},
                      {"descriptor_noise", cfg.benchmark.descriptor_noise},
                      {"position_jitter", cfg.benchmark.position_jitter}};
    return j.dump();
}

std::string config_hash(const PipelineConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(resolved_config_json(cfg))));
    return buf;
}

fs::path features_dir(const PipelineConfig& cfg) { return cfg.output_dir / "features"; }

fs::path codebook_path(const PipelineConfig& cfg, std::size_t layer, std::size_t size) {
    return cfg.output_dir / "codebooks" /
           ("layer" + std::to_string(layer) + "_size" + std::to_string(size) + ".json");
}

fs::path signatures_path(const PipelineConfig& cfg, std::size_t size) {
    return cfg.output_dir / "signatures" / ("size" + std::to_string(size) + ".jsonl");
}

fs::path reports_dir(const PipelineConfig& cfg) { return cfg.output_dir / "reports"; }

fs::path sweep_csv_path(const PipelineConfig& cfg) { return reports_dir(cfg) / "sweep.csv"; }

SplitResult resolve_split(const PipelineConfig& cfg, const Dataset& dataset) {
    bool any_test = false;
    for (const auto& rec : dataset.records) {
        if (rec.split == Split::test) any_test = true;
    }
    if (!any_test) {
        // Unsplit dataset: apply the configured stratified split.
        return split_dataset(dataset.records, cfg.split_fraction, cfg.rng_seed);
    }
    SplitResult result;
    for (const auto& rec : dataset.records) {
        (rec.split == Split::train ? result.train : result.test).push_back(rec);
    }
    return result;
}

void run_synth(const PipelineConfig& cfg) {
    const SyntheticBenchmark bench = make_synthetic_benchmark(cfg.benchmark, cfg.rng_seed);

    auto bake_split_and_save = [&](Dataset ds, const fs::path& manifest) {
        SplitResult split = split_dataset(ds.records, cfg.split_fraction, cfg.rng_seed);
        std::map<std::string, Split> split_by_id;
        for (const auto& r : split.train) split_by_id[r.image_id] = Split::train;
        for (const auto& r : split.test) split_by_id[r.image_id] = Split::test;
        for (auto& rec : ds.records) rec.split = split_by_id.at(rec.image_id);
        fs::create_directories(manifest.parent_path());
        save_dataset(ds, manifest);
    };

    const fs::path base = cfg.output_dir / "datasets";
    bake_split_and_save(bench.constellation_pair, base / "constellation_pair" / "manifest.json");
    bake_split_and_save(bench.descriptor_pair, base / "descriptor_pair" / "manifest.json");
}

void run_extract(const PipelineConfig& cfg) {
    const Dataset dataset = load_dataset(cfg.dataset_manifest);
    const std::string hash = config_hash(cfg);
    const fs::path dir = features_dir(cfg);
    fs::create_directories(dir);

    std::vector<std::vector<GraphFeature>> all_features(dataset.records.size());
    parallel_for(dataset.records.size(), cfg.n_threads, [&](std::size_t i) {
        const ImageRecord& rec = dataset.records[i];
        const SeedSet seeds = select_seeds(rec.keypoints, cfg.n_seeds);
        all_features[i] = build_graph_features(rec, seeds, cfg.layers);
    });

    ordered_json manifest;
    manifest["format"] = "graphwords-features";
    manifest["version"] = 1;
    manifest["config_hash"] = hash;
    manifest["images"] = ordered_json::array();
    std::vector<std::string> warnings;

    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const ImageRecord& rec = dataset.records[i];
        const std::string file = rec.image_id + ".jsonl";
        std::ofstream out(dir / file);
        if (!out) throw std::runtime_error("extract: cannot write " + (dir / file).string());
        for (const GraphFeature& f : all_features[i]) {
            ordered_json j;
            j["image_id"] = rec.image_id;
            for (auto& [key, value] : detail::feature_to_json(f, false).items()) {
                j[key] = std::move(value);
            }
            out << j.dump() << '\n';
        }
        if (rec.keypoints.empty()) {
            warnings.push_back("image '" + rec.image_id + "' has no keypoints; empty feature dump");
        }
        manifest["images"].push_back({{"image_id", rec.image_id},
                                      {"file", file},
                                      {"keypoint_count", rec.keypoints.size()},
                                      {"feature_count", all_features[i].size()}});
    }
    manifest["warnings"] = warnings;

    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("extract: cannot write features manifest");
    out << manifest.dump(2) << '\n';
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

namespace {

LoadedFeatures load_features(const PipelineConfig& cfg, const Dataset& dataset) {
    const fs::path dir = features_dir(cfg);
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw std::runtime_error("features have not been extracted: missing " +
                                 manifest_path.string() + " (run extract first)");
    }
    const ordered_json manifest = read_json_file(manifest_path, "features");
    const std::string stored_hash = manifest.value("config_hash", "");
    const std::string expected = config_hash(cfg);
    if (stored_hash != expected) {
        throw artifact_mismatch_error("features were extracted with config hash " + stored_hash +
                                      " but the current config hashes to " + expected +
                                      "; re-run extract");
    }

    LoadedFeatures lf;
    lf.per_record.resize(dataset.records.size());
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const ImageRecord& rec = dataset.records[i];
        const fs::path file = dir / (rec.image_id + ".jsonl");
        std::ifstream in(file);
        if (!in) {
            throw std::runtime_error("features: missing dump for image '" + rec.image_id + "' (" +
                                     file.string() + ")");
        }
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const ordered_json j = ordered_json::parse(line);
            GraphFeature f = detail::feature_from_json(j);
            f.node_descriptors.reserve(f.node_indices.size());
            for (const std::size_t idx : f.node_indices) {
                if (idx >= rec.keypoints.size()) {
                    throw std::runtime_error("features: node index out of range for image '" +
                                             rec.image_id + "'");
                }
                f.node_descriptors.push_back(rec.keypoints[idx].descriptor);
            }
            lf.per_record[i].push_back(std::move(f));
        }
    }
    return lf;
}

std::map<std::string, Split> split_map(const PipelineConfig& cfg, const Dataset& dataset) {
    const SplitResult split = resolve_split(cfg, dataset);
    std::map<std::string, Split> m;
    for (const auto& r : split.train) m[r.image_id] = Split::train;
    for (const auto& r : split.test) m[r.image_id] = Split::test;
    return m;
}

}  // namespace

void run_build_dict(const PipelineConfig& cfg, std::optional<std::size_t> layer,
                    std::optional<std::size_t> size) {
    const Dataset dataset = load_dataset(cfg.dataset_manifest);
    const LoadedFeatures features = load_features(cfg, dataset);
    const auto splits = split_map(cfg, dataset);

    std::vector<ImageRecord> train_records;
    std::vector<std::vector<GraphFeature>> train_features;
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        if (splits.at(dataset.records[i].image_id) == Split::train) {
            train_records.push_back(dataset.records[i]);
            train_features.push_back(features.per_record[i]);
        }
    }
    if (train_records.empty()) throw std::runtime_error("build-dict: no training images in split");

    std::vector<std::size_t> layer_list;
    if (layer) {
        if (*layer >= cfg.layers.layer_count()) {
            throw std::runtime_error("build-dict: layer " + std::to_string(*layer) +
                                     " is not configured");
        }
        layer_list.push_back(*layer);
    } else {
        for (std::size_t l = 0; l < cfg.layers.layer_count(); ++l) layer_list.push_back(l);
    }
    const std::vector<std::size_t> sizes = size ? std::vector<std::size_t>{*size}
                                                : cfg.dictionary_sizes;

    const std::string hash = config_hash(cfg);
    for (const std::size_t l : layer_list) {
        for (const std::size_t s : sizes) {
            DictionaryParams dp;
            dp.first_pass_k = cfg.first_pass_k;
            dp.final_size = s;
            dp.cdk = cfg.cdk;
            dp.linkage = cfg.linkage;
            dp.n_threads = cfg.n_threads;
            const Codebook cb = build_dictionary(train_records, train_features, l, dp);
            for (const auto& w : cb.manifest.warnings) {
                std::fprintf(stderr, "warning: layer %zu size %zu: %s\n", l, s, w.c_str());
            }
            save_codebook(cb, codebook_path(cfg, l, s), hash);
        }
    }
}

void run_signatures(const PipelineConfig& cfg) {
    const Dataset dataset = load_dataset(cfg.dataset_manifest);
    const LoadedFeatures features = load_features(cfg, dataset);
    const auto splits = split_map(cfg, dataset);
    const std::string hash = config_hash(cfg);

    for (const std::size_t size : cfg.dictionary_sizes) {
        std::vector<Codebook> codebooks;
        for (std::size_t l = 0; l < cfg.layers.layer_count(); ++l) {
            const fs::path path = codebook_path(cfg, l, size);
            if (!fs::exists(path)) {
                throw std::runtime_error("signatures: missing codebook for layer " +
                                         std::to_string(l) + " (expected " + path.string() + ")");
            }
            std::string cb_hash;
            Codebook cb = load_codebook(path, &cb_hash);
            if (cb_hash != hash) {
                throw artifact_mismatch_error("codebook " + path.string() +
                                              " was built with config hash " + cb_hash +
                                              " but the current config hashes to " + hash);
            }
            if (cb.layer != l) {
                throw std::runtime_error("signatures: codebook " + path.string() +
                                         " claims layer " + std::to_string(cb.layer) +
                                         ", expected layer " + std::to_string(l));
            }
            codebooks.push_back(std::move(cb));
        }

        std::vector<Signature> sigs(dataset.records.size());
        parallel_for(dataset.records.size(), cfg.n_threads, [&](std::size_t i) {
            std::vector<std::vector<GraphFeature>> per_layer(cfg.layers.layer_count());
            for (const GraphFeature& f : features.per_record[i]) {
                per_layer[f.layer].push_back(f);
            }
            sigs[i] = compute_signature(per_layer, codebooks, cfg.normalization);
        });

        const fs::path path = signatures_path(cfg, size);
        fs::create_directories(path.parent_path());
        std::ofstream out(path);
        if (!out) throw std::runtime_error("signatures: cannot write " + path.string());
        for (std::size_t i = 0; i < dataset.records.size(); ++i) {
            const ImageRecord& rec = dataset.records[i];
            ordered_json j;
            j["image_id"] = rec.image_id;
            j["object_label"] = rec.object_label;
            j["split"] = to_string(splits.at(rec.image_id));
            j["normalization"] = to_string(cfg.normalization);
            j["layers"] = ordered_json::array();
            for (std::size_t l = 0; l < sigs[i].layer_histograms.size(); ++l) {
                j["layers"].push_back({{"layer", l}, {"histogram", sigs[i].layer_histograms[l]}});
            }
            out << j.dump() << '\n';
        }

        ordered_json meta;
        meta["config_hash"] = hash;
        meta["dictionary_size"] = size;
        std::ofstream meta_out(cfg.output_dir / "signatures" /
                               ("size" + std::to_string(size) + ".meta.json"));
        meta_out << meta.dump(2) << '\n';
    }
}

void run_evaluate(const PipelineConfig& cfg) {
    const std::string hash = config_hash(cfg);
    fs::create_directories(reports_dir(cfg));

    // Single layers first, then the nested prefixes, as the comparison grid.
    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t l = 0; l < cfg.layers.layer_count(); ++l) subsets.push_back({l});
    for (std::size_t len = 2; len <= cfg.layers.layer_count(); ++len) {
        std::vector<std::size_t> prefix(len);
        for (std::size_t l = 0; l < len; ++l) prefix[l] = l;
        subsets.push_back(std::move(prefix));
    }

    std::ostringstream csv;
    csv << "object_label,map,dict_size,layers,metric\n";

    for (const std::size_t size : cfg.dictionary_sizes) {
        const fs::path sig_path = signatures_path(cfg, size);
        if (!fs::exists(sig_path)) {
            throw std::runtime_error("evaluate: missing signatures for size " +
                                     std::to_string(size) + " (expected " + sig_path.string() +
                                     ")");
        }
        const ordered_json meta = read_json_file(
            cfg.output_dir / "signatures" / ("size" + std::to_string(size) + ".meta.json"),
            "evaluate");
        if (meta.value("config_hash", "") != hash) {
            throw artifact_mismatch_error("signatures for size " + std::to_string(size) +
                                          " carry config hash " + meta.value("config_hash", "") +
                                          " but the current config hashes to " + hash);
        }

        struct Row {
            std::string image_id, object_label;
            Split split;
            std::vector<std::vector<double>> layer_histograms;
        };
        std::vector<Row> rows;
        std::ifstream in(sig_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const ordered_json j = ordered_json::parse(line);
            Row r;
            r.image_id = j.at("image_id").get<std::string>();
            r.object_label = j.at("object_label").get<std::string>();
            r.split = j.at("split").get<std::string>() == "train" ? Split::train : Split::test;
            for (const auto& layer : j.at("layers")) {
                r.layer_histograms.push_back(layer.at("histogram").get<std::vector<double>>());
            }
            rows.push_back(std::move(r));
        }

        for (const auto& subset : subsets) {
            std::vector<SignatureEntry> train, test;
            for (const auto& r : rows) {
                Signature sig;
                sig.layer_histograms = r.layer_histograms;
                SignatureEntry e{r.image_id, r.object_label, nested_concat(sig, subset)};
                (r.split == Split::train ? train : test).push_back(std::move(e));
            }

            EvalConfig ec;
            ec.metric = cfg.metric;
            ec.layer_subset = subset;
            ec.dictionary_size = size;
            const EvalReport report = evaluate(test, train, ec);

            ordered_json j;
            j["config"] = {{"config_hash", hash},
                           {"dict_size", size},
                           {"layers", subset},
                           {"metric", to_string(cfg.metric)},
                           {"normalization", to_string(cfg.normalization)}};
            j["per_object_map"] = ordered_json::object();
            for (const auto& [label, map] : report.per_object_map) {
                j["per_object_map"][label] = map;
            }
            j["overall_mean"] = report.overall_mean;
            j["warnings"] = report.warnings;

            const fs::path report_path =
                reports_dir(cfg) /
                ("report_size" + std::to_string(size) + "_layers" + layers_tag(subset, '-') +
                 ".json");
            std::ofstream out(report_path);
            if (!out) throw std::runtime_error("evaluate: cannot write " + report_path.string());
            out << j.dump(2) << '\n';

            for (const auto& [label, map] : report.per_object_map) {
                csv << label << ',' << format_double(map) << ',' << size << ','
                    << layers_tag(subset, '+') << ',' << to_string(cfg.metric) << '\n';
            }
        }
    }

    std::ofstream out(sweep_csv_path(cfg));
    if (!out) throw std::runtime_error("evaluate: cannot write " + sweep_csv_path(cfg).string());
    out << csv.str();
}

}  // namespace graphwords
