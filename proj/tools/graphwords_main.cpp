// Command-line front end for the nested graph-words pipeline. Stages are
// separate subcommands working through files in the output directory, so
// expensive artifacts (dictionaries) are reused across sweep points:
//
//   graphwords synth      -c config.json    generate the bundled benchmark
//   graphwords extract    -c config.json    seeds + graph features per image
//   graphwords build-dict -c config.json    per-layer dictionaries
//   graphwords signatures -c config.json    histograms per image and size
//   graphwords evaluate   -c config.json    MAP reports and sweep.csv
//
// Exit codes: 0 success, 1 usage error, 2 data/configuration error.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "graphwords/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string manifest_override;
    std::string output_override;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> n_seeds_override;
    std::optional<unsigned> threads_override;
    std::vector<std::size_t> sizes_override;
    std::string metric_override;
    std::string normalization_override;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "Pipeline config file (JSON)");
    cmd->add_option("--manifest", args.manifest_override, "Dataset manifest path override");
    cmd->add_option("-o,--out", args.output_override, "Output directory override");
    cmd->add_option("--seed", args.seed_override, "RNG seed override");
    cmd->add_option("--n-seeds", args.n_seeds_override, "Seeds per image override");
    cmd->add_option("--threads", args.threads_override, "Worker thread count (0 = auto)");
    cmd->add_option("--sizes", args.sizes_override, "Dictionary size sweep override");
    cmd->add_option("--metric", args.metric_override, "Signature distance: l1, l2, hamming");
    cmd->add_option("--normalization", args.normalization_override,
                    "Histogram normalization: raw_counts, l1_normalized");
}

graphwords::PipelineConfig resolve_config(const CommonArgs& args) {
    graphwords::PipelineConfig cfg;
    if (!args.config_path.empty()) cfg = graphwords::load_config(args.config_path);
    if (!args.manifest_override.empty()) cfg.dataset_manifest = args.manifest_override;
    if (!args.output_override.empty()) cfg.output_dir = args.output_override;
    if (args.seed_override) cfg.rng_seed = *args.seed_override;
    if (args.n_seeds_override) cfg.n_seeds = *args.n_seeds_override;
    if (args.threads_override) cfg.n_threads = *args.threads_override;
    if (!args.sizes_override.empty()) cfg.dictionary_sizes = args.sizes_override;
    if (!args.metric_override.empty()) {
        cfg.metric = graphwords::signature_metric_from_string(args.metric_override);
    }
    if (!args.normalization_override.empty()) {
        cfg.normalization = graphwords::normalization_from_string(args.normalization_override);
    }
    return cfg;
}

/// Writes the resolved configuration next to the run's artifacts.
void persist_resolved_config(const graphwords::PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    std::FILE* f = std::fopen((cfg.output_dir / "resolved_config.json").string().c_str(), "w");
    if (!f) return;
    const std::string body = graphwords::resolved_config_json(cfg);
    std::fprintf(f, "{\"config_hash\":\"%s\",\"config\":%s}\n",
                 graphwords::config_hash(cfg).c_str(), body.c_str());
    std::fclose(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested graph-words object retrieval pipeline"};
    app.require_subcommand(1);

    CommonArgs synth_args, extract_args, dict_args, sig_args, eval_args;
    std::optional<std::size_t> dict_layer;
    std::optional<std::size_t> dict_size;

    CLI::App* synth = app.add_subcommand("synth", "Generate the bundled synthetic benchmark");
    add_common_options(synth, synth_args);

    CLI::App* extract = app.add_subcommand("extract", "Build seeds and graph features");
    add_common_options(extract, extract_args);

    CLI::App* dict = app.add_subcommand("build-dict", "Build per-layer visual dictionaries");
    add_common_options(dict, dict_args);
    dict->add_option("--layer", dict_layer, "Build only this layer");
    dict->add_option("--size", dict_size, "Build only this dictionary size");

    CLI::App* sigs = app.add_subcommand("signatures", "Compute image signatures");
    add_common_options(sigs, sig_args);

    CLI::App* eval = app.add_subcommand("evaluate", "Rank test images and report MAP");
    add_common_options(eval, eval_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            const auto cfg = resolve_config(synth_args);
            persist_resolved_config(cfg);
            graphwords::run_synth(cfg);
        } else if (extract->parsed()) {
            const auto cfg = resolve_config(extract_args);
            persist_resolved_config(cfg);
            graphwords::run_extract(cfg);
        } else if (dict->parsed()) {
            const auto cfg = resolve_config(dict_args);
            persist_resolved_config(cfg);
            graphwords::run_build_dict(cfg, dict_layer, dict_size);
        } else if (sigs->parsed()) {
            const auto cfg = resolve_config(sig_args);
            persist_resolved_config(cfg);
            graphwords::run_signatures(cfg);
        } else if (eval->parsed()) {
            const auto cfg = resolve_config(eval_args);
            persist_resolved_config(cfg);
            graphwords::run_evaluate(cfg);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
