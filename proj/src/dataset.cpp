#include "graphwords/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace graphwords {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

Split split_from_string(const std::string& s, const std::string& image_id) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw std::runtime_error("dataset: image '" + image_id + "' has invalid split '" + s +
                             "' (expected train or test)");
}

std::vector<KeyPoint> load_keypoint_file(const fs::path& path, std::size_t descriptor_dim,
                                         const std::string& image_id) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("dataset: cannot open keypoint file " + path.string());

    std::vector<KeyPoint> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const ordered_json::parse_error& e) {
            throw std::runtime_error("dataset: parse error in " + path.string() + " line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
        KeyPoint kp;
        kp.x = j.at("x").get<double>();
        kp.y = j.at("y").get<double>();
        kp.scale = j.at("scale").get<double>();
        kp.orientation = j.at("orientation").get<double>();
        kp.response = j.at("response").get<double>();
        kp.descriptor = j.at("descriptor").get<std::vector<double>>();
        if (kp.descriptor.size() != descriptor_dim) {
            throw std::runtime_error("dataset: image '" + image_id + "' has a descriptor of length " +
                                     std::to_string(kp.descriptor.size()) + ", dataset expects " +
                                     std::to_string(descriptor_dim));
        }
        if (kp.scale <= 0.0) {
            throw std::runtime_error("dataset: image '" + image_id + "' has nonpositive scale");
        }
        if (kp.response < 0.0) {
            throw std::runtime_error("dataset: image '" + image_id + "' has negative response");
        }
        points.push_back(std::move(kp));
    }
    return points;
}

}  // namespace

Dataset load_dataset(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("dataset: cannot open manifest " + manifest_path.string());
    ordered_json manifest;
    try {
        manifest = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error("dataset: parse error in " + manifest_path.string() + ": " +
                                 e.what());
    }

    Dataset ds;
    ds.descriptor_dim = manifest.at("descriptor_dim").get<std::size_t>();
    const fs::path base = manifest_path.parent_path();

    std::vector<std::string> seen_ids;
    for (const auto& entry : manifest.at("images")) {
        ImageRecord rec;
        rec.image_id = entry.at("image_id").get<std::string>();
        rec.object_label = entry.at("object_label").get<std::string>();
        rec.scene_id = entry.at("scene_id").get<std::string>();
        rec.split = split_from_string(entry.at("split").get<std::string>(), rec.image_id);
        for (const auto& id : seen_ids) {
            if (id == rec.image_id) {
                throw std::runtime_error("dataset: duplicate image_id '" + rec.image_id + "'");
            }
        }
        seen_ids.push_back(rec.image_id);

        const fs::path kp_path = base / entry.at("keypoint_file").get<std::string>();
        rec.keypoints = load_keypoint_file(kp_path, ds.descriptor_dim, rec.image_id);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

void save_dataset(const Dataset& dataset, const fs::path& manifest_path) {
    const fs::path base = manifest_path.parent_path();
    const fs::path kp_dir = base / "keypoints";
    fs::create_directories(kp_dir);

    ordered_json manifest;
    manifest["descriptor_dim"] = dataset.descriptor_dim;
    manifest["images"] = ordered_json::array();

    for (const auto& rec : dataset.records) {
        const std::string kp_rel = "keypoints/" + rec.image_id + ".jsonl";
        std::ofstream out(base / kp_rel);
        if (!out) throw std::runtime_error("dataset: cannot write " + (base / kp_rel).string());
        for (const auto& kp : rec.keypoints) {
            ordered_json j;
            j["x"] = kp.x;
            j["y"] = kp.y;
            j["scale"] = kp.scale;
            j["orientation"] = kp.orientation;
            j["response"] = kp.response;
            j["descriptor"] = kp.descriptor;
            out << j.dump() << '\n';
        }
        manifest["images"].push_back({{"image_id", rec.image_id},
                                      {"object_label", rec.object_label},
                                      {"scene_id", rec.scene_id},
                                      {"split", to_string(rec.split)},
                                      {"keypoint_file", kp_rel}});
    }

    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("dataset: cannot write manifest " + manifest_path.string());
    out << manifest.dump(2) << '\n';
}

bool operator==(const KeyPoint& a, const KeyPoint& b) {
    return a.x == b.x && a.y == b.y && a.scale == b.scale && a.orientation == b.orientation &&
           a.response == b.response && a.descriptor == b.descriptor;
}

bool operator==(const ImageRecord& a, const ImageRecord& b) {
    return a.image_id == b.image_id && a.object_label == b.object_label &&
           a.scene_id == b.scene_id && a.split == b.split && a.keypoints == b.keypoints;
}

}  // namespace graphwords
