#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "graphwords/keypoint.hpp"

namespace graphwords {

/// A loaded dataset: the dataset-wide descriptor dimension plus all image
/// records in manifest order.
struct Dataset {
    std::size_t descriptor_dim = 0;
    std::vector<ImageRecord> records;
};

/// Loads a dataset manifest (JSON) and every keypoint file (JSON Lines) it
/// references. Keypoint file paths are resolved relative to the manifest's
/// directory. Record order follows the manifest.
///
/// Throws std::runtime_error naming the offending path on a missing or
/// unparsable file, and naming the image_id on a descriptor length mismatch.
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes a dataset as manifest.json plus keypoints/<image_id>.jsonl next to
/// it. load_dataset(save_dataset(...)) is the identity.
void save_dataset(const Dataset& dataset, const std::filesystem::path& manifest_path);

bool operator==(const KeyPoint& a, const KeyPoint& b);
bool operator==(const ImageRecord& a, const ImageRecord& b);

}  // namespace graphwords
