#pragma once

#include <filesystem>
#include <string>

#include "osmeval/point_cloud.hpp"

namespace osmeval {

enum class PlyFormat { Ascii, BinaryLittleEndian };

struct PlyReadOptions {
    /// Name of the integer vertex property carrying the class label.
    std::string label_field = "class_id";
    /// When > 0, label values outside [0, class_count) map to kVoidClass.
    /// Negative labels always map to kVoidClass.
    int class_count = 0;
};

struct PlyWriteOptions {
    PlyFormat format = PlyFormat::Ascii;
    std::string label_field = "class_id";
};

/// Load a PLY point cloud (ascii or binary_little_endian). The vertex element
/// must provide x, y, z (float32/float64) and the named integer label
/// property; an "instance_id" integer property is picked up when present.
LabeledPointCloud load_point_cloud(const std::filesystem::path& path,
                                   const PlyReadOptions& options = {});

/// Write the canonical-form PLY this tool uses for fixtures and exports:
/// fixed header layout, float32 coordinates, int32 labels. Files written here
/// survive load_point_cloud -> save_point_cloud byte-for-byte.
void save_point_cloud(const std::filesystem::path& path, const LabeledPointCloud& cloud,
                      const PlyWriteOptions& options = {});

}  // namespace osmeval
