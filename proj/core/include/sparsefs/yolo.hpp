#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sparsefs/matrix.hpp"

namespace sparsefs::yolo {

/// One "class xc yc w h" line with normalized geometry.
struct Box {
    std::uint32_t class_id = 0;
    double x_center = 0.0;
    double y_center = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// Parses a YOLO label file. Blank lines are skipped; anything else must be a
/// well-formed box or a ParseError names the 1-based line.
[[nodiscard]] std::vector<Box> parse_annotations(std::string_view text);

/// Binary defect label: 1 if the file holds at least one box, else 0.
[[nodiscard]] std::uint32_t derive_label(std::string_view annotation_text);

struct ManifestLabels {
    LabelVector labels;
    std::vector<std::string> stems;
    /// Stems whose `<stem>.txt` was missing; those rows are labeled 0.
    std::vector<std::string> missing;
};

/// Reads one image stem per manifest line and labels each from
/// `annotation_dir/<stem>.txt`, preserving manifest order.
[[nodiscard]] ManifestLabels labels_from_manifest(const std::filesystem::path& manifest,
                                                  const std::filesystem::path& annotation_dir);

}  // namespace sparsefs::yolo
