#include "sparsefs/yolo.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "sparsefs/error.hpp"
#include "sparsefs/tensorio.hpp"

namespace sparsefs::yolo {

namespace {

std::vector<std::string_view> fields_of(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

}  // namespace

std::vector<Box> parse_annotations(std::string_view text) {
    std::vector<Box> boxes;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        const auto fields = fields_of(line);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() != 5) {
            throw ParseError("expected 5 fields 'class xc yc w h', found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        Box box;
        {
            const auto f = fields[0];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), box.class_id);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw ParseError("class id '" + std::string(f) + "' is not a non-negative integer",
                                 line_no, 1);
            }
        }
        std::array<double*, 4> geometry{&box.x_center, &box.y_center, &box.width, &box.height};
        for (std::size_t k = 0; k < geometry.size(); ++k) {
            const auto f = fields[k + 1];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), *geometry[k]);
            if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(*geometry[k])) {
                throw ParseError("non-numeric geometry '" + std::string(f) + "'", line_no, k + 2);
            }
            if (*geometry[k] < 0.0 || *geometry[k] > 1.0) {
                throw ParseError("geometry '" + std::string(f) + "' outside [0,1]", line_no,
                                 k + 2);
            }
        }
        boxes.push_back(box);
    }
    return boxes;
}

std::uint32_t derive_label(std::string_view annotation_text) {
    return parse_annotations(annotation_text).empty() ? 0u : 1u;
}

ManifestLabels labels_from_manifest(const std::filesystem::path& manifest,
                                    const std::filesystem::path& annotation_dir) {
    ManifestLabels out;
    std::istringstream in(io::read_text(manifest));
    std::string stem;
    while (std::getline(in, stem)) {
        while (!stem.empty() && std::isspace(static_cast<unsigned char>(stem.back()))) {
            stem.pop_back();
        }
        if (stem.empty()) {
            continue;
        }
        const auto path = annotation_dir / (stem + ".txt");
        if (!std::filesystem::exists(path)) {
            out.labels.push_back(0);
            out.missing.push_back(stem);
        } else {
            out.labels.push_back(derive_label(io::read_text(path)));
        }
        out.stems.push_back(std::move(stem));
    }
    return out;
}

}  // namespace sparsefs::yolo
