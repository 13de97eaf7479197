#pragma once

// File formats shared by the library, the CLI, and the external extractor.
//
// SPFM binary matrix, all integers little-endian:
//   bytes  0-3   magic "SPFM"
//   bytes  4-7   version (u32) = 1
//   bytes  8-15  n_rows (u64)
//   bytes 16-23  n_cols (u64)
//   byte  24     dtype code: 1 = f32, 2 = f64
//   bytes 25-    row-major payload
//
// Labels and masks are text, one non-negative integer per line.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "sparsefs/matrix.hpp"

namespace sparsefs::io {

inline constexpr std::size_t kHeaderSize = 25;
inline constexpr std::uint32_t kFormatVersion = 1;

enum class DType : std::uint8_t { f32 = 1, f64 = 2 };

/// Comma-separated numeric rows. Blank trailing lines are ignored.
[[nodiscard]] Matrix parse_matrix_csv(std::string_view text, bool has_header = false);
[[nodiscard]] Matrix load_matrix_csv(const std::filesystem::path& path, bool has_header = false);
void save_matrix_csv(const Matrix& m, const std::filesystem::path& path);

/// Values are written with round-trip precision.
[[nodiscard]] std::string format_matrix_csv(const Matrix& m);

[[nodiscard]] std::string encode_matrix_bin(const Matrix& m, DType dtype = DType::f64);
[[nodiscard]] Matrix decode_matrix_bin(std::string_view bytes);
void save_matrix_bin(const Matrix& m, const std::filesystem::path& path, DType dtype = DType::f64);
[[nodiscard]] Matrix load_matrix_bin(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" is text, everything else SPFM.
[[nodiscard]] Matrix load_matrix(const std::filesystem::path& path, bool csv_has_header = false);
void save_matrix(const Matrix& m, const std::filesystem::path& path);

[[nodiscard]] LabelVector parse_labels(std::string_view text);
[[nodiscard]] LabelVector load_labels(const std::filesystem::path& path);
void save_labels(std::span<const std::uint32_t> labels, const std::filesystem::path& path);

[[nodiscard]] FeatureMask parse_mask(std::string_view text, std::size_t source_dim);
[[nodiscard]] FeatureMask load_mask(const std::filesystem::path& path, std::size_t source_dim);
void save_mask(const FeatureMask& mask, const std::filesystem::path& path);

[[nodiscard]] std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace sparsefs::io
