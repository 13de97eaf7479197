#include "sparsefs/tensorio.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sparsefs/error.hpp"

namespace sparsefs::io {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'P', 'F', 'M'};

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

// Splits text into lines, dropping a final empty line produced by a trailing newline.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

template <typename T>
void put_le(std::string& out, T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>(u & 0xFFu));
        u = static_cast<U>(u >> 8);
    }
}

template <typename U>
U get_le(std::string_view bytes, std::size_t offset) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        v |= static_cast<U>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    }
    return v;
}

std::uint32_t parse_index(std::string_view cell, std::size_t line_no, const char* what) {
    std::uint64_t value = 0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || value > 0xFFFFFFFFull) {
        throw ParseError(std::string("expected a non-negative integer ") + what + ", got '" +
                             std::string(cell) + "'",
                         line_no);
    }
    return static_cast<std::uint32_t>(value);
}

}  // namespace

Matrix parse_matrix_csv(std::string_view text, bool has_header) {
    auto lines = split_lines(text);
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    bool header_pending = has_header;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto line = trim(lines[li]);
        const std::size_t line_no = li + 1;
        if (line.empty()) {
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::size_t col = 0;
        std::size_t start = 0;
        while (true) {
            auto end = line.find(',', start);
            const auto cell = trim(line.substr(start, end == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : end - start));
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw ParseError("non-numeric cell '" + std::string(cell) + "'", line_no,
                                 col + 1);
            }
            if (!std::isfinite(v)) {
                throw ValidationError("line " + std::to_string(line_no) + ", column " +
                                      std::to_string(col + 1) + ": non-finite value");
            }
            values.push_back(v);
            ++col;
            if (end == std::string_view::npos) {
                break;
            }
            start = end + 1;
        }
        if (rows == 0) {
            cols = col;
        } else if (col != cols) {
            throw ParseError("row has " + std::to_string(col) + " columns, expected " +
                                 std::to_string(cols),
                             line_no);
        }
        ++rows;
    }
    return {rows, cols, std::move(values)};
}

Matrix load_matrix_csv(const std::filesystem::path& path, bool has_header) {
    return parse_matrix_csv(read_text(path), has_header);
}

std::string format_matrix_csv(const Matrix& m) {
    std::string out;
    std::array<char, 32> buf{};
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c != 0) {
                out.push_back(',');
            }
            auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), m(r, c));
            out.append(buf.data(), ptr);
        }
        out.push_back('\n');
    }
    return out;
}

void save_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
    write_text(path, format_matrix_csv(m));
}

std::string encode_matrix_bin(const Matrix& m, DType dtype) {
    std::string out;
    const std::size_t width = dtype == DType::f32 ? 4 : 8;
    out.reserve(kHeaderSize + m.size() * width);
    out.append(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kFormatVersion);
    put_le<std::uint64_t>(out, m.rows());
    put_le<std::uint64_t>(out, m.cols());
    out.push_back(static_cast<char>(dtype));
    for (double v : m.values()) {
        if (dtype == DType::f32) {
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        } else {
            put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    return out;
}

Matrix decode_matrix_bin(std::string_view bytes) {
    if (bytes.size() < kHeaderSize) {
        throw TruncationError("SPFM header needs " + std::to_string(kHeaderSize) +
                              " bytes, file has " + std::to_string(bytes.size()));
    }
    if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw FormatError("bad magic: not an SPFM file");
    }
    const auto version = get_le<std::uint32_t>(bytes, 4);
    if (version != kFormatVersion) {
        throw FormatError("unsupported SPFM version " + std::to_string(version));
    }
    const auto rows = get_le<std::uint64_t>(bytes, 8);
    const auto cols = get_le<std::uint64_t>(bytes, 16);
    const auto code = static_cast<std::uint8_t>(bytes[24]);
    if (code != static_cast<std::uint8_t>(DType::f32) &&
        code != static_cast<std::uint8_t>(DType::f64)) {
        throw FormatError("unknown dtype code " + std::to_string(code));
    }
    const std::size_t width = code == static_cast<std::uint8_t>(DType::f32) ? 4 : 8;
    const std::uint64_t actual = bytes.size() - kHeaderSize;
    // Checked by division so a hostile shape cannot overflow rows*cols*width.
    if (cols != 0 && rows > actual / width / cols) {
        throw TruncationError("SPFM payload has " + std::to_string(actual) +
                              " bytes, too short for " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    }
    const std::uint64_t count = rows * cols;
    const std::uint64_t expected = count * width;
    if (actual > expected) {
        throw FormatError("SPFM payload has " + std::to_string(actual - expected) +
                          " trailing bytes");
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t off = kHeaderSize + i * width;
        values[i] = width == 4
                        ? static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(bytes, off)))
                        : std::bit_cast<double>(get_le<std::uint64_t>(bytes, off));
        if (!std::isfinite(values[i])) {
            throw ValidationError("SPFM element " + std::to_string(i) + " is not finite");
        }
    }
    return {rows, cols, std::move(values)};
}

void save_matrix_bin(const Matrix& m, const std::filesystem::path& path, DType dtype) {
    write_text(path, encode_matrix_bin(m, dtype));
}

Matrix load_matrix_bin(const std::filesystem::path& path) {
    return decode_matrix_bin(read_text(path));
}

Matrix load_matrix(const std::filesystem::path& path, bool csv_has_header) {
    if (path.extension() == ".csv") {
        return load_matrix_csv(path, csv_has_header);
    }
    return load_matrix_bin(path);
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) {
    if (path.extension() == ".csv") {
        save_matrix_csv(m, path);
    } else {
        save_matrix_bin(m, path);
    }
}

LabelVector parse_labels(std::string_view text) {
    LabelVector labels;
    auto lines = split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto line = trim(lines[li]);
        if (line.empty()) {
            if (li + 1 == lines.size()) {
                break;
            }
            throw ParseError("empty label line", li + 1);
        }
        labels.push_back(parse_index(line, li + 1, "label"));
    }
    return labels;
}

LabelVector load_labels(const std::filesystem::path& path) {
    return parse_labels(read_text(path));
}

void save_labels(std::span<const std::uint32_t> labels, const std::filesystem::path& path) {
    std::string out;
    for (auto l : labels) {
        out += std::to_string(l);
        out.push_back('\n');
    }
    write_text(path, out);
}

FeatureMask parse_mask(std::string_view text, std::size_t source_dim) {
    FeatureMask mask{{}, source_dim};
    for (auto l : parse_labels(text)) {
        mask.selected.push_back(l);
    }
    mask.validate();
    return mask;
}

FeatureMask load_mask(const std::filesystem::path& path, std::size_t source_dim) {
    return parse_mask(read_text(path), source_dim);
}

void save_mask(const FeatureMask& mask, const std::filesystem::path& path) {
    std::string out;
    for (auto i : mask.selected) {
        out += std::to_string(i);
        out.push_back('\n');
    }
    write_text(path, out);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failed for '" + path.string() + "'");
    }
    return std::move(ss).str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

}  // namespace sparsefs::io
