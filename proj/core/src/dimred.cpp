#include "sparsefs/dimred.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "sparsefs/error.hpp"
#include "sparsefs/linalg.hpp"
#include "sparsefs/tensorio.hpp"

namespace sparsefs::dimred {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

Vector column_means(const Matrix& x) {
    Vector mean(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto r = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            mean[j] += r[j];
        }
    }
    for (auto& m : mean) {
        m /= static_cast<double>(x.rows());
    }
    return mean;
}

Matrix subtract_rowwise(const Matrix& x, std::span<const double> mean) {
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t j = 0; j < out.cols(); ++j) {
            r[j] -= mean[j];
        }
    }
    return out;
}

// Appends unit vectors orthogonal to the first `filled` rows of `comps` until
// `comps` has `target` orthonormal rows. Used for null-space directions the
// Gram route cannot recover.
void complete_basis(Matrix& comps, std::size_t filled) {
    const std::size_t d = comps.cols();
    std::size_t next_axis = 0;
    while (filled < comps.rows() && next_axis < d) {
        Vector w(d, 0.0);
        w[next_axis++] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t c = 0; c < filled; ++c) {
                const auto basis = comps.row(c);
                const double proj = dot(basis, w);
                for (std::size_t j = 0; j < d; ++j) {
                    w[j] -= proj * basis[j];
                }
            }
        }
        const double norm = std::sqrt(dot(w, w));
        if (norm < 0.5) {
            continue;
        }
        auto dst = comps.row(filled++);
        for (std::size_t j = 0; j < d; ++j) {
            dst[j] = w[j] / norm;
        }
        linalg::orient(dst);
    }
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, ptr};
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError("bad number '" + s + "' in model metadata");
    }
    return v;
}

using Meta = std::map<std::string, std::vector<std::string>>;

void write_meta(const std::filesystem::path& dir, const Meta& meta) {
    std::string text;
    for (const auto& [key, vals] : meta) {
        text += key;
        for (const auto& v : vals) {
            text += ' ';
            text += v;
        }
        text += '\n';
    }
    io::write_text(dir / "meta.txt", text);
}

Meta read_meta(const std::filesystem::path& dir) {
    Meta meta;
    std::istringstream in(io::read_text(dir / "meta.txt"));
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) {
            continue;
        }
        auto& vals = meta[key];
        std::string v;
        while (fields >> v) {
            vals.push_back(v);
        }
    }
    return meta;
}

const std::vector<std::string>& require(const Meta& meta, const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) {
        throw FormatError("model metadata lacks '" + key + "'");
    }
    return it->second;
}

Vector row_vector(const Matrix& m) {
    return {m.values().begin(), m.values().end()};
}

Matrix as_row(std::span<const double> v) {
    return {1, v.size(), Vector(v.begin(), v.end())};
}

}  // namespace

PcaModel pca_fit(const Matrix& x, std::size_t k) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n < 2) {
        throw ContractError("pca_fit: need at least two rows");
    }
    if (k < 1 || k > std::min(n - 1, d)) {
        throw ContractError("pca_fit: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(std::min(n - 1, d)) + "]");
    }
    if (!x.all_finite()) {
        throw ContractError("pca_fit: non-finite input");
    }
    PcaModel model{column_means(x), Matrix(k, d), Vector(k)};
    const Matrix centered = subtract_rowwise(x, model.mean);
    const double inv_n = 1.0 / static_cast<double>(n);

    if (d <= n) {
        const Matrix ct = centered.transpose();
        Matrix cov = linalg::multiply_transposed(ct, ct);
        for (auto& v : cov.values()) {
            v *= inv_n;
        }
        const auto eig = linalg::symmetric_eigen(cov);
        for (std::size_t c = 0; c < k; ++c) {
            auto dst = model.components.row(c);
            for (std::size_t j = 0; j < d; ++j) {
                dst[j] = eig.vectors(j, c);
            }
            linalg::orient(dst);
            model.explained_variance[c] = eig.values[c];
        }
        return model;
    }

    Matrix gram = linalg::multiply_transposed(centered, centered);
    for (auto& v : gram.values()) {
        v *= inv_n;
    }
    const auto eig = linalg::symmetric_eigen(gram);
    const double floor = 1e-9 * std::max(eig.values.front(), 0.0);
    std::size_t filled = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double lambda = eig.values[c];
        model.explained_variance[c] = lambda;
        if (!(lambda > floor)) {
            continue;
        }
        // w = Xcᵀ·v / sqrt(n·lambda) is the unit right singular vector.
        auto dst = model.components.row(filled);
        std::ranges::fill(dst, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = eig.vectors(i, c);
            const auto r = centered.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                dst[j] += vi * r[j];
            }
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(n) * lambda);
        for (auto& e : dst) {
            e *= scale;
        }
        linalg::orient(dst);
        ++filled;
    }
    for (std::size_t c = filled; c < k; ++c) {
        model.explained_variance[c] = std::max(model.explained_variance[c], 0.0);
    }
    complete_basis(model.components, filled);
    return model;
}

Matrix pca_transform(const Matrix& x, const PcaModel& model) {
    if (x.cols() != model.mean.size()) {
        throw ContractError("pca_transform: matrix has " + std::to_string(x.cols()) +
                            " columns, model expects " + std::to_string(model.mean.size()));
    }
    return linalg::multiply_transposed(subtract_rowwise(x, model.mean), model.components);
}

Matrix pca_inverse(const Matrix& z, const PcaModel& model) {
    if (z.cols() != model.n_components()) {
        throw ContractError("pca_inverse: matrix has " + std::to_string(z.cols()) +
                            " columns, model has " + std::to_string(model.n_components()) +
                            " components");
    }
    Matrix out = linalg::multiply_transposed(z, model.components.transpose());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t j = 0; j < out.cols(); ++j) {
            r[j] += model.mean[j];
        }
    }
    return out;
}

double kernel_value(std::span<const double> a, std::span<const double> b, Kernel kernel,
                    double gamma) {
    if (a.size() != b.size()) {
        throw ContractError("kernel_value: vectors differ in length");
    }
    if (kernel == Kernel::linear) {
        return dot(a, b);
    }
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        dist_sq += diff * diff;
    }
    return std::exp(-gamma * dist_sq);
}

Matrix kernel_matrix(const Matrix& a, const Matrix& b, Kernel kernel, double gamma) {
    Matrix k = linalg::multiply_transposed(a, b);
    if (kernel == Kernel::linear) {
        return k;
    }
    Vector norm_a(a.rows());
    Vector norm_b(b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        norm_a[i] = dot(a.row(i), a.row(i));
    }
    for (std::size_t j = 0; j < b.rows(); ++j) {
        norm_b[j] = dot(b.row(j), b.row(j));
    }
    for (std::size_t i = 0; i < k.rows(); ++i) {
        auto r = k.row(i);
        for (std::size_t j = 0; j < k.cols(); ++j) {
            const double dist_sq = std::max(norm_a[i] + norm_b[j] - 2.0 * r[j], 0.0);
            r[j] = std::exp(-gamma * dist_sq);
        }
    }
    return k;
}

Matrix double_center(const Matrix& k) {
    const std::size_t n = k.rows();
    if (n != k.cols()) {
        throw ContractError("double_center: matrix is not square");
    }
    Vector row_mean(n, 0.0);
    Vector col_mean(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            row_mean[i] += k(i, j);
            col_mean[j] += k(i, j);
        }
    }
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        row_mean[i] /= static_cast<double>(n);
        col_mean[i] /= static_cast<double>(n);
        grand += row_mean[i];
    }
    grand /= static_cast<double>(n);
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = k(i, j) - row_mean[i] - col_mean[j] + grand;
        }
    }
    return out;
}

KpcaModel kpca_fit(const Matrix& x, std::size_t k, double gamma, Kernel kernel) {
    const std::size_t n = x.rows();
    if (kernel == Kernel::rbf && !(gamma > 0.0 && std::isfinite(gamma))) {
        throw ContractError("kpca_fit: gamma must be positive");
    }
    if (k < 1 || k > n) {
        throw ContractError("kpca_fit: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + "]");
    }
    if (!x.all_finite()) {
        throw ContractError("kpca_fit: non-finite input");
    }
    KpcaModel model;
    model.train_data = x;
    model.kernel = kernel;
    model.gamma = gamma;

    const Matrix gram = kernel_matrix(x, x, kernel, gamma);
    model.kernel_row_means.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            model.kernel_row_means[i] += gram(i, j);
        }
        model.kernel_row_means[i] /= static_cast<double>(n);
        model.kernel_grand_mean += model.kernel_row_means[i];
    }
    model.kernel_grand_mean /= static_cast<double>(n);

    const auto eig = linalg::symmetric_eigen(double_center(gram));
    std::size_t kept = 0;
    while (kept < k && eig.values[kept] > kKpcaMinEigenvalue) {
        ++kept;
    }
    if (kept < k) {
        model.warnings.push_back("requested " + std::to_string(k) + " components but only " +
                                 std::to_string(kept) +
                                 " centered-kernel eigenvalues exceed the positivity floor; "
                                 "model truncated");
    }
    model.alphas = Matrix(n, kept);
    model.fit_projection = Matrix(n, kept);
    model.eigenvalues.resize(kept);
    Vector v(n);
    for (std::size_t c = 0; c < kept; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = eig.vectors(i, c);
        }
        linalg::orient(v);
        const double lambda = eig.values[c];
        const double root = std::sqrt(lambda);
        model.eigenvalues[c] = lambda;
        for (std::size_t i = 0; i < n; ++i) {
            model.alphas(i, c) = v[i] / root;
            model.fit_projection(i, c) = v[i] * root;
        }
    }
    return model;
}

Matrix kpca_transform(const Matrix& x, const KpcaModel& model) {
    if (x.cols() != model.train_data.cols()) {
        throw ContractError("kpca_transform: matrix has " + std::to_string(x.cols()) +
                            " columns, model expects " + std::to_string(model.train_data.cols()));
    }
    Matrix kq = kernel_matrix(x, model.train_data, model.kernel, model.gamma);
    const std::size_t n = model.train_data.rows();
    for (std::size_t i = 0; i < kq.rows(); ++i) {
        auto r = kq.row(i);
        double mean = 0.0;
        for (double e : r) {
            mean += e;
        }
        mean /= static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            r[j] += model.kernel_grand_mean - mean - model.kernel_row_means[j];
        }
    }
    return linalg::multiply_transposed(kq, model.alphas.transpose());
}

double default_gamma(std::size_t n_features) noexcept {
    return n_features == 0 ? 1.0 : 1.0 / static_cast<double>(n_features);
}

void save_pca(const PcaModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    io::save_matrix_bin(as_row(model.mean), dir / "mean.spfm");
    io::save_matrix_bin(model.components, dir / "components.spfm");
    Meta meta;
    meta["kind"] = {"pca"};
    meta["k"] = {std::to_string(model.n_components())};
    for (double v : model.explained_variance) {
        meta["explained_variance"].push_back(format_double(v));
    }
    write_meta(dir, meta);
}

PcaModel load_pca(const std::filesystem::path& dir) {
    const auto meta = read_meta(dir);
    if (require(meta, "kind") != std::vector<std::string>{"pca"}) {
        throw FormatError("'" + dir.string() + "' does not hold a PCA model");
    }
    PcaModel model;
    model.mean = row_vector(io::load_matrix_bin(dir / "mean.spfm"));
    model.components = io::load_matrix_bin(dir / "components.spfm");
    for (const auto& v : require(meta, "explained_variance")) {
        model.explained_variance.push_back(parse_double(v));
    }
    if (model.components.cols() != model.mean.size() ||
        model.explained_variance.size() != model.components.rows()) {
        throw FormatError("PCA model files disagree on shape");
    }
    return model;
}

void save_kpca(const KpcaModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    io::save_matrix_bin(model.train_data, dir / "train_data.spfm");
    io::save_matrix_bin(model.alphas, dir / "alphas.spfm");
    io::save_matrix_bin(as_row(model.kernel_row_means), dir / "kernel_row_means.spfm");
    Meta meta;
    meta["kind"] = {"kpca"};
    meta["kernel"] = {model.kernel == Kernel::rbf ? "rbf" : "linear"};
    meta["k"] = {std::to_string(model.n_components())};
    meta["gamma"] = {format_double(model.gamma)};
    meta["kernel_grand_mean"] = {format_double(model.kernel_grand_mean)};
    for (double v : model.eigenvalues) {
        meta["eigenvalues"].push_back(format_double(v));
    }
    write_meta(dir, meta);
}

KpcaModel load_kpca(const std::filesystem::path& dir) {
    const auto meta = read_meta(dir);
    if (require(meta, "kind") != std::vector<std::string>{"kpca"}) {
        throw FormatError("'" + dir.string() + "' does not hold a kernel PCA model");
    }
    KpcaModel model;
    model.train_data = io::load_matrix_bin(dir / "train_data.spfm");
    model.alphas = io::load_matrix_bin(dir / "alphas.spfm");
    model.kernel_row_means = row_vector(io::load_matrix_bin(dir / "kernel_row_means.spfm"));
    const auto& kernel = require(meta, "kernel");
    model.kernel = !kernel.empty() && kernel.front() == "linear" ? Kernel::linear : Kernel::rbf;
    model.gamma = parse_double(require(meta, "gamma").at(0));
    model.kernel_grand_mean = parse_double(require(meta, "kernel_grand_mean").at(0));
    if (auto it = meta.find("eigenvalues"); it != meta.end()) {
        for (const auto& v : it->second) {
            model.eigenvalues.push_back(parse_double(v));
        }
    }
    const std::size_t n = model.train_data.rows();
    if (model.alphas.rows() != n || model.kernel_row_means.size() != n) {
        throw FormatError("kernel PCA model files disagree on shape");
    }
    return model;
}

}  // namespace sparsefs::dimred
