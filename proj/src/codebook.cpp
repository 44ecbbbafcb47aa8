#include "eeglab/codebook.hpp"

#include <cmath>
#include <map>

#include "eeglab/checkpoint.hpp"
#include "eeglab/linalg.hpp"
#include "eeglab/rng.hpp"

namespace eeglab {

Codebook generate_codebook(std::size_t n_classes, std::size_t dim,
                           double sigma, std::size_t samples_per_class,
                           std::uint64_t seed) {
    if (n_classes < 2) throw SpecError("codebook needs >= 2 classes");
    if (dim < 2) throw SpecError("codeword dimension must be >= 2");
    if (sigma < 0.0) throw SpecError("sigma must be non-negative");
    if (samples_per_class < 1) throw SpecError("need >= 1 sample per class");
    Codebook cb;
    cb.sigma = sigma;
    cb.codewords = Mat(n_classes, dim);
    DetRng rng(seed);
    for (std::size_t c = 0; c < n_classes; ++c)
        for (std::size_t d = 0; d < dim; ++d) cb.codewords(c, d) = rng.uniform();
    cb.samples = Mat(n_classes * samples_per_class, dim);
    std::size_t row = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t k = 0; k < samples_per_class; ++k, ++row) {
            for (std::size_t d = 0; d < dim; ++d)
                cb.samples(row, d) = cb.codewords(c, d) + rng.normal(0.0, sigma);
            cb.labels.push_back(static_cast<int>(c));
        }
    }
    return cb;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw SpecError("matmul dimension mismatch");
    Mat out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ra = a.row(i);
        double* ro = out.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            double v = ra[k];
            if (v == 0.0) continue;
            const double* rb = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) ro[j] += v * rb[j];
        }
    }
    return out;
}

RidgeFit fit_linear_regressor(const Mat& x, const Mat& y, double lambda) {
    if (x.rows != y.rows) throw SpecError("X and Y row counts differ");
    if (lambda < 0.0) throw SpecError("lambda must be non-negative");
    const std::size_t n = x.rows, d = x.cols, m = y.cols;
    Mat xtx(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += x(r, i) * x(r, j);
            xtx(i, j) = acc;
        }
    for (std::size_t i = 0; i < d; ++i) xtx(i, i) += lambda;
    Mat xty(d, m);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += x(r, i) * y(r, j);
            xty(i, j) = acc;
        }
    RidgeFit fit;
    try {
        fit.weights = cholesky_solve(std::move(xtx), xty);
    } catch (const SingularError&) {
        if (lambda == 0.0)
            throw SingularError(
                "X'X is singular with lambda = 0; use a positive ridge");
        throw;
    }
    Mat pred = matmul(x, fit.weights);
    double sse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double e = pred.v[i] - y.v[i];
        sse += e * e;
    }
    fit.mse = sse / static_cast<double>(n * m);
    return fit;
}

double class_separability(const Mat& features, const std::vector<int>& labels) {
    if (features.rows != labels.size())
        throw SpecError("feature/label count mismatch");
    if (features.rows == 0) throw SpecError("no samples");
    std::map<int, std::size_t> counts;
    for (int l : labels) ++counts[l];
    if (counts.size() < 2)
        throw DegenerateError("class separability needs >= 2 classes");
    std::map<int, std::vector<double>> means;
    for (auto& [cls, cnt] : counts) means[cls].assign(features.cols, 0.0);
    for (std::size_t r = 0; r < features.rows; ++r) {
        auto& m = means[labels[r]];
        for (std::size_t d = 0; d < features.cols; ++d) m[d] += features(r, d);
    }
    for (auto& [cls, m] : means)
        for (double& v : m) v /= static_cast<double>(counts[cls]);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < features.rows; ++r) {
        double best = 0.0;
        int best_cls = 0;
        bool first = true;
        for (const auto& [cls, m] : means) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < features.cols; ++d) {
                double e = features(r, d) - m[d];
                d2 += e * e;
            }
            if (first || d2 < best) {
                best = d2;
                best_cls = cls;
                first = false;
            }
        }
        if (best_cls == labels[r]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(features.rows);
}

std::vector<int> nearest_codeword(const Mat& x, const Mat& codewords) {
    if (x.cols != codewords.cols)
        throw SpecError("dimension mismatch with codewords");
    std::vector<int> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        double best = 0.0;
        int best_c = 0;
        for (std::size_t c = 0; c < codewords.rows; ++c) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < x.cols; ++d) {
                double e = x(r, d) - codewords(c, d);
                d2 += e * e;
            }
            if (c == 0 || d2 < best) {
                best = d2;
                best_c = static_cast<int>(c);
            }
        }
        out[r] = best_c;
    }
    return out;
}

void save_codebook(const std::string& path, const Codebook& cb) {
    EegmBlob blob;
    blob.descriptor = {
        {"kind", "codebook"},
        {"n_classes", cb.codewords.rows},
        {"dim", cb.codewords.cols},
        {"sigma", cb.sigma},
        {"samples_per_class",
         cb.codewords.rows ? cb.samples.rows / cb.codewords.rows : 0},
    };
    std::vector<float> cw(cb.codewords.v.begin(), cb.codewords.v.end());
    std::vector<float> sm(cb.samples.v.begin(), cb.samples.v.end());
    std::vector<float> lb(cb.labels.begin(), cb.labels.end());
    blob.arrays.emplace_back("codewords", std::move(cw));
    blob.arrays.emplace_back("samples", std::move(sm));
    blob.arrays.emplace_back("labels", std::move(lb));
    write_eegm(path, blob);
}

Codebook load_codebook(const std::string& path) {
    EegmBlob blob = read_eegm(path);
    const auto& d = blob.descriptor;
    if (d.value("kind", "") != "codebook")
        throw DataError("EEGM blob is not a codebook");
    Codebook cb;
    std::size_t n = d.at("n_classes").get<std::size_t>();
    std::size_t dim = d.at("dim").get<std::size_t>();
    cb.sigma = d.at("sigma").get<double>();
    const auto& cw = blob.array("codewords");
    const auto& sm = blob.array("samples");
    const auto& lb = blob.array("labels");
    if (cw.size() != n * dim || sm.size() % dim != 0)
        throw DataError("codebook array sizes inconsistent");
    cb.codewords = Mat(n, dim);
    std::copy(cw.begin(), cw.end(), cb.codewords.v.begin());
    cb.samples = Mat(sm.size() / dim, dim);
    std::copy(sm.begin(), sm.end(), cb.samples.v.begin());
    cb.labels.assign(lb.begin(), lb.end());
    if (cb.labels.size() != cb.samples.rows)
        throw DataError("codebook label count inconsistent");
    return cb;
}

}  // namespace eeglab
