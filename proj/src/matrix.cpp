#include "expm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace expm {

namespace {

void require_finite(std::span<const double> v, const char* what)
{
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw NumericalError(std::string(what) + ": non-finite entry");
        }
    }
}

void require_same_order(const Matrix& a, const Matrix& b, const char* what)
{
    if (a.order() != b.order()) {
        throw DimensionError(std::string(what) + ": order " + std::to_string(a.order()) + " vs " +
                             std::to_string(b.order()));
    }
}

// c[rows x cols] = a[rows x inner] * b[inner x cols], c zero on entry.
void gemm_naive(std::size_t rows, std::size_t inner, std::size_t cols, const double* a,
                const double* b, double* c)
{
    for (std::size_t i = 0; i < rows; ++i) {
        double* ci = c + i * cols;
        for (std::size_t k = 0; k < inner; ++k) {
            const double aik = a[i * inner + k];
            const double* bk = b + k * cols;
            for (std::size_t j = 0; j < cols; ++j) {
                ci[j] += aik * bk[j];
            }
        }
    }
}

// Tiles over i and j; the k tiles are visited in ascending order, so each
// c[i][j] sees exactly the summation sequence of gemm_naive.
void gemm_blocked(std::size_t rows, std::size_t inner, std::size_t cols, const double* a,
                  const double* b, double* c)
{
    constexpr std::size_t tile = 48;
    for (std::size_t kk = 0; kk < inner; kk += tile) {
        const std::size_t k_end = std::min(kk + tile, inner);
        for (std::size_t ii = 0; ii < rows; ii += tile) {
            const std::size_t i_end = std::min(ii + tile, rows);
            for (std::size_t jj = 0; jj < cols; jj += tile) {
                const std::size_t j_end = std::min(jj + tile, cols);
                for (std::size_t i = ii; i < i_end; ++i) {
                    double* ci = c + i * cols;
                    for (std::size_t k = kk; k < k_end; ++k) {
                        const double aik = a[i * inner + k];
                        const double* bk = b + k * cols;
                        for (std::size_t j = jj; j < j_end; ++j) {
                            ci[j] += aik * bk[j];
                        }
                    }
                }
            }
        }
    }
}

std::vector<double> gemm(MulKernel kernel, std::size_t rows, std::size_t inner, std::size_t cols,
                         std::span<const double> a, std::span<const double> b)
{
    std::vector<double> c(rows * cols, 0.0);
    if (kernel == MulKernel::blocked) {
        gemm_blocked(rows, inner, cols, a.data(), b.data(), c.data());
    } else {
        gemm_naive(rows, inner, cols, a.data(), b.data(), c.data());
    }
    return c;
}

template <class F>
Matrix map_entries(const Matrix& a, F f)
{
    std::vector<double> out(a.entries().begin(), a.entries().end());
    for (double& x : out) {
        x = f(x);
    }
    return Matrix(a.order(), std::move(out));
}

template <class F>
Matrix zip_entries(const Matrix& a, const Matrix& b, F f, const char* what)
{
    require_same_order(a, b, what);
    auto ea = a.entries();
    auto eb = b.entries();
    std::vector<double> out(ea.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = f(ea[i], eb[i]);
    }
    return Matrix(a.order(), std::move(out));
}

} // namespace

Matrix::Matrix(std::size_t n) : n_(n), a_(n * n, 0.0)
{
    if (n == 0) {
        throw DimensionError("matrix order must be positive");
    }
}

Matrix::Matrix(std::size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries))
{
    if (n == 0) {
        throw DimensionError("matrix order must be positive");
    }
    if (a_.size() != n * n) {
        throw DimensionError("expected " + std::to_string(n * n) + " entries, got " +
                             std::to_string(a_.size()));
    }
    require_finite(a_, "matrix");
}

Matrix Matrix::identity(std::size_t n, double diag)
{
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = diag;
    }
    return Matrix(n, std::move(v));
}

Matrix Matrix::diagonal(std::span<const double> diag)
{
    const std::size_t n = diag.size();
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = diag[i];
    }
    return Matrix(n, std::move(v));
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    const std::size_t n = rows.size();
    std::vector<double> v;
    v.reserve(n * n);
    for (const auto& r : rows) {
        if (r.size() != n) {
            throw DimensionError("from_rows: matrix is not square");
        }
        v.insert(v.end(), r.begin(), r.end());
    }
    return Matrix(n, std::move(v));
}

bool Matrix::is_zero() const
{
    return std::all_of(a_.begin(), a_.end(), [](double x) { return x == 0.0; });
}

Matrix operator+(const Matrix& a, const Matrix& b)
{
    return zip_entries(a, b, [](double x, double y) { return x + y; }, "add");
}

Matrix operator-(const Matrix& a, const Matrix& b)
{
    return zip_entries(a, b, [](double x, double y) { return x - y; }, "subtract");
}

Matrix operator-(const Matrix& a)
{
    return map_entries(a, [](double x) { return -x; });
}

Matrix operator*(double alpha, const Matrix& a)
{
    return map_entries(a, [alpha](double x) { return alpha * x; });
}

Matrix operator*(const Matrix& a, double alpha)
{
    return alpha * a;
}

Matrix operator/(const Matrix& a, double alpha)
{
    return map_entries(a, [alpha](double x) { return x / alpha; });
}

Matrix add_identity(const Matrix& a, double alpha)
{
    std::vector<double> out(a.entries().begin(), a.entries().end());
    const std::size_t n = a.order();
    for (std::size_t i = 0; i < n; ++i) {
        out[i * n + i] += alpha;
    }
    return Matrix(n, std::move(out));
}

Matrix linear_combination(std::span<const double> weights, std::span<const Matrix* const> terms)
{
    if (weights.size() != terms.size() || terms.empty()) {
        throw DimensionError("linear_combination: weights and terms disagree");
    }
    const std::size_t n = terms.front()->order();
    std::vector<double> out(n * n, 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        if (terms[t]->order() != n) {
            throw DimensionError("linear_combination: mixed orders");
        }
        const double w = weights[t];
        auto e = terms[t]->entries();
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += w * e[i];
        }
    }
    return Matrix(n, std::move(out));
}

Matrix mat_mul(const Matrix& a, const Matrix& b, MulLedger& ledger)
{
    require_same_order(a, b, "mat_mul");
    const std::size_t n = a.order();
    ledger.record_square();
    return Matrix(n, gemm(ledger.kernel(), n, n, n, a.entries(), b.entries()));
}

double one_norm(const Matrix& a)
{
    const std::size_t n = a.order();
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            col += std::abs(a(i, j));
        }
        best = std::max(best, col);
    }
    return best;
}

double frobenius_norm(const Matrix& a)
{
    // Scaled accumulation keeps huge or tiny entries from overflowing.
    double scale = 0.0;
    for (double x : a.entries()) {
        scale = std::max(scale, std::abs(x));
    }
    if (scale == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (double x : a.entries()) {
        const double r = x / scale;
        sum += r * r;
    }
    return scale * std::sqrt(sum);
}

double trace(const Matrix& a)
{
    double t = 0.0;
    for (std::size_t i = 0; i < a.order(); ++i) {
        t += a(i, i);
    }
    return t;
}

Matrix scale_pow2(const Matrix& a, int s)
{
    if (s < 0) {
        throw InvalidArgument("scale_pow2: negative exponent");
    }
    if (s == 0) {
        return a;
    }
    return map_entries(a, [s](double x) { return std::ldexp(x, -s); });
}

RectMatrix::RectMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols, 0.0)
{
    if (rows == 0 || cols == 0) {
        throw DimensionError("rectangular matrix needs positive dimensions");
    }
}

RectMatrix::RectMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries))
{
    if (rows == 0 || cols == 0) {
        throw DimensionError("rectangular matrix needs positive dimensions");
    }
    if (a_.size() != rows * cols) {
        throw DimensionError("rectangular matrix: wrong entry count");
    }
    require_finite(a_, "rectangular matrix");
}

RectMatrix::RectMatrix(const Matrix& square)
    : rows_(square.order()), cols_(square.order()),
      a_(square.entries().begin(), square.entries().end())
{
}

Matrix RectMatrix::to_square() const
{
    if (rows_ != cols_) {
        throw DimensionError("to_square: matrix is " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    }
    return Matrix(rows_, a_);
}

RectMatrix operator*(double alpha, const RectMatrix& a)
{
    std::vector<double> out(a.entries().begin(), a.entries().end());
    for (double& x : out) {
        x *= alpha;
    }
    return RectMatrix(a.rows(), a.cols(), std::move(out));
}

double one_norm(const RectMatrix& a)
{
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            col += std::abs(a(i, j));
        }
        best = std::max(best, col);
    }
    return best;
}

RectMatrix rect_mul(const RectMatrix& a, const RectMatrix& b, MulLedger& ledger)
{
    if (a.cols() != b.rows()) {
        throw DimensionError("rect_mul: inner dimensions " + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()));
    }
    ledger.record_rect();
    return RectMatrix(a.rows(), b.cols(),
                      gemm(ledger.kernel(), a.rows(), a.cols(), b.cols(), a.entries(), b.entries()));
}

} // namespace expm
