#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expm/error.hpp"

namespace expm {

enum class MulKernel {
    naive,   // textbook i-k-j triple loop
    blocked, // cache tiled; same per-entry summation order as naive
};

/// Counts matrix-matrix products. One full n x n product is the cost unit of
/// every comparison in this library; norms, sums and scalings are free.
///
/// Rectangular products (the low-rank path) are tallied separately since
/// they are a different currency.
class MulLedger {
public:
    explicit MulLedger(MulKernel kernel = MulKernel::naive) : kernel_(kernel) {}

    std::uint64_t count() const { return count_; }
    std::uint64_t rect_count() const { return rect_count_; }
    MulKernel kernel() const { return kernel_; }

    void record_square() { ++count_; }
    void record_rect() { ++rect_count_; }

    // Folds the counts of a per-task ledger into this one.
    void merge(const MulLedger& other)
    {
        count_ += other.count_;
        rect_count_ += other.rect_count_;
    }

private:
    std::uint64_t count_ = 0;
    std::uint64_t rect_count_ = 0;
    MulKernel kernel_;
};

/// Dense square real matrix, row-major, every entry finite.
///
/// Values are immutable once built; arithmetic returns new matrices. Any
/// operation whose result would hold NaN or Inf throws NumericalError.
class Matrix {
public:
    // Zero matrix of order n (n >= 1).
    explicit Matrix(std::size_t n);
    Matrix(std::size_t n, std::vector<double> entries);

    static Matrix identity(std::size_t n, double diag = 1.0);
    static Matrix diagonal(std::span<const double> diag);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t order() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::span<const double> entries() const { return a_; }

    bool is_zero() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t n_;
    std::vector<double> a_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a);
Matrix operator*(double alpha, const Matrix& a);
Matrix operator*(const Matrix& a, double alpha);
Matrix operator/(const Matrix& a, double alpha);

// a + alpha*I
Matrix add_identity(const Matrix& a, double alpha = 1.0);

// sum_i weights[i] * terms[i]; all terms of equal order.
Matrix linear_combination(std::span<const double> weights, std::span<const Matrix* const> terms);

/// C = A*B. Bumps ledger.count() by exactly one.
Matrix mat_mul(const Matrix& a, const Matrix& b, MulLedger& ledger);

double one_norm(const Matrix& a);
double frobenius_norm(const Matrix& a);
double trace(const Matrix& a);

/// A * 2^-s, entrywise by an exact power of two.
Matrix scale_pow2(const Matrix& a, int s);

/// General dense rows x cols matrix. Only the low-rank factors use it.
class RectMatrix {
public:
    RectMatrix(std::size_t rows, std::size_t cols);
    RectMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    explicit RectMatrix(const Matrix& square);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    std::span<const double> entries() const { return a_; }

    Matrix to_square() const;

    friend bool operator==(const RectMatrix&, const RectMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> a_;
};

RectMatrix operator*(double alpha, const RectMatrix& a);
double one_norm(const RectMatrix& a);

/// Rectangular product; bumps ledger.rect_count() by one.
RectMatrix rect_mul(const RectMatrix& a, const RectMatrix& b, MulLedger& ledger);

// Text format: first line n, then n lines of n shortest round-trip decimals.
Matrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& a);
Matrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Matrix& a);

// Shortest decimal that parses back to the same binary64 value.
std::string format_double(double x);
// Strict parse of a full token; throws ParseError.
double parse_double(std::string_view token);

} // namespace expm
