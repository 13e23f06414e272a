#include "expm/reference.hpp"

#include <cmath>
#include <vector>

namespace expm {

namespace {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline dd quick_two_sum(double a, double b)
{
    const double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_sum(double a, double b)
{
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd operator+(dd a, dd b)
{
    dd s = two_sum(a.hi, b.hi);
    const dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd operator*(dd a, dd b)
{
    const double p = a.hi * b.hi;
    double e = std::fma(a.hi, b.hi, -p);
    e += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p, e);
}

inline dd operator/(dd a, double d)
{
    const double q1 = a.hi / d;
    const double p = q1 * d;
    const double pe = std::fma(q1, d, -p);
    const dd diff = two_sum(a.hi, -p);
    const double q2 = (diff.hi + (diff.lo - pe + a.lo)) / d;
    return quick_two_sum(q1, q2);
}

class DdMatrix {
public:
    explicit DdMatrix(std::size_t n) : n_(n), a_(n * n) {}

    static DdMatrix from(const Matrix& m, int scale_exp)
    {
        DdMatrix out(m.order());
        auto e = m.entries();
        for (std::size_t i = 0; i < e.size(); ++i) {
            out.a_[i].hi = std::ldexp(e[i], scale_exp);
        }
        return out;
    }

    static DdMatrix identity(std::size_t n)
    {
        DdMatrix out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out.a_[i * n + i].hi = 1.0;
        }
        return out;
    }

    std::size_t order() const { return n_; }

    friend DdMatrix operator*(const DdMatrix& a, const DdMatrix& b)
    {
        const std::size_t n = a.n_;
        DdMatrix c(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const dd aik = a.a_[i * n + k];
                if (aik.hi == 0.0) {
                    continue;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    c.a_[i * n + j] = c.a_[i * n + j] + aik * b.a_[k * n + j];
                }
            }
        }
        return c;
    }

    DdMatrix& operator+=(const DdMatrix& b)
    {
        for (std::size_t i = 0; i < a_.size(); ++i) {
            a_[i] = a_[i] + b.a_[i];
        }
        return *this;
    }

    DdMatrix& operator/=(double d)
    {
        for (dd& x : a_) {
            x = x / d;
        }
        return *this;
    }

    double one_norm_hi() const
    {
        double best = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                col += std::abs(a_[i * n_ + j].hi);
            }
            best = std::max(best, col);
        }
        return best;
    }

    Matrix round() const
    {
        std::vector<double> v(a_.size());
        for (std::size_t i = 0; i < a_.size(); ++i) {
            v[i] = a_[i].hi;
        }
        return Matrix(n_, std::move(v));
    }

private:
    std::size_t n_;
    std::vector<dd> a_;
};

constexpr int max_terms = 80;

} // namespace

Matrix expm_reference(const Matrix& a)
{
    const double norm = one_norm(a);
    if (norm > 0x1.0p64) {
        throw InvalidArgument("expm_reference: ||A||_1 exceeds 2^64");
    }
    const std::size_t n = a.order();
    if (norm == 0.0) {
        return Matrix::identity(n);
    }

    int s = 0;
    while (std::ldexp(norm, -s) > 0x1.0p-4) {
        ++s;
    }
    const DdMatrix as = DdMatrix::from(a, -s);

    DdMatrix sum = DdMatrix::identity(n);
    DdMatrix term = DdMatrix::identity(n);
    for (int k = 1; k <= max_terms; ++k) {
        term = term * as;
        term /= static_cast<double>(k);
        sum += term;
        if (term.one_norm_hi() <= 0x1.0p-104 * sum.one_norm_hi()) {
            break;
        }
    }
    for (int i = 0; i < s; ++i) {
        sum = sum * sum;
    }
    try {
        return sum.round();
    } catch (const NumericalError&) {
        throw NumericalError("expm_reference: overflow while squaring");
    }
}

ErrorReport relative_error(const Matrix& x, const Matrix& ref)
{
    if (x.order() != ref.order()) {
        throw DimensionError("relative_error: order mismatch");
    }
    const double denom = frobenius_norm(ref);
    if (denom == 0.0) {
        throw InvalidArgument("relative_error: reference has zero norm");
    }
    return {frobenius_norm(x - ref) / denom, NormKind::frobenius};
}

} // namespace expm
