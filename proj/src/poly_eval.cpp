#include "expm/poly_eval.hpp"

#include <cmath>
#include <string>

namespace expm {

namespace {

constexpr int max_series_order = 30;

__extension__ using u128 = unsigned __int128;

// Correctly rounded 1/n! for n <= 31.
//
// n! = odd * 2^twos with odd < 2^86, so 1/odd is expanded bit by bit in
// exact 128-bit integer arithmetic and rounded to nearest-even once.
double reciprocal_factorial(int n)
{
    u128 odd = 1;
    int twos = 0;
    for (int i = 2; i <= n; ++i) {
        int f = i;
        while (f % 2 == 0) {
            f /= 2;
            ++twos;
        }
        odd *= static_cast<unsigned>(f);
    }
    if (odd == 1) {
        return std::ldexp(1.0, -twos);
    }
    // 1/odd = 0.b1 b2 b3 ... ; the first set bit fixes the exponent.
    u128 rem = 1;
    int lead = 0;
    while (rem < odd) {
        rem <<= 1;
        ++lead;
    }
    // Now 2^lead / odd in [1, 2): collect 53 mantissa bits plus a round bit.
    std::uint64_t mant = 0;
    for (int b = 0; b < 54; ++b) {
        mant <<= 1;
        if (rem >= odd) {
            rem -= odd;
            mant |= 1;
        }
        rem <<= 1;
    }
    const bool round_bit = (mant & 1) != 0;
    const bool sticky = rem != 0;
    mant >>= 1;
    if (round_bit && (sticky || (mant & 1) != 0)) {
        ++mant;
    }
    return std::ldexp(static_cast<double>(mant), -lead - 52 - twos);
}

void require_series_order(int m, const char* what)
{
    if (m < 0 || m > max_series_order) {
        throw InvalidArgument(std::string(what) + ": order " + std::to_string(m) +
                              " outside [0, 30]");
    }
}

int ceil_sqrt(int m)
{
    int j = 0;
    while (j * j < m) {
        ++j;
    }
    return j;
}

// sum_{i=0}^{deg} c[i] A^i with A^0 = I, using cached powers only.
Matrix block_sum(std::span<const double> c, PowerCache& powers, MulLedger& ledger)
{
    std::vector<double> weights;
    std::vector<const Matrix*> terms;
    for (std::size_t i = 1; i < c.size(); ++i) {
        weights.push_back(c[i]);
        terms.push_back(&powers.power(static_cast<int>(i), ledger));
    }
    if (terms.empty()) {
        return Matrix::identity(powers.order(), c[0]);
    }
    return add_identity(linear_combination(weights, terms), c[0]);
}

} // namespace

const CoeffSet& default_coeffs()
{
    static const CoeffSet coeffs = [] {
        CoeffSet c{
            {
                4.980119205559973e-3,
                1.992047682223989e-2,
                7.665265321119147e-2,
                8.765009801785554e-1,
                1.225521150112075e-1,
                2.974307204847627e0,
            },
            {
                4.018761610201036e-4,
                2.945531440279683e-3,
                -8.709066576837676e-3,
                4.017568440673568e-1,
                3.230762888122312e-2,
                5.768988513026145e0,
                2.338576034271299e-2,
                2.381070373870987e-1,
                2.224209172496374e0,
                -5.792361707073261e0,
                -4.130276365929783e-2,
                1.040801735231354e1,
                -6.331712455883370e1,
                3.484665863364574e-1,
                1.0,
                1.0,
            },
            0.0,
        };
        const double c1 = c.t15p[0];
        c.b16 = c1 * c1 * c1 * c1;
        return c;
    }();
    return coeffs;
}

PsShape PsShape::for_order(int m)
{
    if (m < 0) {
        throw InvalidArgument("PsShape: negative order");
    }
    if (m <= 1) {
        return {m, 1, 1};
    }
    const int j = ceil_sqrt(m);
    return {m, j, (m + j - 1) / j};
}

PowerCache::PowerCache(Matrix base)
{
    norms_.push_back(one_norm(base));
    powers_.push_back(std::move(base));
}

const Matrix& PowerCache::power(int k, MulLedger& ledger)
{
    if (k < 1) {
        throw InvalidArgument("PowerCache: power index must be >= 1");
    }
    while (highest() < k) {
        Matrix next = mat_mul(powers_.back(), powers_.front(), ledger);
        norms_.push_back(one_norm(next));
        powers_.push_back(std::move(next));
    }
    return powers_[static_cast<std::size_t>(k - 1)];
}

double PowerCache::norm(int k) const
{
    if (!has(k)) {
        throw InvalidArgument("PowerCache: power " + std::to_string(k) + " not cached");
    }
    return norms_[static_cast<std::size_t>(k - 1)];
}

PowerCache PowerCache::scaled(int s) const
{
    PowerCache out(scale_pow2(powers_.front(), s));
    for (int k = 2; k <= highest(); ++k) {
        Matrix p = scale_pow2(powers_[static_cast<std::size_t>(k - 1)], s * k);
        out.norms_.push_back(one_norm(p));
        out.powers_.push_back(std::move(p));
    }
    return out;
}

std::vector<double> taylor_coeffs_exp(int m)
{
    require_series_order(m, "taylor_coeffs_exp");
    std::vector<double> c;
    for (int i = 0; i <= m; ++i) {
        c.push_back(reciprocal_factorial(i));
    }
    return c;
}

std::vector<double> phi1_coeffs(int m)
{
    require_series_order(m, "phi1_coeffs");
    std::vector<double> c;
    for (int i = 0; i <= m; ++i) {
        c.push_back(reciprocal_factorial(i + 1));
    }
    return c;
}

Matrix ps_eval(std::span<const double> coeffs, const Matrix& a, MulLedger& ledger)
{
    PowerCache powers(a);
    return ps_eval(coeffs, powers, ledger);
}

Matrix ps_eval(std::span<const double> coeffs, PowerCache& powers, MulLedger& ledger)
{
    if (coeffs.empty()) {
        throw InvalidArgument("ps_eval: empty coefficient list");
    }
    const int m = static_cast<int>(coeffs.size()) - 1;
    if (m <= 1) {
        return block_sum(coeffs, powers, ledger);
    }
    const PsShape shape = PsShape::for_order(m);
    const auto j = static_cast<std::size_t>(shape.j);
    const Matrix& aj = powers.power(shape.j, ledger);

    // Top block runs from degree (k-1)j up to m and may include A^j itself.
    std::size_t lo = static_cast<std::size_t>(shape.k - 1) * j;
    Matrix acc = block_sum(coeffs.subspan(lo), powers, ledger);
    for (int b = shape.k - 2; b >= 0; --b) {
        lo = static_cast<std::size_t>(b) * j;
        acc = mat_mul(acc, aj, ledger) + block_sum(coeffs.subspan(lo, j), powers, ledger);
    }
    return acc;
}

Matrix eval_low_order(const Matrix& a, int m, MulLedger& ledger)
{
    PowerCache powers(a);
    return eval_low_order(powers, m, ledger);
}

Matrix eval_low_order(PowerCache& powers, int m, MulLedger& ledger)
{
    const Matrix& a = powers.base();
    switch (m) {
    case 1:
        return add_identity(a);
    case 2: {
        const Matrix& a2 = powers.power(2, ledger);
        return add_identity(a2 / 2.0 + a);
    }
    case 4: {
        const Matrix& a2 = powers.power(2, ledger);
        const Matrix inner = add_identity((a2 / 4.0 + a) / 3.0);
        return add_identity(mat_mul(inner, a2, ledger) / 2.0 + a);
    }
    default:
        throw InvalidArgument("eval_low_order: order " + std::to_string(m) +
                              " is not one of 1, 2, 4");
    }
}

Matrix eval_t8(const Matrix& a, const CoeffSet& coeffs, MulLedger& ledger)
{
    PowerCache powers(a);
    return eval_t8(powers, coeffs, ledger);
}

Matrix eval_t8(PowerCache& powers, const CoeffSet& coeffs, MulLedger& ledger)
{
    const auto& c = coeffs.t8;
    const Matrix& a = powers.base();
    const Matrix& a2 = powers.power(2, ledger);

    const Matrix y02 = mat_mul(a2, c[0] * a2 + c[1] * a, ledger);
    const Matrix prod = mat_mul(y02 + c[2] * a2 + c[3] * a, y02 + c[4] * a2, ledger);
    return add_identity(prod + c[5] * y02 + a2 / 2.0 + a);
}

Matrix eval_t15p(const Matrix& a, const CoeffSet& coeffs, MulLedger& ledger)
{
    PowerCache powers(a);
    return eval_t15p(powers, coeffs, ledger);
}

Matrix eval_t15p(PowerCache& powers, const CoeffSet& coeffs, MulLedger& ledger)
{
    const auto& c = coeffs.t15p;
    const Matrix& a = powers.base();
    const Matrix& a2 = powers.power(2, ledger);

    const Matrix y02 = mat_mul(a2, c[0] * a2 + c[1] * a, ledger);
    const Matrix y12 = mat_mul(y02 + c[2] * a2 + c[3] * a, y02 + c[4] * a2, ledger) +
                       c[5] * y02 + c[6] * a2;
    const Matrix y22 = mat_mul(y12 + c[7] * a2 + c[8] * a, y12 + c[9] * y02 + c[10] * a, ledger) +
                       c[11] * y12 + c[12] * y02 + c[13] * a2 + c[14] * a;
    return add_identity(y22, c[15]);
}

} // namespace expm
