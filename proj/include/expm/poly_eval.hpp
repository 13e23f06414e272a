#pragma once

#include <array>
#include <deque>
#include <span>
#include <vector>

#include "expm/matrix.hpp"

namespace expm {

/// Coefficients of the structured order-8 and order-15+ evaluation formulas,
/// stored as the binary64 literals of the published tables.
struct CoeffSet {
    std::array<double, 6> t8;   // c1..c6 of the order-8 formula
    std::array<double, 16> t15p; // c1..c16 of the order-15+ formula
    double b16;                 // t15p[0]^4, the degree-16 coefficient of y22
};

const CoeffSet& default_coeffs();

/// Paterson-Stockmeyer block shape for degree m: powers A^2..A^j are formed,
/// then k-1 Horner steps in A^j. Cost (j-1)+(k-1) products for m >= 2.
struct PsShape {
    int m;
    int j;
    int k;

    static PsShape for_order(int m);
    int products() const { return m <= 1 ? 0 : (j - 1) + (k - 1); }
};

/// Powers A, A^2, ..., A^q of one base matrix, formed on demand.
///
/// A^k is built as A^(k-1)*A, so reaching power q from scratch costs q-1
/// products on the supplied ledger. References returned by power() stay
/// valid for the life of the cache.
class PowerCache {
public:
    explicit PowerCache(Matrix base);

    const Matrix& base() const { return powers_.front(); }
    std::size_t order() const { return base().order(); }

    const Matrix& power(int k, MulLedger& ledger);
    bool has(int k) const { return k >= 1 && k <= highest(); }
    int highest() const { return static_cast<int>(powers_.size()); }

    // 1-norm of A^k for a cached power.
    double norm(int k) const;
    std::span<const double> norms() const { return norms_; }

    /// The same cache for A * 2^-s: A^k is rescaled by 2^(-s*k), no products.
    PowerCache scaled(int s) const;

private:
    std::deque<Matrix> powers_;
    std::vector<double> norms_;
};

/// [1/i!] for i = 0..m, each the correctly rounded binary64 value.
std::vector<double> taylor_coeffs_exp(int m);

/// [1/(i+1)!] for i = 0..m.
std::vector<double> phi1_coeffs(int m);

/// sum_i coeffs[i] A^i by Paterson-Stockmeyer.
Matrix ps_eval(std::span<const double> coeffs, const Matrix& a, MulLedger& ledger);
Matrix ps_eval(std::span<const double> coeffs, PowerCache& powers, MulLedger& ledger);

/// Direct Taylor formulas T1, T2 and T4 (0, 1 and 2 products).
Matrix eval_low_order(const Matrix& a, int m, MulLedger& ledger);
Matrix eval_low_order(PowerCache& powers, int m, MulLedger& ledger);

/// Order-8 Taylor polynomial in three products.
Matrix eval_t8(const Matrix& a, const CoeffSet& coeffs, MulLedger& ledger);
Matrix eval_t8(PowerCache& powers, const CoeffSet& coeffs, MulLedger& ledger);

/// y22 = T15 + b16 A^16 in four products.
Matrix eval_t15p(const Matrix& a, const CoeffSet& coeffs, MulLedger& ledger);
Matrix eval_t15p(PowerCache& powers, const CoeffSet& coeffs, MulLedger& ledger);

} // namespace expm
