#pragma once

#include <cstdint>

#include "expm/matrix.hpp"
#include "expm/order_select.hpp"

namespace expm {

struct ExpmResult {
    Matrix value;
    EvalPlan plan;
    std::uint64_t mults = 0;      // square products, squarings included
    std::uint64_t rect_mults = 0; // low-rank path only
    double wall_time = 0.0;       // seconds
};

/// Low-rank factorisation W = A1 * A2 with A1 n x t and A2 t x n.
struct LowRankPair {
    RectMatrix a1;
    RectMatrix a2;

    std::size_t order() const { return a1.rows(); }
    std::size_t rank() const { return a1.cols(); }

    // The dense W, formed with one rectangular product.
    Matrix product(MulLedger& ledger) const;
};

/// Repeated squaring: X^(2^s), exactly s products.
Matrix squaring(Matrix x, int s, MulLedger& ledger);

/// Truncated Taylor series with scaling ||W||/2^s < 1/2, summed until a term
/// has 1-norm <= eps. The accumulated sum is squared back.
ExpmResult expm_baseline(const Matrix& w, double eps, MulKernel kernel = MulKernel::naive);

/// Scaling and squaring with the order and scale picked by the PS or Sastre
/// selector. Powers formed during selection are reused for evaluation.
ExpmResult expm(const Matrix& w, double eps, Scheme scheme, MulKernel kernel = MulKernel::naive);

/// e^W ~ I + A1 psi_m(A2 A1) A2 with no scaling; psi_m is evaluated by
/// Paterson-Stockmeyer on the t x t matrix V = A2 A1.
ExpmResult expm_lowrank(const LowRankPair& pair, double eps, MulKernel kernel = MulKernel::naive);

// Orders tried by expm_lowrank, smallest first.
std::span<const int> lowrank_order_ladder();

// Dispatches to the driver for `scheme` (lowrank needs a pair; see above).
ExpmResult run_scheme(const Matrix& w, double eps, Scheme scheme, MulKernel kernel = MulKernel::naive);

} // namespace expm
