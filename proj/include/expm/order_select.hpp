#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expm/matrix.hpp"
#include "expm/poly_eval.hpp"

namespace expm {

enum class Scheme { ps, sastre, baseline, lowrank };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

// Unit roundoff of binary64, the smallest admissible tolerance.
inline constexpr double unit_roundoff = 0x1.0p-53;

// Largest scaling parameter either selector returns.
inline constexpr int max_scaling = 20;

/// Order ladders of the two selectors. Entries (2i, 2i+1) of tail hold the
/// coefficients of the first two remainder terms of orders[i].
struct SelectionTables {
    std::vector<int> orders;
    std::vector<int> block_powers;
    std::vector<int> block_counts;
    std::vector<double> tail;

    static const SelectionTables& paterson_stockmeyer();
    static const SelectionTables& sastre();
};

/// Outcome of order/scale selection.
///
/// e1 and e2 are the bounds on ||W^(m+1)||/(m+1)! and ||W^(m+2)||/(m+2)! for
/// the unscaled W; log2_e1/log2_e2 hold the same values in the log domain
/// (never overflow). `powers` keeps every power of the unscaled W formed
/// while bounding, so evaluation can reuse them.
struct EvalPlan {
    Scheme scheme = Scheme::ps;
    int m = 0;
    int s = 0;
    double e1 = 0.0;
    double e2 = 0.0;
    double log2_e1 = 0.0;
    double log2_e2 = 0.0;
    bool terminated_early = false; // the order loop found E1 + E2 <= eps
    std::uint64_t selection_mults = 0;
    std::optional<PowerCache> powers;

    std::vector<double> cached_norms() const;
};

/// alpha_p = max a_k^(1/k) over the index set of the sharpened bound.
struct AlphaBound {
    int p = 1;
    double alpha = 0.0;
};

// Products spent by the polynomial stage of `scheme` at order m.
int polynomial_budget(Scheme scheme, int m);

// Polynomial products plus s squarings.
int total_mults(const EvalPlan& plan);

void require_tolerance(double eps);

EvalPlan select_ps(const Matrix& w, double eps, MulLedger& ledger);
EvalPlan select_ps(const Matrix& w, double eps);

EvalPlan select_sastre(const Matrix& w, double eps, MulLedger& ledger);
EvalPlan select_sastre(const Matrix& w, double eps);

/// Bound on ||sum_{k>m} A^k/k!||_1, valid while alpha < m+2.
double remainder_bound_exp(const AlphaBound& alpha, int m);

/// Bound on ||sum_{k>m} A^k/(k+1)!||_1, valid while alpha < m+3.
double remainder_bound_phi(const AlphaBound& alpha, int m);

/// Forms alpha_p from the 1-norms already cached in the plan.
///
/// Each a_k is the smallest product of cached power norms whose exponents
/// add up to k; no extra products are spent.
AlphaBound alpha_from_cache(const EvalPlan& plan, int m, int p);
AlphaBound alpha_from_norms(std::span<const double> power_norms, int m, int p);

// a_k: the smallest product of cached norms ||W^i||_1 with exponents summing to k.
double power_norm_bound(std::span<const double> power_norms, int k);

} // namespace expm
