#include "expm/order_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace expm {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double log2_norm(double x)
{
    return x > 0.0 ? std::log2(x) : neg_inf;
}

double log2_factorial(int n)
{
    return std::lgamma(static_cast<double>(n) + 1.0) / std::log(2.0);
}

// log2(2^a + 2^b) without leaving the log domain.
double log2_sum(double a, double b)
{
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    if (hi == neg_inf) {
        return neg_inf;
    }
    return hi + std::log2(1.0 + std::exp2(lo - hi));
}


SelectionTables make_ps_tables()
{
    SelectionTables t;
    t.orders = {1, 2, 4, 6, 9, 12, 16};
    for (int m : t.orders) {
        const PsShape shape = PsShape::for_order(m);
        t.block_powers.push_back(shape.j);
        t.block_counts.push_back(m / shape.j);
    }
    const auto c = taylor_coeffs_exp(18);
    for (int idx : {2, 3, 3, 4, 5, 6, 7, 8, 10, 11, 13, 14, 17, 18}) {
        t.tail.push_back(c[static_cast<std::size_t>(idx)]);
    }
    return t;
}

SelectionTables make_sastre_tables()
{
    SelectionTables t;
    t.orders = {1, 2, 4, 8, 15};
    t.block_powers = {1, 2, 2, 2, 2};
    for (std::size_t i = 0; i < t.orders.size(); ++i) {
        t.block_counts.push_back((t.orders[i] + t.block_powers[i] - 1) / t.block_powers[i]);
    }
    const auto c = taylor_coeffs_exp(17);
    for (int idx : {2, 3, 3, 4, 5, 6, 9, 10}) {
        t.tail.push_back(c[static_cast<std::size_t>(idx)]);
    }
    t.tail.push_back(std::abs(c[16] - default_coeffs().b16));
    t.tail.push_back(c[17]);
    return t;
}

// Shared body of the two selectors. They differ only in the tables and in
// how the bounds for W^(m+1), W^(m+2) are assembled from cached norms.
template <class TailBounds>
EvalPlan select_order(const Matrix& w, double eps, MulLedger& ledger, Scheme scheme,
                      const SelectionTables& tables, TailBounds tail_bounds)
{
    require_tolerance(eps);
    const std::uint64_t start = ledger.count();

    EvalPlan plan;
    plan.scheme = scheme;
    plan.powers.emplace(w);
    PowerCache& powers = *plan.powers;

    if (powers.norm(1) == 0.0) {
        plan.log2_e1 = plan.log2_e2 = neg_inf;
        plan.terminated_early = true;
        return plan;
    }

    const double log2_eps = std::log2(eps);
    const double l1 = log2_norm(powers.norm(1));
    double le1 = neg_inf;
    double le2 = neg_inf;
    bool finish = false;
    for (std::size_t i = 0; i < tables.orders.size() && !finish; ++i) {
        const int m = tables.orders[i];
        const int j = tables.block_powers[i];
        const int k = tables.block_counts[i];
        plan.m = m;
        le1 = std::log2(tables.tail[2 * i]);
        le2 = std::log2(tables.tail[2 * i + 1]);
        if (m == 1) {
            le1 += 2.0 * l1;
            le2 += 3.0 * l1;
        } else {
            powers.power(j, ledger);
            const double lj = log2_norm(powers.norm(j));
            const double l2 = log2_norm(powers.norm(2));
            const auto [d1, d2] = tail_bounds(m, j, k, l1, l2, lj);
            le1 += d1;
            le2 += d2;
        }
        finish = log2_sum(le1, le2) <= log2_eps;
    }

    int s = 0;
    if (!finish) {
        const double logs[2] = {le1, le2};
        for (int i = 1; i <= 2; ++i) {
            if (logs[i - 1] == neg_inf) {
                continue;
            }
            const double raw = std::ceil((logs[i - 1] - log2_eps) / (plan.m + i));
            const int s1 = static_cast<int>(std::clamp(raw, -1.0, max_scaling + 1.0));
            if (s1 > s) {
                s = s1;
            }
        }
    }
    plan.s = std::min(s, max_scaling);
    plan.log2_e1 = le1;
    plan.log2_e2 = le2;
    plan.e1 = std::exp2(le1);
    plan.e2 = std::exp2(le2);
    plan.terminated_early = finish;
    plan.selection_mults = ledger.count() - start;
    return plan;
}

} // namespace

std::string_view to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::ps:
        return "ps";
    case Scheme::sastre:
        return "sastre";
    case Scheme::baseline:
        return "baseline";
    case Scheme::lowrank:
        return "lowrank";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name)
{
    for (Scheme s : {Scheme::ps, Scheme::sastre, Scheme::baseline, Scheme::lowrank}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

const SelectionTables& SelectionTables::paterson_stockmeyer()
{
    static const SelectionTables t = make_ps_tables();
    return t;
}

const SelectionTables& SelectionTables::sastre()
{
    static const SelectionTables t = make_sastre_tables();
    return t;
}

std::vector<double> EvalPlan::cached_norms() const
{
    if (!powers) {
        return {};
    }
    auto n = powers->norms();
    return {n.begin(), n.end()};
}

int polynomial_budget(Scheme scheme, int m)
{
    switch (scheme) {
    case Scheme::ps:
    case Scheme::lowrank:
        return PsShape::for_order(m).products();
    case Scheme::sastre:
        switch (m) {
        case 0:
        case 1:
            return 0;
        case 2:
            return 1;
        case 4:
            return 2;
        case 8:
            return 3;
        case 15:
            return 4;
        default:
            throw InvalidArgument("no evaluation formula for order " + std::to_string(m));
        }
    case Scheme::baseline:
        // One product per accumulated term beyond the identity.
        return m;
    }
    return 0;
}

int total_mults(const EvalPlan& plan)
{
    return polynomial_budget(plan.scheme, plan.m) + plan.s;
}

void require_tolerance(double eps)
{
    if (!(eps >= unit_roundoff) || !std::isfinite(eps)) {
        throw InvalidArgument("tolerance " + format_double(eps) + " is below unit roundoff 2^-53");
    }
}

EvalPlan select_ps(const Matrix& w, double eps, MulLedger& ledger)
{
    return select_order(w, eps, ledger, Scheme::ps, SelectionTables::paterson_stockmeyer(),
                        [](int, int, int k, double l1, double l2, double lj) {
                            return std::pair{k * lj + l1, k * lj + l2};
                        });
}

EvalPlan select_ps(const Matrix& w, double eps)
{
    MulLedger ledger;
    return select_ps(w, eps, ledger);
}

EvalPlan select_sastre(const Matrix& w, double eps, MulLedger& ledger)
{
    return select_order(w, eps, ledger, Scheme::sastre, SelectionTables::sastre(),
                        [](int m, int j, int k, double l1, double l2, double lj) {
                            if (j * k == m) {
                                return std::pair{k * lj + l1, k * lj + l2};
                            }
                            return std::pair{k * lj, k * lj + l1};
                        });
}

EvalPlan select_sastre(const Matrix& w, double eps)
{
    MulLedger ledger;
    return select_sastre(w, eps, ledger);
}

double remainder_bound_exp(const AlphaBound& alpha, int m)
{
    if (m < 0 || !(alpha.alpha >= 0.0)) {
        throw InvalidArgument("remainder_bound_exp: invalid order or alpha");
    }
    if (alpha.alpha >= m + 2) {
        throw DomainError("remainder_bound_exp: alpha " + format_double(alpha.alpha) +
                          " >= m+2 = " + std::to_string(m + 2));
    }
    if (alpha.alpha == 0.0) {
        return 0.0;
    }
    const double lead = std::exp2((m + 1) * std::log2(alpha.alpha) - log2_factorial(m + 1));
    return lead / (1.0 - alpha.alpha / (m + 2));
}

double remainder_bound_phi(const AlphaBound& alpha, int m)
{
    if (m < 0 || !(alpha.alpha >= 0.0)) {
        throw InvalidArgument("remainder_bound_phi: invalid order or alpha");
    }
    if (alpha.alpha >= m + 3) {
        throw DomainError("remainder_bound_phi: alpha " + format_double(alpha.alpha) +
                          " >= m+3 = " + std::to_string(m + 3));
    }
    if (alpha.alpha == 0.0) {
        return 0.0;
    }
    const double lead = std::exp2((m + 1) * std::log2(alpha.alpha) - log2_factorial(m + 2));
    return lead / (1.0 - alpha.alpha / (m + 3));
}

namespace {

// best[k] = min over compositions of k of sum log2 ||W^i||_1, i <= q.
std::vector<double> log2_power_bounds(std::span<const double> power_norms, int top)
{
    if (power_norms.empty()) {
        throw InvalidArgument("alpha_from_cache: no cached power norms");
    }
    const auto q = static_cast<int>(power_norms.size());
    std::vector<double> best(static_cast<std::size_t>(top) + 1,
                             std::numeric_limits<double>::infinity());
    best[0] = 0.0;
    for (int k = 1; k <= top; ++k) {
        auto& bk = best[static_cast<std::size_t>(k)];
        for (int i = 1; i <= std::min(k, q); ++i) {
            bk = std::min(bk, log2_norm(power_norms[static_cast<std::size_t>(i - 1)]) +
                                  best[static_cast<std::size_t>(k - i)]);
        }
    }
    return best;
}

} // namespace

double power_norm_bound(std::span<const double> power_norms, int k)
{
    if (k < 1) {
        throw InvalidArgument("power_norm_bound: k must be >= 1");
    }
    return std::exp2(log2_power_bounds(power_norms, k).back());
}

AlphaBound alpha_from_norms(std::span<const double> power_norms, int m, int p)
{
    if (m < 0 || p < 1 || p > m + 1) {
        throw InvalidArgument("alpha_from_cache: need 1 <= p <= m+1");
    }
    const int top = m + 1 + p;
    const auto best = log2_power_bounds(power_norms, top);
    const auto root = [&](int k) { return std::exp2(best[static_cast<std::size_t>(k)] / k); };

    // p0: the multiple of p in [m+1, m+1+p]; a_{p0} <= a_p^{p0/p} is already covered.
    const int p0 = ((m + p) / p) * p;
    double alpha = root(p);
    for (int k = m + 1; k <= top; ++k) {
        if (k != p0) {
            alpha = std::max(alpha, root(k));
        }
    }
    return {p, alpha};
}

AlphaBound alpha_from_cache(const EvalPlan& plan, int m, int p)
{
    return alpha_from_norms(plan.cached_norms(), m, p);
}

} // namespace expm
