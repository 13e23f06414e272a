#include "expm/engine.hpp"

#include <array>
#include <chrono>
#include <cmath>

#include "expm/poly_eval.hpp"

namespace expm {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start)
{
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

Matrix evaluate_plan(const EvalPlan& plan, MulLedger& ledger)
{
    const Matrix& w = plan.powers->base();
    if (plan.m == 0) {
        return Matrix::identity(w.order());
    }
    PowerCache powers = plan.powers->scaled(plan.s);
    if (plan.scheme == Scheme::ps) {
        return ps_eval(taylor_coeffs_exp(plan.m), powers, ledger);
    }
    switch (plan.m) {
    case 1:
    case 2:
    case 4:
        return eval_low_order(powers, plan.m, ledger);
    case 8:
        return eval_t8(powers, default_coeffs(), ledger);
    case 15:
        return eval_t15p(powers, default_coeffs(), ledger);
    default:
        throw InvalidArgument("no evaluation formula for order " + std::to_string(plan.m));
    }
}

constexpr std::array<int, 9> lowrank_ladder = {1, 2, 4, 8, 15, 16, 20, 25, 30};

} // namespace

Matrix LowRankPair::product(MulLedger& ledger) const
{
    return rect_mul(a1, a2, ledger).to_square();
}

Matrix squaring(Matrix x, int s, MulLedger& ledger)
{
    if (s < 0) {
        throw InvalidArgument("squaring: negative count");
    }
    for (int i = 0; i < s; ++i) {
        x = mat_mul(x, x, ledger);
    }
    return x;
}

ExpmResult expm_baseline(const Matrix& w, double eps, MulKernel kernel)
{
    require_tolerance(eps);
    const auto start = clock_type::now();
    MulLedger ledger(kernel);

    int s = 0;
    const double norm = one_norm(w);
    while (std::ldexp(norm, -s) >= 0.5) {
        ++s;
    }
    const Matrix ws = scale_pow2(w, s);

    Matrix x = Matrix::identity(w.order());
    Matrix y = ws;
    double k = 2.0;
    int degree = 0;
    double term_norm = one_norm(y);
    while (term_norm > eps) {
        x = x + y;
        ++degree;
        y = mat_mul(ws, y, ledger) / k;
        k += 1.0;
        term_norm = one_norm(y);
    }
    x = squaring(std::move(x), s, ledger);

    EvalPlan plan;
    plan.scheme = Scheme::baseline;
    plan.m = degree;
    plan.s = s;
    plan.e1 = term_norm;
    plan.log2_e1 = term_norm > 0.0 ? std::log2(term_norm) : -INFINITY;
    plan.log2_e2 = -INFINITY;
    plan.terminated_early = s == 0;
    return {std::move(x), std::move(plan), ledger.count(), 0, seconds_since(start)};
}

ExpmResult expm(const Matrix& w, double eps, Scheme scheme, MulKernel kernel)
{
    const auto start = clock_type::now();
    MulLedger ledger(kernel);
    EvalPlan plan;
    switch (scheme) {
    case Scheme::ps:
        plan = select_ps(w, eps, ledger);
        break;
    case Scheme::sastre:
        plan = select_sastre(w, eps, ledger);
        break;
    default:
        throw InvalidArgument("expm: scheme must be ps or sastre");
    }
    Matrix x = squaring(evaluate_plan(plan, ledger), plan.s, ledger);
    return {std::move(x), std::move(plan), ledger.count(), 0, seconds_since(start)};
}

std::span<const int> lowrank_order_ladder()
{
    return lowrank_ladder;
}

ExpmResult expm_lowrank(const LowRankPair& pair, double eps, MulKernel kernel)
{
    require_tolerance(eps);
    const std::size_t n = pair.a1.rows();
    const std::size_t t = pair.a1.cols();
    if (pair.a2.rows() != t || pair.a2.cols() != n) {
        throw DimensionError("expm_lowrank: factors are " + std::to_string(n) + "x" +
                             std::to_string(t) + " and " + std::to_string(pair.a2.rows()) + "x" +
                             std::to_string(pair.a2.cols()));
    }
    if (t > n) {
        throw DimensionError("expm_lowrank: inner rank exceeds order");
    }
    const auto start = clock_type::now();
    MulLedger ledger(kernel);

    EvalPlan plan;
    plan.scheme = Scheme::lowrank;
    plan.powers.emplace(rect_mul(pair.a2, pair.a1, ledger).to_square());
    PowerCache& powers = *plan.powers;

    if (powers.norm(1) > 0.0) {
        bool found = false;
        for (int m : lowrank_ladder) {
            if (m >= 2) {
                powers.power(2, ledger);
            }
            const auto norms = powers.norms();
            const double e1 = power_norm_bound(norms, m + 1) / std::tgamma(m + 3.0);
            const double e2 = power_norm_bound(norms, m + 2) / std::tgamma(m + 4.0);
            const AlphaBound alpha = alpha_from_norms(norms, m, std::min(powers.highest(), 2));
            if (alpha.alpha >= m + 3 || e1 + e2 > eps) {
                continue;
            }
            if (remainder_bound_phi(alpha, m) > eps) {
                continue;
            }
            plan.m = m;
            plan.e1 = e1;
            plan.e2 = e2;
            plan.log2_e1 = std::log2(e1);
            plan.log2_e2 = std::log2(e2);
            found = true;
            break;
        }
        if (!found) {
            throw DomainError("expm_lowrank: ||V||_1 = " + format_double(powers.norm(1)) +
                              " admits no order <= 30 at tolerance " + format_double(eps));
        }
    }
    plan.terminated_early = true;

    const Matrix psi = ps_eval(phi1_coeffs(plan.m), powers, ledger);
    const RectMatrix left = rect_mul(pair.a1, RectMatrix(psi), ledger);
    Matrix x = add_identity(rect_mul(left, pair.a2, ledger).to_square());
    plan.selection_mults = 0;
    return {std::move(x), std::move(plan), ledger.count(), ledger.rect_count(),
            seconds_since(start)};
}

ExpmResult run_scheme(const Matrix& w, double eps, Scheme scheme, MulKernel kernel)
{
    if (scheme == Scheme::baseline) {
        return expm_baseline(w, eps, kernel);
    }
    return expm(w, eps, scheme, kernel);
}

} // namespace expm
