#include <doctest.h>

#include <cmath>

#include "expm/bench.hpp"
#include "expm/order_select.hpp"
#include "../oracles.hpp"

using namespace expm;

namespace {

Matrix diag_with_norm(std::size_t n, double norm)
{
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = norm * (i % 2 == 0 ? 1.0 : -0.5);
    }
    return Matrix::diagonal(d);
}

// Independent re-evaluation of the selector's scaling step from the two
// unscaled tail bounds.
int oracle_scaling(long double e1, long double e2, int m, double eps)
{
    int s = 0;
    for (auto [e, i] : {std::pair{e1, 1}, std::pair{e2, 2}}) {
        const long double raw = std::ceil(std::log2(e / eps) / (m + i));
        s = std::max(s, static_cast<int>(raw));
    }
    return std::min(s, 20);
}

std::vector<Matrix> mixed_matrices(std::size_t count, std::uint64_t seed)
{
    const GeneratorKind kinds[] = {GeneratorKind::diag, GeneratorKind::random_dense,
                                   GeneratorKind::nonnormal_triangular,
                                   GeneratorKind::nilpotent_perturbed,
                                   GeneratorKind::rotation_block};
    SplitMix64 rng(seed);
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < count; ++i) {
        GeneratorSpec spec;
        spec.kind = kinds[i % 5];
        spec.n = 2 + rng.next() % 15;
        spec.target_norm = std::exp(rng.uniform(std::log(1e-5), std::log(50.0)));
        spec.seed = rng.next();
        out.push_back(gen_dense(spec));
    }
    return out;
}

} // namespace

TEST_CASE("selection tables")
{
    const auto& ps = SelectionTables::paterson_stockmeyer();
    CHECK(ps.orders == std::vector<int>{1, 2, 4, 6, 9, 12, 16});
    CHECK(ps.block_powers == std::vector<int>{1, 2, 2, 3, 3, 4, 4});
    CHECK(ps.block_counts == std::vector<int>{1, 1, 2, 2, 3, 3, 4});
    const int ps_idx[] = {2, 3, 3, 4, 5, 6, 7, 8, 10, 11, 13, 14, 17, 18};
    for (std::size_t i = 0; i < 14; ++i) {
        CHECK(ps.tail[i] == doctest::Approx(1.0 / static_cast<double>(oracle::factorial(ps_idx[i]))));
    }

    const auto& sa = SelectionTables::sastre();
    CHECK(sa.orders == std::vector<int>{1, 2, 4, 8, 15});
    CHECK(sa.block_powers == std::vector<int>{1, 2, 2, 2, 2});
    CHECK(sa.block_counts == std::vector<int>{1, 1, 2, 4, 8});
    // Perturbed leading tail coefficient of the 15+ formula, about 0.454/16!.
    CHECK(sa.tail[8] * static_cast<double>(oracle::factorial(16)) == doctest::Approx(0.454).epsilon(2e-3));
}

TEST_CASE("zero matrix selects the identity")
{
    for (auto plan : {select_ps(Matrix(3), 1e-8), select_sastre(Matrix(3), 1e-8)}) {
        CHECK(plan.m == 0);
        CHECK(plan.s == 0);
        CHECK(plan.terminated_early);
    }
}

TEST_CASE("Paterson-Stockmeyer selector worked examples")
{
    const EvalPlan unit = select_ps(diag_with_norm(4, 1.0), 1e-8);
    CHECK(unit.m == 12);
    CHECK(unit.s == 0);
    CHECK(unit.e1 == doctest::Approx(1.0 / 6227020800.0));      // 1/13!
    CHECK(unit.e2 == doctest::Approx(1.0 / 87178291200.0));     // 1/14!
    CHECK(unit.terminated_early);

    // Diagonal: every ||W^k||_1 = ||W||^k, so E1 = x^17/17!, E2 = x^18/18!.
    const double x = 12.57;
    const EvalPlan big = select_ps(diag_with_norm(4, x), 1e-8);
    CHECK(big.m == 16);
    const long double e1 = std::pow(static_cast<long double>(x), 17) / oracle::factorial(17);
    const long double e2 = std::pow(static_cast<long double>(x), 18) / oracle::factorial(18);
    CHECK(big.e1 == doctest::Approx(static_cast<double>(e1)).epsilon(1e-12));
    CHECK(big.s == oracle_scaling(e1, e2, 16, 1e-8));
    CHECK(big.s >= 1);
    CHECK_FALSE(big.terminated_early);
}

TEST_CASE("Sastre selector worked examples")
{
    const EvalPlan tiny = select_sastre(diag_with_norm(3, 1e-5), 1e-8);
    CHECK(tiny.m == 1);
    CHECK(tiny.s == 0);
    CHECK(tiny.e1 == doctest::Approx(5e-11));

    const EvalPlan unit = select_sastre(diag_with_norm(3, 1.0), 1e-8);
    CHECK(unit.m == 15);
    CHECK(unit.s == 0);
    CHECK(unit.e1 == doctest::Approx(2.17e-14).epsilon(2e-3));
    CHECK(unit.e2 == doctest::Approx(1.0 / static_cast<double>(oracle::factorial(17))));

    const double x = 12.57;
    const EvalPlan big = select_sastre(diag_with_norm(4, x), 1e-8);
    CHECK(big.m == 15);
    const long double c16 =
        std::fabs(1.0L / oracle::factorial(16) - static_cast<long double>(default_coeffs().b16));
    const long double x2 = static_cast<long double>(x) * x;
    const long double e1 = c16 * std::pow(x2, 8);
    const long double e2 = std::pow(x2, 8) * x / oracle::factorial(17);
    CHECK(big.s == oracle_scaling(e1, e2, 15, 1e-8));
    CHECK(big.s == 3);
}

TEST_CASE("selection spends only the products evaluation reuses")
{
    for (double x : {1e-3, 0.3, 2.0, 40.0}) {
        MulLedger ledger;
        const EvalPlan ps = select_ps(diag_with_norm(5, x), 1e-8, ledger);
        CHECK(ps.selection_mults == ledger.count());
        CHECK(ps.selection_mults <= static_cast<std::uint64_t>(polynomial_budget(Scheme::ps, ps.m)));
        MulLedger l2;
        const EvalPlan sa = select_sastre(diag_with_norm(5, x), 1e-8, l2);
        CHECK(sa.selection_mults <= 1);
    }
}

TEST_CASE("tolerance floor")
{
    CHECK_THROWS_AS(select_ps(Matrix(2), 1e-17), InvalidArgument);
    CHECK_THROWS_AS(select_sastre(Matrix(2), std::nan("")), InvalidArgument);
    CHECK_NOTHROW(select_sastre(Matrix(2), unit_roundoff));
}

TEST_CASE("multiplication budgets")
{
    CHECK(polynomial_budget(Scheme::sastre, 8) == 3);
    CHECK(polynomial_budget(Scheme::sastre, 15) == 4);
    CHECK(polynomial_budget(Scheme::ps, 16) == 6);
    CHECK(polynomial_budget(Scheme::ps, 1) == 0);
    CHECK_THROWS_AS(polynomial_budget(Scheme::sastre, 9), InvalidArgument);
}

TEST_CASE("remainder bounds")
{
    CHECK(remainder_bound_exp({1, 0.0}, 5) == 0.0);
    CHECK(remainder_bound_exp({1, 1.0}, 15) == doctest::Approx(5.078e-14).epsilon(1e-3));
    CHECK_THROWS_AS(remainder_bound_exp({1, 17.0}, 15), DomainError);
    CHECK(remainder_bound_phi({1, 0.0}, 8) == 0.0);
    CHECK(remainder_bound_phi({1, 1.0}, 8) == doctest::Approx(3.031e-7).epsilon(1e-3));
    CHECK_THROWS_AS(remainder_bound_phi({1, 11.0}, 8), DomainError);

    for (int m : {1, 4, 8, 15}) {
        double prev = 0.0;
        for (double a = 0.05; a < m + 2; a += 0.25) {
            const double b = remainder_bound_exp({1, a}, m);
            CHECK(b > prev);
            CHECK(static_cast<long double>(b) ==
                  doctest::Approx(static_cast<double>(oracle::tail_bound(a, m, 0))).epsilon(1e-12));
            prev = b;
            if (a < m + 1) {
                CHECK(remainder_bound_exp({1, a}, m + 1) < b);
            }
        }
    }
}

TEST_CASE("alpha from cached norms")
{
    SUBCASE("diagonal with unit norm")
    {
        const std::vector<double> norms = {1.0, 1.0};
        for (int p : {1, 2}) {
            CHECK(alpha_from_norms(norms, 8, p).alpha == doctest::Approx(1.0));
        }
    }
    SUBCASE("nilpotent shift")
    {
        const Matrix n = Matrix::from_rows(
            {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}});
        MulLedger ledger;
        PowerCache cache(n);
        cache.power(2, ledger);
        const auto norms = cache.norms();
        CHECK(norms[1] == 1.0); // ||N^2|| = 1 = ||N||^2: no sharpening
        CHECK(alpha_from_norms(norms, 4, 2).alpha <= one_norm(n));

        const Matrix j = Matrix::from_rows({{0, 1}, {0, 0}});
        PowerCache jc(j);
        jc.power(2, ledger);
        // ||J^2|| = 0 makes every even a_k vanish; odd ones keep ||J|| once.
        const AlphaBound a = alpha_from_norms(jc.norms(), 4, 2);
        CHECK(a.alpha < one_norm(j));
    }
    SUBCASE("p = 1 includes a_1")
    {
        const std::vector<double> norms = {3.0, 1.0};
        CHECK(alpha_from_norms(norms, 2, 1).alpha == doctest::Approx(3.0));
    }
    SUBCASE("a_k is the cheapest product")
    {
        const std::vector<double> norms = {2.0, 0.5};
        // a_17 = ||W^2||^8 ||W||.
        CHECK(power_norm_bound(norms, 17) == doctest::Approx(std::pow(0.5, 8) * 2.0));
    }
    CHECK_THROWS_AS(alpha_from_norms(std::vector<double>{1.0}, 3, 0), InvalidArgument);
    CHECK_THROWS_AS(alpha_from_norms(std::vector<double>{}, 3, 1), InvalidArgument);
}

TEST_CASE("property: alpha never exceeds the true norm roots it bounds")
{
    for (const Matrix& w : mixed_matrices(60, 11)) {
        const EvalPlan plan = select_ps(w, 1e-8);
        if (plan.m < 2) {
            continue;
        }
        const auto exact = oracle::power_norms(w, plan.m + 4);
        const AlphaBound a = alpha_from_cache(plan, plan.m, 2);
        CHECK(a.alpha >= oracle::alpha_exact(exact, plan.m, 2) * (1 - 1e-12));
        CHECK(a.alpha <= one_norm(w) * (1 + 1e-12));
    }
}

TEST_CASE("property: cap, early exit, monotone cost, norm halving")
{
    for (const Matrix& w : mixed_matrices(120, 7)) {
        for (auto select : {+[](const Matrix& a, double e) { return select_ps(a, e); },
                            +[](const Matrix& a, double e) { return select_sastre(a, e); }}) {
            int prev = 1 << 30;
            for (double eps : {1e-12, 1e-8, 1e-4}) {
                const EvalPlan plan = select(w, eps);
                CHECK(plan.s <= max_scaling);
                if (plan.terminated_early) {
                    CHECK(plan.s == 0);
                }
                CHECK(total_mults(plan) <= prev);
                prev = total_mults(plan);
            }
            CHECK(select(w / 2.0, 1e-8).s <= select(w, 1e-8).s);
        }
    }
    CHECK(select_sastre(diag_with_norm(2, 1e12), 1e-8).s == max_scaling);
}

TEST_CASE("property: alpha-based full-tail bound dominates the realized Taylor remainder")
{
    // Rigorous counterpart of the two-term estimate: the full-tail bound from
    // alpha_p, evaluated on the scaled matrix, must cover the exact tail.
    for (const Matrix& w : mixed_matrices(80, 3)) {
        const EvalPlan plan = select_ps(w, 1e-8);
        if (plan.m < 2) {
            continue;
        }
        const Matrix ws = scale_pow2(w, plan.s);
        const auto norms = oracle::power_norms(ws, 2);
        const AlphaBound a = alpha_from_norms(norms, plan.m, 2);
        if (a.alpha >= plan.m + 2) {
            continue;
        }
        const long double realized = oracle::exp_tail_norm(ws, plan.m);
        CHECK(realized <= remainder_bound_exp(a, plan.m) * (1 + 1e-10));
    }
}
