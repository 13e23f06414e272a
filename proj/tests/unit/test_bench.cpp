#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "expm/bench.hpp"

using namespace expm;

namespace {

std::string suite_json(const std::string& kinds, const std::string& schemes, int count,
                       const std::string& sizes = "[6]")
{
    return R"({"eps": 1e-8, "sizes": )" + sizes + R"(, "norms": {"min": 1e-4, "max": 12.8, "count": )" +
           std::to_string(count) + R"(, "scale": "log"}, "kinds": )" + kinds +
           R"(, "seeds": {"base": 77}, "schemes": )" + schemes + "}";
}

BenchRecord row(std::uint64_t seed, Scheme scheme, double err)
{
    BenchRecord r;
    r.generator.seed = seed;
    r.scheme = scheme;
    r.rel_err = err;
    return r;
}

} // namespace

TEST_CASE("SplitMix64 reference stream")
{
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
    SplitMix64 u(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("generators are deterministic and hit the target norm")
{
    for (int k = 0; k < 5; ++k) {
        GeneratorSpec spec{static_cast<GeneratorKind>(k), 9, 3.7, 1234};
        const Matrix a = gen_dense(spec);
        CHECK(a == gen_dense(spec));
        CHECK(std::abs(one_norm(a) - 3.7) <= 1e-12 * 3.7);
        spec.seed = 1235;
        CHECK_FALSE(a == gen_dense(spec));
    }
    GeneratorSpec d{GeneratorKind::diag, 4, 12.57, 1};
    CHECK(std::abs(one_norm(gen_dense(d)) - 12.57) <= 1e-12 * 12.57);
}

TEST_CASE("generator structure")
{
    GeneratorSpec nil{GeneratorKind::nilpotent_perturbed, 5, 2.0, 9};
    nil.noise = 0.0;
    Matrix p = gen_dense(nil);
    MulLedger ledger;
    const Matrix base = p;
    for (int i = 1; i < 5; ++i) {
        p = mat_mul(p, base, ledger);
    }
    CHECK(p.is_zero());

    const Matrix tri = gen_dense({GeneratorKind::nonnormal_triangular, 6, 1.0, 2});
    for (std::size_t i = 1; i < 6; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            CHECK(tri(i, j) == 0.0);
        }
    }

    const Matrix rot = gen_dense({GeneratorKind::rotation_block, 5, 1.0, 3});
    for (std::size_t b = 0; b + 1 < 5; b += 2) {
        CHECK(rot(b, b + 1) == -rot(b + 1, b));
    }
    CHECK(rot(4, 4) == 0.0);

    GeneratorSpec lr{GeneratorKind::lowrank_pair, 16, 2.5, 4};
    lr.rank = 3;
    const auto pair = std::get<LowRankPair>(gen_matrix(lr));
    CHECK(pair.rank() == 3);
    CHECK(std::abs(one_norm(rect_mul(pair.a2, pair.a1, ledger)) - 2.5) <= 1e-12 * 2.5);

    CHECK_THROWS_AS(gen_dense({GeneratorKind::diag, 0, 1.0, 1}), InvalidArgument);
    CHECK_THROWS_AS(gen_dense({GeneratorKind::diag, 3, -1.0, 1}), InvalidArgument);
    CHECK_THROWS_AS(parse_generator_kind("gaussian"), InvalidArgument);
}

TEST_CASE("suite config parsing")
{
    const SuiteConfig c = parse_suite_config(suite_json(R"(["diag", "random_dense"])",
                                                        R"(["baseline", "ps", "sastre"])", 4,
                                                        "[4, 8]"));
    CHECK(c.eps == 1e-8);
    CHECK(c.sizes == std::vector<std::size_t>{4, 8});
    CHECK(c.kinds.size() == 2);
    CHECK(c.schemes.size() == 3);
    CHECK(c.base_seed == 77);
    CHECK(expand_suite(c).size() == 16);

    CHECK_THROWS_AS(parse_suite_config("{"), ParseError);
    CHECK_THROWS_AS(parse_suite_config(R"({"eps": 1e-8})"), ParseError);
    CHECK_THROWS_AS(parse_suite_config(suite_json(R"(["bogus"])", R"(["ps"])", 2)), ParseError);
    CHECK_THROWS_AS(parse_suite_config(suite_json(R"(["diag"])", R"(["lowrank"])", 2)), ParseError);
    auto tiny = nlohmann::json::parse(suite_json(R"(["diag"])", R"(["ps"])", 2));
    tiny["eps"] = 1e-20;
    CHECK_THROWS_AS(parse_suite_config(tiny.dump()), ParseError);
    CHECK_THROWS_AS(load_suite_config("/nonexistent.json"), IoError);
}

TEST_CASE("suite expansion is deterministic and spans the norm range")
{
    const SuiteConfig c = parse_suite_config(
        suite_json(R"(["diag", "rotation_block"])", R"(["ps"])", 50, "[4, 6]"));
    const auto a = expand_suite(c);
    const auto b = expand_suite(c);
    REQUIRE(a.size() == 200);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].seed == b[i].seed);
        CHECK(a[i].target_norm == b[i].target_norm);
        CHECK(a[i].target_norm >= 1e-4);
        CHECK(a[i].target_norm <= 12.8);
    }
    CHECK(a[0].n == 4);
    CHECK(a[0].kind == GeneratorKind::diag);
    CHECK(a[50].kind == GeneratorKind::rotation_block);
    CHECK(a[100].n == 6);
}

TEST_CASE("run_suite")
{
    SUBCASE("no matrices")
    {
        const auto c = parse_suite_config(suite_json(R"(["diag"])", R"(["ps"])", 0));
        CHECK(run_suite(c).empty());
    }
    SUBCASE("ten diagonal matrices")
    {
        const auto c = parse_suite_config(
            suite_json(R"(["diag"])", R"(["baseline", "ps", "sastre"])", 10));
        const auto records = run_suite(c);
        REQUIRE(records.size() == 30);
        for (const auto& r : records) {
            CHECK(r.ok());
            CHECK(r.rel_err <= 1e-7);
            CHECK(r.square_mults ==
                  static_cast<std::uint64_t>(polynomial_budget(r.scheme, r.m) + r.s));
        }
    }
    SUBCASE("parallel run matches serial order and values")
    {
        const auto c = parse_suite_config(suite_json(
            R"(["random_dense", "nonnormal_triangular"])", R"(["ps", "sastre"])", 6, "[5, 9]"));
        const auto serial = run_suite(c, 1);
        const auto parallel = run_suite(c, 4);
        REQUIRE(serial.size() == parallel.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            CHECK(serial[i].generator.seed == parallel[i].generator.seed);
            CHECK(serial[i].scheme == parallel[i].scheme);
            CHECK(serial[i].rel_err == parallel[i].rel_err);
            CHECK(serial[i].square_mults == parallel[i].square_mults);
        }
    }
    SUBCASE("driver failures become rows")
    {
        auto j = nlohmann::json::parse(suite_json(R"(["lowrank_pair"])", R"(["lowrank"])", 2, "[16]"));
        j["norms"]["min"] = 400.0;
        j["norms"]["max"] = 500.0;
        const auto records = run_suite(parse_suite_config(j.dump()));
        REQUIRE(records.size() == 2);
        for (const auto& r : records) {
            CHECK_FALSE(r.ok());
            CHECK(std::isnan(r.rel_err));
        }
    }
}

TEST_CASE("performance profile")
{
    const double alphas[] = {1.0, 2.0, 10.0};
    SUBCASE("unique winner")
    {
        const std::vector<BenchRecord> recs = {row(1, Scheme::ps, 4e-9), row(1, Scheme::sastre, 1e-9)};
        const auto t = performance_profile(recs, alphas);
        CHECK(t.schemes == std::vector<Scheme>{Scheme::ps, Scheme::sastre});
        CHECK(t.fractions[1][0] == 1.0);
        CHECK(t.fractions[0][0] == 0.0);
        CHECK(t.fractions[0][1] == 0.0);
        CHECK(t.fractions[0][2] == 1.0);
    }
    SUBCASE("ties count for everyone")
    {
        const std::vector<BenchRecord> recs = {row(1, Scheme::ps, 1e-9), row(1, Scheme::sastre, 1e-9),
                                               row(2, Scheme::ps, 0.0), row(2, Scheme::sastre, 0.0)};
        const auto t = performance_profile(recs, alphas);
        CHECK(t.fractions[0][0] == 1.0);
        CHECK(t.fractions[1][0] == 1.0);
    }
    SUBCASE("missing rows exclude the matrix")
    {
        const std::vector<BenchRecord> recs = {row(1, Scheme::ps, 1e-9), row(1, Scheme::sastre, 2e-9),
                                               row(2, Scheme::ps, 1e-9)};
        const auto t = performance_profile(recs, alphas);
        CHECK(t.matrices == 1);
        CHECK(t.excluded == 1);
    }
    SUBCASE("monotone in alpha, reaching one")
    {
        std::vector<BenchRecord> recs;
        SplitMix64 rng(8);
        for (std::uint64_t m = 0; m < 40; ++m) {
            for (Scheme s : {Scheme::baseline, Scheme::ps, Scheme::sastre}) {
                recs.push_back(row(m, s, std::exp(rng.uniform(-25.0, -15.0))));
            }
        }
        std::vector<double> grid = default_profile_alphas();
        grid.push_back(1e30);
        const auto t = performance_profile(recs, grid);
        for (const auto& f : t.fractions) {
            for (std::size_t i = 1; i < f.size(); ++i) {
                CHECK(f[i] >= f[i - 1]);
            }
            CHECK(f.back() == 1.0);
        }
    }
    const double bad[] = {2.0, 1.0};
    CHECK_THROWS_AS(performance_profile({}, bad), InvalidArgument);
    const double below[] = {0.5};
    CHECK_THROWS_AS(performance_profile({}, below), InvalidArgument);
}

TEST_CASE("reports")
{
    const auto c = parse_suite_config(
        suite_json(R"(["random_dense", "diag"])", R"(["baseline", "ps", "sastre"])", 5, "[4, 7]"));
    const auto records = run_suite(c);
    const auto profile = performance_profile(records, default_profile_alphas());

    std::stringstream csv;
    write_records_csv(csv, records);
    const auto back = read_records_csv(csv);
    REQUIRE(back.size() == records.size());
    std::uint64_t mults = 0;
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].generator.kind == records[i].generator.kind);
        CHECK(back[i].generator.n == records[i].generator.n);
        CHECK(back[i].generator.target_norm == records[i].generator.target_norm);
        CHECK(back[i].generator.seed == records[i].generator.seed);
        CHECK(back[i].scheme == records[i].scheme);
        CHECK(back[i].m == records[i].m);
        CHECK(back[i].s == records[i].s);
        CHECK(back[i].square_mults == records[i].square_mults);
        CHECK(back[i].rel_err == records[i].rel_err);
        CHECK(back[i].wall_time == records[i].wall_time);
        mults += back[i].square_mults;
    }

    const auto summary = nlohmann::json::parse(summary_json(records, profile));
    CHECK(summary["totals"]["records"] == records.size());
    CHECK(summary["totals"]["total_mults"].get<std::uint64_t>() == mults);
    std::uint64_t per_scheme = 0;
    for (auto& [name, s] : summary["schemes"].items()) {
        per_scheme += s["total_mults"].get<std::uint64_t>();
        CHECK(s["m_quantiles"]["p25"] <= s["m_quantiles"]["p50"]);
        CHECK(s["m_quantiles"]["p75"] <= s["m_quantiles"]["max"]);
    }
    CHECK(per_scheme == mults);
    CHECK(summary["profile"]["matrices"] == 20);

    std::stringstream empty;
    write_records_csv(empty, {});
    CHECK(empty.str() ==
          "generator_kind,n,target_norm,seed,scheme,m,s,square_mults,rel_err,wall_time_s\n");
    const auto zero = nlohmann::json::parse(summary_json({}, performance_profile({}, profile.alphas)));
    CHECK(zero["totals"]["records"] == 0);
    CHECK(zero["totals"]["total_mults"] == 0);
    CHECK(zero["schemes"].empty());

    std::istringstream bad("nope\n");
    CHECK_THROWS_AS(read_records_csv(bad), ParseError);
}
