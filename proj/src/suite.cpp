#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "expm/bench.hpp"
#include "expm/reference.hpp"

namespace expm {

namespace {

using json = nlohmann::json;

template <class T>
T require_field(const json& j, const char* key)
{
    if (!j.contains(key)) {
        throw ParseError(std::string("suite config: missing '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("suite config: bad '") + key + "': " + e.what());
    }
}

BenchRecord failed_record(const GeneratorSpec& spec, Scheme scheme, std::string why)
{
    BenchRecord r;
    r.generator = spec;
    r.scheme = scheme;
    r.rel_err = std::nan("");
    r.error = std::move(why);
    return r;
}

std::vector<BenchRecord> run_task(const GeneratorSpec& spec, const SuiteConfig& config)
{
    std::vector<BenchRecord> rows;
    std::optional<Generated> generated;
    std::optional<Matrix> dense;
    std::optional<Matrix> reference;
    try {
        generated = gen_matrix(spec);
        if (auto* pair = std::get_if<LowRankPair>(&*generated)) {
            MulLedger scratch;
            dense = pair->product(scratch);
        } else {
            dense = std::get<Matrix>(*generated);
        }
        reference = expm_reference(*dense);
    } catch (const Error& e) {
        for (Scheme scheme : config.schemes) {
            rows.push_back(failed_record(spec, scheme, e.what()));
        }
        return rows;
    }

    for (Scheme scheme : config.schemes) {
        try {
            ExpmResult result = scheme == Scheme::lowrank
                                    ? expm_lowrank(std::get<LowRankPair>(*generated), config.eps,
                                                   config.kernel)
                                    : run_scheme(*dense, config.eps, scheme, config.kernel);
            BenchRecord r;
            r.generator = spec;
            r.scheme = scheme;
            r.m = result.plan.m;
            r.s = result.plan.s;
            r.square_mults = result.mults;
            r.rel_err = relative_error(result.value, *reference).rel_err;
            r.wall_time = result.wall_time;
            rows.push_back(std::move(r));
        } catch (const Error& e) {
            rows.push_back(failed_record(spec, scheme, e.what()));
        }
    }
    return rows;
}

} // namespace

SuiteConfig parse_suite_config(std::string_view json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("suite config: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParseError("suite config: top level must be an object");
    }

    SuiteConfig c;
    try {
        c.eps = require_field<double>(j, "eps");
        require_tolerance(c.eps);
        c.sizes = require_field<std::vector<std::size_t>>(j, "sizes");

        const json norms = require_field<json>(j, "norms");
        c.norms.min = require_field<double>(norms, "min");
        c.norms.max = require_field<double>(norms, "max");
        c.norms.count = require_field<std::size_t>(norms, "count");
        const std::string scale = norms.value("scale", std::string("log"));
        if (scale != "log" && scale != "linear") {
            throw ParseError("suite config: norms.scale must be 'log' or 'linear'");
        }
        c.norms.log_scale = scale == "log";

        for (const auto& k : require_field<std::vector<std::string>>(j, "kinds")) {
            c.kinds.push_back(parse_generator_kind(k));
        }
        c.base_seed = require_field<std::uint64_t>(require_field<json>(j, "seeds"), "base");
        for (const auto& s : require_field<std::vector<std::string>>(j, "schemes")) {
            c.schemes.push_back(parse_scheme(s));
        }
        c.rank = j.value("rank", std::size_t{0});
        c.noise = j.value("noise", 1e-6);
        const std::string kernel = j.value("kernel", std::string("naive"));
        if (kernel == "blocked") {
            c.kernel = MulKernel::blocked;
        } else if (kernel != "naive") {
            throw ParseError("suite config: kernel must be 'naive' or 'blocked'");
        }
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("suite config: ") + e.what());
    } catch (const json::exception& e) {
        throw ParseError(std::string("suite config: ") + e.what());
    }

    if (!(c.norms.min > 0.0) || !(c.norms.max >= c.norms.min)) {
        throw ParseError("suite config: need 0 < norms.min <= norms.max");
    }
    if (std::any_of(c.sizes.begin(), c.sizes.end(), [](std::size_t n) { return n == 0; })) {
        throw ParseError("suite config: sizes must be positive");
    }
    if (c.schemes.empty()) {
        throw ParseError("suite config: no schemes");
    }
    const bool wants_lowrank =
        std::find(c.schemes.begin(), c.schemes.end(), Scheme::lowrank) != c.schemes.end();
    const bool all_pairs = std::all_of(c.kinds.begin(), c.kinds.end(), [](GeneratorKind k) {
        return k == GeneratorKind::lowrank_pair;
    });
    if (wants_lowrank && !all_pairs) {
        throw ParseError("suite config: scheme 'lowrank' requires every kind to be lowrank_pair");
    }
    return c;
}

SuiteConfig load_suite_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_suite_config(text.str());
}

std::vector<GeneratorSpec> expand_suite(const SuiteConfig& config)
{
    SplitMix64 seeds(config.base_seed);
    SplitMix64 norms(SplitMix64(config.base_seed ^ 0x6e6f726d73ULL).next());
    const double lo = config.norms.log_scale ? std::log(config.norms.min) : config.norms.min;
    const double hi = config.norms.log_scale ? std::log(config.norms.max) : config.norms.max;

    std::vector<GeneratorSpec> specs;
    for (std::size_t n : config.sizes) {
        for (GeneratorKind kind : config.kinds) {
            for (std::size_t i = 0; i < config.norms.count; ++i) {
                GeneratorSpec spec;
                spec.kind = kind;
                spec.n = n;
                const double u = norms.uniform(lo, hi);
                spec.target_norm = config.norms.log_scale ? std::exp(u) : u;
                spec.seed = seeds.next();
                spec.rank = config.rank;
                spec.noise = config.noise;
                specs.push_back(spec);
            }
        }
    }
    return specs;
}

std::vector<BenchRecord> run_suite(const SuiteConfig& config, unsigned parallel)
{
    const std::vector<GeneratorSpec> specs = expand_suite(config);
    std::vector<std::vector<BenchRecord>> per_task(specs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) {
            per_task[i] = run_task(specs[i], config);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(parallel, specs.size()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    std::vector<BenchRecord> out;
    for (auto& rows : per_task) {
        std::move(rows.begin(), rows.end(), std::back_inserter(out));
    }
    return out;
}

} // namespace expm
