#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "expm/bench.hpp"

namespace expm {

namespace {

using MatrixKey = std::tuple<int, std::size_t, double, std::uint64_t>;

MatrixKey key_of(const GeneratorSpec& g)
{
    return {static_cast<int>(g.kind), g.n, g.target_norm, g.seed};
}

} // namespace

std::vector<double> default_profile_alphas()
{
    // 1 .. 1e4, four points per decade.
    std::vector<double> alphas;
    for (int i = 0; i <= 16; ++i) {
        alphas.push_back(std::pow(10.0, i / 4.0));
    }
    alphas.front() = 1.0;
    return alphas;
}

ProfileTable performance_profile(std::span<const BenchRecord> records,
                                 std::span<const double> alphas)
{
    ProfileTable table;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] >= 1.0) || (i > 0 && alphas[i] < alphas[i - 1])) {
            throw InvalidArgument("profile alphas must be ascending and >= 1");
        }
    }
    table.alphas.assign(alphas.begin(), alphas.end());

    for (const auto& r : records) {
        if (std::find(table.schemes.begin(), table.schemes.end(), r.scheme) ==
            table.schemes.end()) {
            table.schemes.push_back(r.scheme);
        }
    }
    table.fractions.assign(table.schemes.size(), std::vector<double>(alphas.size(), 0.0));

    // Per matrix, the error of each scheme in table order (NaN = missing).
    std::map<MatrixKey, std::vector<double>> errors;
    for (const auto& r : records) {
        auto [it, fresh] = errors.try_emplace(key_of(r.generator),
                                              table.schemes.size(), std::nan(""));
        (void)fresh;
        const auto col = static_cast<std::size_t>(
            std::find(table.schemes.begin(), table.schemes.end(), r.scheme) -
            table.schemes.begin());
        if (r.ok() && std::isfinite(r.rel_err)) {
            it->second[col] = r.rel_err;
        }
    }

    std::vector<std::vector<std::size_t>> hits(table.schemes.size(),
                                               std::vector<std::size_t>(alphas.size(), 0));
    for (const auto& [key, errs] : errors) {
        if (std::any_of(errs.begin(), errs.end(), [](double e) { return std::isnan(e); })) {
            ++table.excluded;
            continue;
        }
        ++table.matrices;
        const double best = *std::min_element(errs.begin(), errs.end());
        for (std::size_t sc = 0; sc < errs.size(); ++sc) {
            for (std::size_t a = 0; a < alphas.size(); ++a) {
                if (errs[sc] <= alphas[a] * best) {
                    ++hits[sc][a];
                }
            }
        }
    }
    if (table.matrices > 0) {
        for (std::size_t sc = 0; sc < hits.size(); ++sc) {
            for (std::size_t a = 0; a < alphas.size(); ++a) {
                table.fractions[sc][a] =
                    static_cast<double>(hits[sc][a]) / static_cast<double>(table.matrices);
            }
        }
    }
    return table;
}

} // namespace expm
