#include <cmath>
#include <string>

#include "expm/bench.hpp"

namespace expm {

namespace {

constexpr const char* kind_names[] = {
    "diag", "random_dense", "nonnormal_triangular", "nilpotent_perturbed", "rotation_block",
    "lowrank_pair",
};

Matrix rescale(const Matrix& w, double target, const GeneratorSpec& spec)
{
    const double norm = one_norm(w);
    if (norm == 0.0) {
        throw InvalidArgument(std::string("generator ") + std::string(to_string(spec.kind)) +
                              " produced a zero matrix for n=" + std::to_string(spec.n));
    }
    return (target / norm) * w;
}

Matrix draw_dense(std::size_t n, SplitMix64& rng)
{
    std::vector<double> v(n * n);
    for (double& x : v) {
        x = rng.uniform(-1.0, 1.0);
    }
    return Matrix(n, std::move(v));
}

RectMatrix draw_rect(std::size_t rows, std::size_t cols, SplitMix64& rng)
{
    std::vector<double> v(rows * cols);
    for (double& x : v) {
        x = rng.uniform(-1.0, 1.0);
    }
    return RectMatrix(rows, cols, std::move(v));
}

Matrix draw_triangular(std::size_t n, SplitMix64& rng)
{
    // Diagonal in [-1/2, 1/2], superdiagonal d scaled by 4/d: strongly
    // nonnormal while ||W^k|| still decays well below ||W||^k.
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = 0.5 * rng.uniform(-1.0, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            v[i * n + j] = rng.uniform(-1.0, 1.0) * 4.0 / static_cast<double>(j - i);
        }
    }
    return Matrix(n, std::move(v));
}

Matrix draw_nilpotent(std::size_t n, double noise, SplitMix64& rng)
{
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            v[i * n + j] = rng.uniform(-1.0, 1.0);
        }
    }
    if (noise > 0.0) {
        for (double& x : v) {
            x += noise * rng.uniform(-1.0, 1.0);
        }
    }
    return Matrix(n, std::move(v));
}

Matrix draw_rotation_blocks(std::size_t n, SplitMix64& rng)
{
    std::vector<double> v(n * n, 0.0);
    for (std::size_t b = 0; b + 1 < n; b += 2) {
        const double theta = rng.uniform(-1.0, 1.0);
        v[b * n + b + 1] = theta;
        v[(b + 1) * n + b] = -theta;
    }
    return Matrix(n, std::move(v));
}

void validate(const GeneratorSpec& spec)
{
    if (spec.n < 1) {
        throw InvalidArgument("generator: n must be >= 1");
    }
    if (!(spec.target_norm > 0.0) || !std::isfinite(spec.target_norm)) {
        throw InvalidArgument("generator: target_norm must be positive and finite");
    }
    if (spec.kind == GeneratorKind::rotation_block && spec.n < 2) {
        throw InvalidArgument("generator: rotation_block needs n >= 2");
    }
    if (spec.kind == GeneratorKind::nilpotent_perturbed && spec.n < 2 && spec.noise == 0.0) {
        throw InvalidArgument("generator: nilpotent_perturbed with n = 1 and no noise is zero");
    }
    if (spec.noise < 0.0) {
        throw InvalidArgument("generator: noise must be >= 0");
    }
    if (spec.kind == GeneratorKind::lowrank_pair && spec.effective_rank() > spec.n) {
        throw InvalidArgument("generator: rank exceeds n");
    }
}

} // namespace

std::uint64_t SplitMix64::next()
{
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::string_view to_string(GeneratorKind kind)
{
    return kind_names[static_cast<int>(kind)];
}

GeneratorKind parse_generator_kind(std::string_view name)
{
    for (int i = 0; i < 6; ++i) {
        if (name == kind_names[i]) {
            return static_cast<GeneratorKind>(i);
        }
    }
    throw InvalidArgument("unknown generator kind '" + std::string(name) + "'");
}

std::size_t GeneratorSpec::effective_rank() const
{
    if (rank > 0) {
        return rank;
    }
    return std::max<std::size_t>(1, n / 8);
}

Generated gen_matrix(const GeneratorSpec& spec)
{
    validate(spec);
    SplitMix64 rng(spec.seed);
    const std::size_t n = spec.n;
    switch (spec.kind) {
    case GeneratorKind::diag: {
        std::vector<double> d(n);
        for (double& x : d) {
            x = rng.uniform(-1.0, 1.0);
        }
        return rescale(Matrix::diagonal(d), spec.target_norm, spec);
    }
    case GeneratorKind::random_dense:
        return rescale(draw_dense(n, rng), spec.target_norm, spec);
    case GeneratorKind::nonnormal_triangular:
        return rescale(draw_triangular(n, rng), spec.target_norm, spec);
    case GeneratorKind::nilpotent_perturbed:
        return rescale(draw_nilpotent(n, spec.noise, rng), spec.target_norm, spec);
    case GeneratorKind::rotation_block:
        return rescale(draw_rotation_blocks(n, rng), spec.target_norm, spec);
    case GeneratorKind::lowrank_pair: {
        const std::size_t t = spec.effective_rank();
        RectMatrix a1 = draw_rect(n, t, rng);
        RectMatrix a2 = draw_rect(t, n, rng);
        MulLedger scratch;
        const double norm = one_norm(rect_mul(a2, a1, scratch));
        if (norm == 0.0) {
            throw InvalidArgument("generator lowrank_pair produced V = 0");
        }
        return LowRankPair{(spec.target_norm / norm) * a1, std::move(a2)};
    }
    }
    throw InvalidArgument("generator: unknown kind");
}

Matrix gen_dense(const GeneratorSpec& spec)
{
    Generated g = gen_matrix(spec);
    if (auto* pair = std::get_if<LowRankPair>(&g)) {
        MulLedger scratch;
        return pair->product(scratch);
    }
    return std::get<Matrix>(std::move(g));
}

} // namespace expm
