#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "expm/engine.hpp"
#include "expm/matrix.hpp"
#include "expm/order_select.hpp"

namespace expm {

/// SplitMix64 (Steele, Lea, Flood 2014). Every random draw in the harness
/// comes from this generator, so a seed pins a matrix on any platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // An independent child stream.
    SplitMix64 split() { return SplitMix64(next()); }

private:
    std::uint64_t state_;
};

enum class GeneratorKind {
    diag,
    random_dense,
    nonnormal_triangular,
    nilpotent_perturbed,
    rotation_block,
    lowrank_pair,
};

std::string_view to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(std::string_view name);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::random_dense;
    std::size_t n = 1;
    double target_norm = 1.0; // 1-norm of W (of V = A2 A1 for lowrank_pair)
    std::uint64_t seed = 0;
    std::size_t rank = 0;     // lowrank_pair inner dimension; 0 picks max(1, n/8)
    double noise = 1e-6;      // nilpotent_perturbed dense noise, relative

    std::size_t effective_rank() const;
};

using Generated = std::variant<Matrix, LowRankPair>;

/// Deterministic in the spec; the result is rescaled to the target 1-norm.
Generated gen_matrix(const GeneratorSpec& spec);

// The dense W of any kind (A1 * A2 for lowrank_pair).
Matrix gen_dense(const GeneratorSpec& spec);

struct NormRange {
    double min = 1.0;
    double max = 1.0;
    std::size_t count = 1;
    bool log_scale = true;
};

struct SuiteConfig {
    double eps = 1e-8;
    std::vector<std::size_t> sizes;
    NormRange norms;
    std::vector<GeneratorKind> kinds;
    std::uint64_t base_seed = 0;
    std::vector<Scheme> schemes;
    std::size_t rank = 0;
    double noise = 1e-6;
    MulKernel kernel = MulKernel::naive;
};

/// { eps, sizes[], norms{min,max,count,scale}, kinds[], seeds{base}, schemes[] }
SuiteConfig parse_suite_config(std::string_view json_text);
SuiteConfig load_suite_config(const std::string& path);

/// One matrix per (size, kind, norm index), in that nesting order.
std::vector<GeneratorSpec> expand_suite(const SuiteConfig& config);

struct BenchRecord {
    GeneratorSpec generator;
    Scheme scheme = Scheme::ps;
    int m = 0;
    int s = 0;
    std::uint64_t square_mults = 0;
    double rel_err = 0.0;
    double wall_time = 0.0;
    std::string error; // empty when the driver succeeded

    bool ok() const { return error.empty(); }
};

/// Runs every scheme on every generated matrix against expm_reference.
/// Driver failures become error rows. Output order is task order for any
/// degree of parallelism.
std::vector<BenchRecord> run_suite(const SuiteConfig& config, unsigned parallel = 1);

struct ProfileTable {
    std::vector<double> alphas;
    std::vector<Scheme> schemes;
    std::vector<std::vector<double>> fractions; // [scheme][alpha]
    std::size_t matrices = 0;                   // matrices that entered the profile
    std::size_t excluded = 0;                   // matrices missing a scheme row
};

ProfileTable performance_profile(std::span<const BenchRecord> records,
                                 std::span<const double> alphas);

std::vector<double> default_profile_alphas();

// CSV columns: generator_kind,n,target_norm,seed,scheme,m,s,square_mults,rel_err,wall_time_s
void write_records_csv(std::ostream& out, std::span<const BenchRecord> records);
std::vector<BenchRecord> read_records_csv(std::istream& in);
std::vector<BenchRecord> load_records_csv(const std::string& path);

std::string summary_json(std::span<const BenchRecord> records, const ProfileTable& profile);
std::string profile_json(const ProfileTable& profile);

void emit_reports(std::span<const BenchRecord> records, const ProfileTable& profile,
                  const std::string& csv_path, const std::string& summary_path);

} // namespace expm
