// expm: command line front end.
//
//   expm single  --in <matrix-file> --eps <real> --scheme {baseline|ps|sastre} [--out <file>] [--stats]
//   expm bench   --suite <json> --csv <path> --summary <path> [--parallel <k>]
//   expm profile --csv <path> --alphas <comma list> --out <json>
//
// Exit status: 0 success, 2 invalid config or input, 3 numerical failure
// (for bench: at least one row failed).

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "expm/bench.hpp"
#include "expm/engine.hpp"

namespace {

constexpr int exit_input = 2;
constexpr int exit_numerical = 3;

std::vector<double> parse_alphas(const std::string& list)
{
    std::vector<double> alphas;
    std::istringstream in(list);
    std::string token;
    while (std::getline(in, token, ',')) {
        alphas.push_back(expm::parse_double(token));
    }
    if (alphas.empty()) {
        throw expm::ParseError("empty alpha list");
    }
    return alphas;
}

int run_single(const std::string& in_path, double eps, const std::string& scheme_name,
               const std::string& out_path, bool stats)
{
    const expm::Scheme scheme = expm::parse_scheme(scheme_name);
    if (scheme == expm::Scheme::lowrank) {
        throw expm::InvalidArgument("single: scheme must be baseline, ps or sastre");
    }
    const expm::Matrix w = expm::load_matrix(in_path);
    const expm::ExpmResult r = expm::run_scheme(w, eps, scheme);

    std::cout << "m " << r.plan.m << "\ns " << r.plan.s << "\nmults " << r.mults << '\n';
    if (stats) {
        std::cout << "one_norm " << expm::format_double(expm::one_norm(w)) << '\n'
                  << "e1 " << expm::format_double(r.plan.e1) << '\n'
                  << "e2 " << expm::format_double(r.plan.e2) << '\n'
                  << "wall_time_s " << expm::format_double(r.wall_time) << '\n';
    }
    if (out_path.empty()) {
        if (stats) {
            expm::write_matrix(std::cout, r.value);
        }
    } else {
        expm::save_matrix(out_path, r.value);
    }
    return 0;
}

int run_bench(const std::string& suite_path, const std::string& csv_path,
              const std::string& summary_path, unsigned parallel)
{
    const expm::SuiteConfig config = expm::load_suite_config(suite_path);
    const auto records = expm::run_suite(config, parallel);
    const auto alphas = expm::default_profile_alphas();
    const auto profile = expm::performance_profile(records, alphas);
    expm::emit_reports(records, profile, csv_path, summary_path);

    const auto failed = std::count_if(records.begin(), records.end(),
                                      [](const expm::BenchRecord& r) { return !r.ok(); });
    std::cerr << records.size() << " records, " << failed << " failed\n";
    if (profile.excluded > 0) {
        std::cerr << "warning: " << profile.excluded
                  << " matrices excluded from the profile (missing scheme rows)\n";
    }
    return failed > 0 ? exit_numerical : 0;
}

int run_profile(const std::string& csv_path, const std::string& alpha_list,
                const std::string& out_path)
{
    const auto records = expm::load_records_csv(csv_path);
    const auto profile = expm::performance_profile(records, parse_alphas(alpha_list));
    std::ofstream out(out_path);
    if (!out || !(out << expm::profile_json(profile))) {
        throw expm::IoError("cannot write '" + out_path + "'");
    }
    if (profile.excluded > 0) {
        std::cerr << "warning: " << profile.excluded
                  << " matrices excluded from the profile (missing scheme rows)\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Matrix exponential by Taylor scaling and squaring"};
    app.require_subcommand(1);

    std::string in_path;
    std::string out_path;
    std::string scheme = "sastre";
    double eps = 1e-8;
    bool stats = false;
    auto* single = app.add_subcommand("single", "exponentiate one matrix file");
    single->add_option("--in", in_path, "matrix file")->required();
    single->add_option("--eps", eps, "tolerance")->required();
    single->add_option("--scheme", scheme, "baseline, ps or sastre")->required();
    single->add_option("--out", out_path, "write the result here");
    single->add_flag("--stats", stats, "print bounds, timing and the result");

    std::string suite_path;
    std::string csv_path;
    std::string summary_path;
    unsigned parallel = 1;
    auto* bench = app.add_subcommand("bench", "run a benchmark suite");
    bench->add_option("--suite", suite_path, "suite config (JSON)")->required();
    bench->add_option("--csv", csv_path, "per-record CSV output")->required();
    bench->add_option("--summary", summary_path, "summary JSON output")->required();
    bench->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

    std::string profile_csv;
    std::string alphas;
    std::string profile_out;
    auto* profile = app.add_subcommand("profile", "performance profile from a bench CSV");
    profile->add_option("--csv", profile_csv, "bench CSV")->required();
    profile->add_option("--alphas", alphas, "comma separated alpha grid")->required();
    profile->add_option("--out", profile_out, "profile JSON output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input;
    }

    try {
        if (*single) {
            return run_single(in_path, eps, scheme, out_path, stats);
        }
        if (*bench) {
            return run_bench(suite_path, csv_path, summary_path, parallel);
        }
        return run_profile(profile_csv, alphas, profile_out);
    } catch (const expm::NumericalError& e) {
        std::cerr << "expm: " << e.what() << '\n';
        return exit_numerical;
    } catch (const expm::DomainError& e) {
        std::cerr << "expm: " << e.what() << '\n';
        return exit_numerical;
    } catch (const expm::Error& e) {
        std::cerr << "expm: " << e.what() << '\n';
        return exit_input;
    }
}
