#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "expm/bench.hpp"

namespace expm {

namespace {

using json = nlohmann::json;

constexpr std::string_view csv_header =
    "generator_kind,n,target_norm,seed,scheme,m,s,square_mults,rel_err,wall_time_s";

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

template <class Int>
Int parse_integer(const std::string& token)
{
    Int value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
        throw ParseError("csv: not an integer: '" + token + "'");
    }
    return value;
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> values, double q)
{
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

json quantiles(const std::vector<double>& values)
{
    return {{"p25", quantile(values, 0.25)},
            {"p50", quantile(values, 0.50)},
            {"p75", quantile(values, 0.75)},
            {"max", quantile(values, 1.0)}};
}

json profile_object(const ProfileTable& profile)
{
    json fractions = json::object();
    for (std::size_t i = 0; i < profile.schemes.size(); ++i) {
        fractions[std::string(to_string(profile.schemes[i]))] = profile.fractions[i];
    }
    return {{"alphas", profile.alphas},
            {"fractions", fractions},
            {"matrices", profile.matrices},
            {"excluded", profile.excluded}};
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out || !(out << text) || !out.flush()) {
        throw IoError("cannot write '" + path + "'");
    }
}

} // namespace

void write_records_csv(std::ostream& out, std::span<const BenchRecord> records)
{
    out << csv_header << '\n';
    for (const auto& r : records) {
        out << to_string(r.generator.kind) << ',' << r.generator.n << ','
            << format_double(r.generator.target_norm) << ',' << r.generator.seed << ','
            << to_string(r.scheme) << ',' << r.m << ',' << r.s << ',' << r.square_mults << ','
            << format_double(r.rel_err) << ',' << format_double(r.wall_time) << '\n';
    }
}

std::vector<BenchRecord> read_records_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != csv_header) {
        throw ParseError("csv: missing or unexpected header");
    }
    std::vector<BenchRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 10) {
            throw ParseError("csv: expected 10 fields in '" + line + "'");
        }
        BenchRecord r;
        try {
            r.generator.kind = parse_generator_kind(f[0]);
            r.scheme = parse_scheme(f[4]);
        } catch (const InvalidArgument& e) {
            throw ParseError(std::string("csv: ") + e.what());
        }
        r.generator.n = parse_integer<std::size_t>(f[1]);
        r.generator.target_norm = parse_double(f[2]);
        r.generator.seed = parse_integer<std::uint64_t>(f[3]);
        r.m = parse_integer<int>(f[5]);
        r.s = parse_integer<int>(f[6]);
        r.square_mults = parse_integer<std::uint64_t>(f[7]);
        r.rel_err = parse_double(f[8]);
        r.wall_time = parse_double(f[9]);
        if (std::isnan(r.rel_err)) {
            r.error = "failed";
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<BenchRecord> load_records_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return read_records_csv(in);
}

std::string summary_json(std::span<const BenchRecord> records, const ProfileTable& profile)
{
    std::vector<Scheme> schemes;
    for (const auto& r : records) {
        if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end()) {
            schemes.push_back(r.scheme);
        }
    }

    std::uint64_t total_mults = 0;
    std::size_t failures = 0;
    json per_scheme = json::object();
    for (Scheme scheme : schemes) {
        std::uint64_t mults = 0;
        std::size_t rows = 0;
        std::size_t failed = 0;
        double err_sum = 0.0;
        double err_max = 0.0;
        std::vector<double> ms;
        std::vector<double> ss;
        for (const auto& r : records) {
            if (r.scheme != scheme) {
                continue;
            }
            ++rows;
            mults += r.square_mults;
            if (!r.ok()) {
                ++failed;
                continue;
            }
            err_sum += r.rel_err;
            err_max = std::max(err_max, r.rel_err);
            ms.push_back(r.m);
            ss.push_back(r.s);
        }
        const double ok_rows = static_cast<double>(ms.size());
        double m_sum = 0.0;
        double s_sum = 0.0;
        for (std::size_t i = 0; i < ms.size(); ++i) {
            m_sum += ms[i];
            s_sum += ss[i];
        }
        per_scheme[std::string(to_string(scheme))] = {
            {"records", rows},
            {"failures", failed},
            {"total_mults", mults},
            {"mean_rel_err", ms.empty() ? 0.0 : err_sum / ok_rows},
            {"max_rel_err", err_max},
            {"mean_m", ms.empty() ? 0.0 : m_sum / ok_rows},
            {"mean_s", ms.empty() ? 0.0 : s_sum / ok_rows},
            {"m_quantiles", quantiles(ms)},
            {"s_quantiles", quantiles(ss)},
        };
        total_mults += mults;
        failures += failed;
    }

    json out = {
        {"totals", {{"records", records.size()}, {"failures", failures}, {"total_mults", total_mults}}},
        {"schemes", per_scheme},
        {"profile", profile_object(profile)},
    };
    return out.dump(2) + "\n";
}

std::string profile_json(const ProfileTable& profile)
{
    return profile_object(profile).dump(2) + "\n";
}

void emit_reports(std::span<const BenchRecord> records, const ProfileTable& profile,
                  const std::string& csv_path, const std::string& summary_path)
{
    std::ostringstream csv;
    write_records_csv(csv, records);
    write_text(csv_path, csv.str());
    write_text(summary_path, summary_json(records, profile));
}

} // namespace expm
