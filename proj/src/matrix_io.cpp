#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "expm/matrix.hpp"

namespace expm {

std::string format_double(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) {
        throw Error("format_double: to_chars failed");
    }
    return std::string(buf, end);
}

double parse_double(std::string_view token)
{
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw ParseError("not a number: '" + std::string(token) + "'");
    }
    return value;
}

Matrix read_matrix(std::istream& in)
{
    std::string token;
    if (!(in >> token)) {
        throw ParseError("matrix file: missing order");
    }
    const double order = parse_double(token);
    if (order < 1 || order != static_cast<double>(static_cast<std::size_t>(order))) {
        throw ParseError("matrix file: invalid order '" + token + "'");
    }
    const auto n = static_cast<std::size_t>(order);
    std::vector<double> entries;
    entries.reserve(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
        if (!(in >> token)) {
            throw ParseError("matrix file: expected " + std::to_string(n * n) + " entries, got " +
                             std::to_string(i));
        }
        entries.push_back(parse_double(token));
    }
    if (in >> token) {
        throw ParseError("matrix file: trailing data '" + token + "'");
    }
    try {
        return Matrix(n, std::move(entries));
    } catch (const NumericalError& e) {
        throw ParseError(std::string("matrix file: ") + e.what());
    }
}

void write_matrix(std::ostream& out, const Matrix& a)
{
    const std::size_t n = a.order();
    out << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) {
                out << ' ';
            }
            out << format_double(a(i, j));
        }
        out << '\n';
    }
}

Matrix load_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return read_matrix(in);
}

void save_matrix(const std::string& path, const Matrix& a)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    write_matrix(out, a);
    if (!out) {
        throw IoError("write failed for '" + path + "'");
    }
}

} // namespace expm
