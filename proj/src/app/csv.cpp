#include "robreg/app/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace robreg::app {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const char* column, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && !s.empty()) return v;
    throw CsvSchemaError("line " + std::to_string(line) + ": bad number '" + s + "' in column " + column);
}

template <class Int>
Int parse_int(const std::string& s, const char* column, std::size_t line) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw CsvSchemaError("line " + std::to_string(line) + ": bad integer '" + s + "' in column " + column);
    }
    return v;
}

std::optional<double> parse_optional(const std::string& s, const char* column, std::size_t line) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, column, line);
}

} // namespace

const std::vector<std::string>& csv_header() {
    static const std::vector<std::string> cols{"run_id",      "algorithm",      "alpha", "T",      "seed",
                                               "est_error",   "excess_risk",    "excess_risk_se",
                                               "bound",       "wall_ms"};
    return cols;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
    const auto& header = csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : rows) {
        out << r.run_id << ',' << r.algorithm << ',' << format_double(r.alpha) << ',' << r.T << ',' << r.seed << ','
            << format_double(r.est_error) << ',' << format_double(r.excess_risk) << ','
            << format_double(r.excess_risk_se) << ',' << (r.bound ? format_double(*r.bound) : "") << ','
            << (r.wall_ms ? format_double(*r.wall_ms) : "") << '\n';
    }
}

void write_results_atomic(const std::string& path, const std::vector<ResultRow>& rows) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        write_results(out, rows);
        out.flush();
        if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::vector<ResultRow> read_results(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CsvSchemaError("empty CSV: no header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
    std::vector<std::string> missing;
    for (const auto& c : csv_header()) {
        if (!index.count(c)) missing.push_back(c);
    }
    if (!missing.empty()) {
        std::string msg = "CSV is missing columns:";
        for (const auto& m : missing) msg += " " + m;
        throw CsvSchemaError(msg, missing);
    }

    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != header.size()) {
            throw CsvSchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                                 " fields, found " + std::to_string(f.size()));
        }
        auto col = [&](const char* name) -> const std::string& { return f[index.at(name)]; };
        ResultRow r;
        r.run_id = parse_int<std::size_t>(col("run_id"), "run_id", line_no);
        r.algorithm = col("algorithm");
        r.alpha = parse_double(col("alpha"), "alpha", line_no);
        r.T = parse_int<std::size_t>(col("T"), "T", line_no);
        r.seed = parse_int<std::uint64_t>(col("seed"), "seed", line_no);
        r.est_error = parse_double(col("est_error"), "est_error", line_no);
        r.excess_risk = parse_double(col("excess_risk"), "excess_risk", line_no);
        r.excess_risk_se = parse_double(col("excess_risk_se"), "excess_risk_se", line_no);
        r.bound = parse_optional(col("bound"), "bound", line_no);
        r.wall_ms = parse_optional(col("wall_ms"), "wall_ms", line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ResultRow> read_results_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return read_results(in);
}

} // namespace robreg::app
