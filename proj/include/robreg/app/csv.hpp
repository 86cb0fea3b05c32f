#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace robreg::app {

struct ResultRow {
    std::size_t run_id = 0;
    std::string algorithm;
    double alpha = 0.0;
    std::size_t T = 0;
    std::uint64_t seed = 0;
    double est_error = 0.0;
    double excess_risk = 0.0;
    double excess_risk_se = 0.0;
    std::optional<double> bound;    // empty for algorithms without a guarantee
    std::optional<double> wall_ms;  // empty when timing is disabled
    bool operator==(const ResultRow&) const = default;
};

/// Column order written to disk.
const std::vector<std::string>& csv_header();

class CsvSchemaError : public std::runtime_error {
public:
    CsvSchemaError(std::string message, std::vector<std::string> missing = {})
        : std::runtime_error(std::move(message)), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

/// 17 significant digits; round-trips every finite double.
std::string format_double(double v);

void write_results(std::ostream& out, const std::vector<ResultRow>& rows);

/// Writes to a temporary sibling and renames it over `path`.
void write_results_atomic(const std::string& path, const std::vector<ResultRow>& rows);

/// Throws CsvSchemaError on a missing header, missing columns or malformed fields.
std::vector<ResultRow> read_results(std::istream& in);
std::vector<ResultRow> read_results_file(const std::string& path);

} // namespace robreg::app
