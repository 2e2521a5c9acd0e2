#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace lm2m::bench {

struct Row {
    std::string scenario;
    std::uint64_t size = 0;
    std::uint64_t rep = 0;
    double elapsed_ms = 0;
};

struct Summary {
    std::string scenario;
    std::uint64_t size = 0;
    std::size_t count = 0;
    double median = 0;
    double p95 = 0;
};

class EmptyInput : public std::invalid_argument {
public:
    EmptyInput() : std::invalid_argument("no rows to summarize") {}
};

/// Middle value; mean of the two middle values for an even count. Throws EmptyInput.
double median(std::vector<double> values);
/// Nearest-rank 95th percentile. Throws EmptyInput.
double p95(std::vector<double> values);

/// One summary per (scenario, size), ordered by first appearance. Throws EmptyInput.
std::vector<Summary> report(const std::vector<Row>& rows);

inline constexpr std::string_view kCsvHeader = "scenario,size,rep,elapsed_ms";

void write_csv(std::ostream& out, const std::vector<Row>& rows, bool header = true);
/// Throws std::invalid_argument on a malformed line or header.
std::vector<Row> read_csv(std::istream& in);

void write_report(std::ostream& out, const std::vector<Summary>& summaries);

} // namespace lm2m::bench
