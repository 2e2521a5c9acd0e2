#include "lm2m/bench/report.hpp"

#include "lm2m/util/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

namespace lm2m::bench {

double median(std::vector<double> v)
{
    if (v.empty())
        throw EmptyInput();
    std::sort(v.begin(), v.end());
    auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double p95(std::vector<double> v)
{
    if (v.empty())
        throw EmptyInput();
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
    return v[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<Summary> report(const std::vector<Row>& rows)
{
    if (rows.empty())
        throw EmptyInput();
    std::vector<std::pair<std::string, std::uint64_t>> order;
    std::map<std::pair<std::string, std::uint64_t>, std::vector<double>> groups;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.scenario, r.size);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh)
            order.push_back(key);
        it->second.push_back(r.elapsed_ms);
    }
    std::vector<Summary> out;
    for (const auto& key : order) {
        const auto& values = groups[key];
        out.push_back(Summary{key.first, key.second, values.size(), median(values), p95(values)});
    }
    return out;
}

void write_csv(std::ostream& out, const std::vector<Row>& rows, bool header)
{
    if (header)
        out << kCsvHeader << '\n';
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.3f", r.elapsed_ms);
        out << r.scenario << ',' << r.size << ',' << r.rep << ',' << buf << '\n';
    }
}

std::vector<Row> read_csv(std::istream& in)
{
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line_no == 1) {
            if (line != kCsvHeader)
                throw std::invalid_argument("csv: unexpected header");
            continue;
        }
        auto bad = [&] { return std::invalid_argument("csv: malformed line " + std::to_string(line_no)); };
        std::vector<std::string_view> f;
        std::string_view rest(line);
        for (;;) {
            auto c = rest.find(',');
            f.push_back(rest.substr(0, c));
            if (c == std::string_view::npos)
                break;
            rest.remove_prefix(c + 1);
        }
        if (f.size() != 4 || f[0].empty())
            throw bad();
        Row r;
        r.scenario = std::string(f[0]);
        try {
            r.size = parse_u64(f[1]);
            r.rep = parse_u64(f[2]);
        } catch (const std::exception&) {
            throw bad();
        }
        auto [p, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), r.elapsed_ms);
        if (ec != std::errc() || p != f[3].data() + f[3].size())
            throw bad();
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_report(std::ostream& out, const std::vector<Summary>& summaries)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-28s %8s %6s %12s %12s\n", "scenario", "size", "n", "median_ms", "p95_ms");
    out << buf;
    for (const auto& s : summaries) {
        std::snprintf(buf, sizeof buf, "%-28s %8llu %6zu %12.3f %12.3f\n", s.scenario.c_str(),
                      static_cast<unsigned long long>(s.size), s.count, s.median, s.p95);
        out << buf;
    }
}

} // namespace lm2m::bench
