#ifndef TSALIGN_IO_HPP
#define TSALIGN_IO_HPP

#include <charconv>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "composers.hpp"
#include "core.hpp"

namespace tsalign {

// Wide CSV: header t_1,v_1,...,t_m,v_m; an empty field is a missing cell.

namespace detail {

inline std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_number(std::string_view field, std::size_t line)
{
    if (field.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw data_error("line " + std::to_string(line) + ": cannot parse number '" + std::string(field) + "'");
    return v;
}

inline std::vector<std::string> lines_of(std::string_view text)
{
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) {
            if (start < text.size()) lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    if (!lines.empty() && lines.front().starts_with("\xEF\xBB\xBF")) lines.front().erase(0, 3);
    return lines;
}

} // namespace detail

/// Shortest round-trip decimal representation.
inline std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::string& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << content;
}

/// Parses a wide CSV table. Rows may be shorter than the header; missing trailing fields are empty.
inline SeriesTable parse_table(std::string_view text)
{
    auto lines = detail::lines_of(text);
    if (lines.empty()) throw data_error("line 1: missing header");
    auto header = detail::split_fields(lines.front());
    if (header.size() < 4 || header.size() % 2 != 0)
        throw data_error("line 1: header must be t_1,v_1,...,t_m,v_m with m >= 2");
    const std::size_t m = header.size() / 2;
    for (std::size_t k = 0; k < m; ++k) {
        const auto idx = std::to_string(k + 1);
        if (header[2 * k] != "t_" + idx || header[2 * k + 1] != "v_" + idx)
            throw data_error("line 1: expected columns t_" + idx + ",v_" + idx);
    }

    std::vector<Column> ts(m), vs(m);
    std::vector<std::size_t> file_line;  // row -> 1-based file line
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (detail::trim(lines[li]).empty()) continue;
        const std::size_t line_no = li + 1;
        auto fields = detail::split_fields(lines[li]);
        if (fields.size() > header.size())
            throw data_error("line " + std::to_string(line_no) + ": expected at most " +
                             std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        fields.resize(header.size());
        for (std::size_t k = 0; k < m; ++k) {
            ts[k].push_back(detail::parse_number(fields[2 * k], line_no));
            vs[k].push_back(detail::parse_number(fields[2 * k + 1], line_no));
        }
        file_line.push_back(line_no);
    }

    // Validate per series here so diagnostics carry file line numbers.
    std::string problems;
    for (std::size_t k = 0; k < m; ++k) {
        std::optional<double> last;
        std::string rows;
        for (std::size_t i = 0; i < ts[k].size(); ++i) {
            if (!ts[k][i]) continue;
            if (last && !(*ts[k][i] > *last)) {
                if (!rows.empty()) rows += ",";
                rows += std::to_string(file_line[i]);
            }
            last = ts[k][i];
        }
        if (!rows.empty()) problems += " t_" + std::to_string(k + 1) + " at lines " + rows + ";";
    }
    if (!problems.empty()) throw data_error("timestamps must strictly increase:" + problems);
    return SeriesTable(std::move(ts), std::move(vs));
}

inline SeriesTable ingest(const std::string& path) { return parse_table(read_file(path)); }

inline std::string format_table(const SeriesTable& t)
{
    std::string out;
    const std::size_t m = t.series_count();
    for (std::size_t k = 0; k < m; ++k) {
        if (k) out += ',';
        out += "t_" + std::to_string(k + 1) + ",v_" + std::to_string(k + 1);
    }
    out += '\n';
    for (std::size_t i = 0; i < t.row_count(); ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            if (k) out += ',';
            if (const auto& v = t.timestamp(k, i)) out += format_number(*v);
            out += ',';
            if (const auto& v = t.value(k, i)) out += format_number(*v);
        }
        out += '\n';
    }
    return out;
}

/// One row per tuple: 1-based row, timestamp and value per series, then weight, theta, phi.
inline std::string format_alignment(const Alignment& a, const SeriesTable& t, const WeightParams& w)
{
    const std::size_t m = t.series_count();
    std::string out;
    for (std::size_t k = 0; k < m; ++k) {
        const auto idx = std::to_string(k + 1);
        out += "r_" + idx + ",t_" + idx + ",v_" + idx + ",";
    }
    out += "weight,theta,phi\n";
    for (const auto& r : a.tuples) {
        for (std::size_t k = 0; k < m; ++k) {
            out += std::to_string(r[k] + 1) + ',';
            if (const auto& v = t.timestamp(k, r[k])) out += format_number(*v);
            out += ',';
            if (const auto& v = t.value(k, r[k])) out += format_number(*v);
            out += ',';
        }
        out += format_number(weight(r, t, w)) + ',';
        if (auto th = theta_similarity(r, t)) out += format_number(*th);
        out += ',' + std::to_string(phi_similarity(r)) + '\n';
    }
    return out;
}

/// Reads the tuples (0-based) back from an aligned CSV.
inline std::vector<AlignedTuple> parse_alignment(std::string_view text)
{
    auto lines = detail::lines_of(text);
    if (lines.empty()) throw data_error("line 1: missing header");
    auto header = detail::split_fields(lines.front());
    if (header.size() < 3 + 6 || (header.size() - 3) % 3 != 0)
        throw data_error("line 1: not an aligned-tuple header");
    const std::size_t m = (header.size() - 3) / 3;
    std::vector<AlignedTuple> out;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (detail::trim(lines[li]).empty()) continue;
        auto fields = detail::split_fields(lines[li]);
        if (fields.size() != header.size())
            throw data_error("line " + std::to_string(li + 1) + ": wrong field count");
        AlignedTuple r;
        for (std::size_t k = 0; k < m; ++k) {
            auto v = detail::parse_number(fields[3 * k], li + 1);
            if (!v || *v < 1.0 || *v != static_cast<double>(static_cast<std::size_t>(*v)))
                throw data_error("line " + std::to_string(li + 1) + ": bad row index");
            r.slots.push_back(static_cast<std::size_t>(*v) - 1);
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace tsalign

#endif // TSALIGN_IO_HPP
