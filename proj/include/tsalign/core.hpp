#ifndef TSALIGN_CORE_HPP
#define TSALIGN_CORE_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace tsalign {

using Cell = std::optional<double>;
using Column = std::vector<Cell>;

/**
 * Rectangular store of m series with n rows each. Every cell may carry a
 * timestamp, a value, both or neither. Columns shorter than the longest one
 * are padded with fully-missing rows.
 *
 * Within one series the present timestamps must be strictly increasing by
 * row index; construction throws data_error otherwise.
 */
class SeriesTable {
public:
    SeriesTable() = default;

    SeriesTable(std::vector<Column> timestamps, std::vector<Column> values)
        : timestamps_(std::move(timestamps)), values_(std::move(values))
    {
        if (timestamps_.size() != values_.size())
            throw structural_error("timestamp and value column counts differ");
        if (timestamps_.size() < 2)
            throw structural_error("a series table needs at least two series");
        std::size_t n = 0;
        for (std::size_t k = 0; k < timestamps_.size(); ++k)
            n = std::max({n, timestamps_[k].size(), values_[k].size()});
        for (std::size_t k = 0; k < timestamps_.size(); ++k) {
            timestamps_[k].resize(n);
            values_[k].resize(n);
        }
        rows_ = n;
        validate_monotone();
    }

    std::size_t series_count() const noexcept { return timestamps_.size(); }
    std::size_t row_count() const noexcept { return rows_; }

    const Cell& timestamp(std::size_t series, std::size_t row) const { return timestamps_.at(series).at(row); }
    const Cell& value(std::size_t series, std::size_t row) const { return values_.at(series).at(row); }

    const Column& timestamps(std::size_t series) const { return timestamps_.at(series); }
    const Column& values(std::size_t series) const { return values_.at(series); }

    bool operator==(const SeriesTable&) const = default;

private:
    void validate_monotone() const
    {
        for (std::size_t k = 0; k < timestamps_.size(); ++k) {
            std::optional<double> last;
            std::string offending;
            for (std::size_t i = 0; i < rows_; ++i) {
                const auto& t = timestamps_[k][i];
                if (!t) continue;
                if (last && !(*t > *last)) {
                    if (!offending.empty()) offending += ",";
                    offending += std::to_string(i + 1);
                }
                last = t;
            }
            if (!offending.empty())
                throw data_error("series " + std::to_string(k + 1) +
                                 ": timestamps not strictly increasing at rows " + offending);
        }
    }

    std::vector<Column> timestamps_;
    std::vector<Column> values_;
    std::size_t rows_ = 0;
};

/// One row index per series; slot k references a row of series k (0-based).
struct AlignedTuple {
    std::vector<std::size_t> slots;

    std::size_t size() const noexcept { return slots.size(); }
    std::size_t operator[](std::size_t k) const { return slots[k]; }

    auto operator<=>(const AlignedTuple&) const = default;
    bool operator==(const AlignedTuple&) const = default;
};

struct WeightParams {
    double k1 = 3.0;
    double k2 = 2.0;
    double b = 1.0;
    double c = 1.0;

    void validate() const
    {
        if (!(k1 >= 0.0) || !(k2 >= 0.0))
            throw config_error("k1 and k2 must be non-negative");
        if (!(b > 0.0) || !(c > 0.0))
            throw config_error("b and c must be positive");
    }
};

struct ConstraintConfig {
    double theta = 0.0;
    std::size_t beta = 0;
    double delta = std::numeric_limits<double>::infinity();

    void validate() const
    {
        if (!(theta >= 0.0)) throw config_error("theta must be non-negative");
        if (!(delta >= 0.0)) throw config_error("delta must be non-negative");
    }
};

inline void check_tuple(const AlignedTuple& r, const SeriesTable& t)
{
    if (r.size() != t.series_count())
        throw structural_error("tuple has " + std::to_string(r.size()) + " slots, table has " +
                               std::to_string(t.series_count()) + " series");
    for (std::size_t k = 0; k < r.size(); ++k)
        if (r[k] >= t.row_count())
            throw structural_error("slot " + std::to_string(k) + " row " + std::to_string(r[k]) +
                                   " out of range");
}

/// Largest gap between any two present timestamps; absent when fewer than two are present.
inline std::optional<double> theta_similarity(const AlignedTuple& r, const SeriesTable& t)
{
    check_tuple(r, t);
    std::optional<double> lo, hi;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const auto& ts = t.timestamp(k, r[k]);
        if (!ts) continue;
        lo = lo ? std::min(*lo, *ts) : *ts;
        hi = hi ? std::max(*hi, *ts) : *ts;
    }
    std::size_t present = 0;
    for (std::size_t k = 0; k < r.size(); ++k)
        present += t.timestamp(k, r[k]).has_value();
    if (present < 2) return std::nullopt;
    return *hi - *lo;
}

/// Largest row-index gap over all slots, missing cells included.
inline std::size_t phi_similarity(const AlignedTuple& r)
{
    if (r.slots.empty()) return 0;
    auto [lo, hi] = std::minmax_element(r.slots.begin(), r.slots.end());
    return *hi - *lo;
}

/// Number of slots whose value is present (lambda).
inline std::size_t value_count(const AlignedTuple& r, const SeriesTable& t)
{
    check_tuple(r, t);
    std::size_t lambda = 0;
    for (std::size_t k = 0; k < r.size(); ++k)
        lambda += t.value(k, r[k]).has_value();
    return lambda;
}

inline std::size_t pair_count(std::size_t lambda) noexcept
{
    return lambda < 2 ? 0 : lambda * (lambda - 1) / 2;
}

/// Sum of |slots[i] - slots[j]| over all slot pairs i < j.
inline std::size_t distance_sum(const AlignedTuple& r) noexcept
{
    std::size_t d = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j)
            d += r[i] > r[j] ? r[i] - r[j] : r[j] - r[i];
    return d;
}

inline double weight_from_counts(std::size_t pairs, std::size_t distance, const WeightParams& w) noexcept
{
    return (w.k1 * static_cast<double>(pairs) + w.b) / (w.k2 * static_cast<double>(distance) + w.c);
}

/// Tuple weight (k1 p + b) / (k2 d + c).
inline double weight(const AlignedTuple& r, const SeriesTable& t, const WeightParams& w)
{
    return weight_from_counts(pair_count(value_count(r, t)), distance_sum(r), w);
}

/// Two tuples conflict when they reference the same row of some series.
inline bool conflicts(const AlignedTuple& a, const AlignedTuple& b) noexcept
{
    const std::size_t m = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < m; ++k)
        if (a[k] == b[k]) return true;
    return false;
}

inline bool satisfies_time_constraint(const AlignedTuple& r, const SeriesTable& t, double theta)
{
    auto th = theta_similarity(r, t);
    return !th || *th <= theta;
}

inline bool satisfies_position_constraint(const AlignedTuple& r, std::size_t beta) noexcept
{
    return phi_similarity(r) <= beta;
}

/// Sum of weights over a set of tuples, accumulated in the given order.
inline double total_weight(std::span<const AlignedTuple> tuples, const SeriesTable& t, const WeightParams& w)
{
    double sum = 0.0;
    for (const auto& r : tuples) sum += weight(r, t, w);
    return sum;
}

} // namespace tsalign

#endif // TSALIGN_CORE_HPP
