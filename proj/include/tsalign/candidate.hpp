#ifndef TSALIGN_CANDIDATE_HPP
#define TSALIGN_CANDIDATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "core.hpp"

namespace tsalign {

/// Sorted, duplicate-free list of tuples satisfying the time and position constraints.
struct CandidateSet {
    std::vector<AlignedTuple> tuples;
    ConstraintConfig config;
    std::size_t series_count = 0;
    std::size_t row_count = 0;

    std::size_t size() const noexcept { return tuples.size(); }
    bool empty() const noexcept { return tuples.empty(); }
    const AlignedTuple& operator[](std::size_t i) const { return tuples[i]; }
    auto begin() const noexcept { return tuples.begin(); }
    auto end() const noexcept { return tuples.end(); }
};

namespace detail {

// Depth-first cursor search. Cursor k is confined to the position window
// [max(prefix) - beta, min(prefix) + beta]; present timestamps above
// min(prefix time) + theta end the timestamped part of the window, since
// every later present timestamp in the same series is larger.
class CandidateSearch {
public:
    CandidateSearch(const SeriesTable& t, const ConstraintConfig& cfg)
        : table_(t), cfg_(cfg), m_(t.series_count()), n_(t.row_count()), slots_(m_)
    {
    }

    std::vector<AlignedTuple> run()
    {
        if (n_ == 0 || m_ == 0) return {};
        for (std::size_t row = 0; row < n_; ++row) {
            slots_[0] = row;
            const auto& ts = table_.timestamp(0, row);
            descend(1, row, row, ts, ts);
        }
        return std::move(out_);
    }

private:
    void descend(std::size_t k, std::size_t lo_row, std::size_t hi_row, std::optional<double> lo_t,
                 std::optional<double> hi_t)
    {
        if (k == m_) {
            out_.push_back(AlignedTuple{slots_});
            return;
        }
        const std::size_t beta = cfg_.beta;
        const std::size_t first = hi_row >= beta ? hi_row - beta : 0;
        const std::size_t last = std::min(n_ - 1, lo_row + beta);
        bool past_window = false;
        for (std::size_t row = first; row <= last; ++row) {
            const auto& ts = table_.timestamp(k, row);
            if (ts) {
                if (past_window) continue;
                if (lo_t && *ts > *lo_t + cfg_.theta) {
                    past_window = true;
                    continue;
                }
                if (hi_t && *ts < *hi_t - cfg_.theta) continue;
            }
            slots_[k] = row;
            std::optional<double> nlo = lo_t, nhi = hi_t;
            if (ts) {
                nlo = nlo ? std::min(*nlo, *ts) : *ts;
                nhi = nhi ? std::max(*nhi, *ts) : *ts;
            }
            descend(k + 1, std::min(lo_row, row), std::max(hi_row, row), nlo, nhi);
        }
    }

    const SeriesTable& table_;
    ConstraintConfig cfg_;
    std::size_t m_;
    std::size_t n_;
    std::vector<std::size_t> slots_;
    std::vector<AlignedTuple> out_;
};

} // namespace detail

/**
 * Builds the candidate set with a pruned cursor search. Emission order is
 * ascending lexicographic, so the result needs no sort. Cost is bounded by
 * O(n m (2 beta + 1)^(m-1)).
 */
inline CandidateSet generate_candidates(const SeriesTable& t, const ConstraintConfig& cfg)
{
    cfg.validate();
    CandidateSet out;
    out.config = cfg;
    out.series_count = t.series_count();
    out.row_count = t.row_count();
    out.tuples = detail::CandidateSearch(t, cfg).run();
    return out;
}

inline constexpr double brute_force_limit = 1e7;

/// Definition-level enumeration of all n^m slot vectors. Testing oracle.
inline CandidateSet brute_force_candidates(const SeriesTable& t, const ConstraintConfig& cfg)
{
    cfg.validate();
    const std::size_t m = t.series_count();
    const std::size_t n = t.row_count();
    if (std::pow(static_cast<double>(n), static_cast<double>(m)) > brute_force_limit)
        throw size_error("brute-force enumeration exceeds n^m <= 1e7");
    CandidateSet out;
    out.config = cfg;
    out.series_count = m;
    out.row_count = n;
    if (n == 0) return out;

    AlignedTuple r{std::vector<std::size_t>(m, 0)};
    while (true) {
        if (satisfies_position_constraint(r, cfg.beta) && satisfies_time_constraint(r, t, cfg.theta))
            out.tuples.push_back(r);
        std::size_t k = m;
        while (k > 0) {
            --k;
            if (++r.slots[k] < n) break;
            r.slots[k] = 0;
            if (k == 0) {
                std::sort(out.tuples.begin(), out.tuples.end());
                return out;
            }
        }
    }
}

} // namespace tsalign

#endif // TSALIGN_CANDIDATE_HPP
