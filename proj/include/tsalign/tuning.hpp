#ifndef TSALIGN_TUNING_HPP
#define TSALIGN_TUNING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "candidate.hpp"
#include "composers.hpp"
#include "core.hpp"

namespace tsalign {

/// Nearest-rank percentile: the ceil(p/100 * N)-th smallest sample (p clamped to (0, 100]).
template <class T>
T nearest_rank_percentile(std::vector<T> samples, double percentile)
{
    if (samples.empty()) throw config_error("percentile of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double p = std::clamp(percentile, 0.0, 100.0);
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(samples.size())));
    rank = std::clamp<std::size_t>(rank, 1, samples.size());
    return samples[rank - 1];
}

/// Same-row timestamp gaps between every pair of series.
inline std::vector<double> same_row_time_gaps(const SeriesTable& t)
{
    std::vector<double> gaps;
    const std::size_t m = t.series_count();
    for (std::size_t i = 0; i < t.row_count(); ++i)
        for (std::size_t a = 0; a < m; ++a) {
            const auto& ta = t.timestamp(a, i);
            if (!ta) continue;
            for (std::size_t b = a + 1; b < m; ++b)
                if (const auto& tb = t.timestamp(b, i)) gaps.push_back(std::abs(*ta - *tb));
        }
    return gaps;
}

inline double determine_theta(const SeriesTable& t, double percentile = 95.0)
{
    auto gaps = same_row_time_gaps(t);
    if (gaps.empty()) throw config_error("no row has two present timestamps; cannot determine theta");
    return nearest_rank_percentile(std::move(gaps), percentile);
}

struct BetaEstimate {
    std::size_t beta = 1;
    bool no_candidates = false;
    std::size_t sample_count = 0;
};

/**
 * Position constraint from the spread of row indices inside candidates.
 * Candidates are gathered with a window of beta_lower + m so the distance
 * distribution is not clipped at beta_lower; the result exceeds beta_lower.
 */
inline BetaEstimate determine_beta(const SeriesTable& t, double theta, std::size_t beta_lower,
                                   double percentile = 80.0)
{
    ConstraintConfig cfg;
    cfg.theta = theta;
    cfg.beta = beta_lower + t.series_count();
    const auto rc = generate_candidates(t, cfg);
    std::vector<std::size_t> dists;
    for (const auto& r : rc)
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = i + 1; j < r.size(); ++j) dists.push_back(r[i] > r[j] ? r[i] - r[j] : r[j] - r[i]);
    BetaEstimate est;
    est.sample_count = dists.size();
    if (dists.empty()) {
        est.beta = beta_lower + 1;
        est.no_candidates = true;
        return est;
    }
    est.beta = std::max(beta_lower + 1, nearest_rank_percentile(std::move(dists), percentile));
    return est;
}

struct GridPoint {
    double k1 = 0.0;
    double k2 = 0.0;
    double mean_delta = std::numeric_limits<double>::quiet_NaN();
    std::size_t runs = 0;
    bool failed = false;
};

struct TuningReport {
    double theta = 0.0;
    std::size_t beta = 1;
    double delta = 0.0;
    double k1 = 1.0, k2 = 1.0, b = 1.0, c = 1.0;
    bool beta_flagged = false;
    std::vector<GridPoint> grid;
};

/// k1, k2 in {1..6}.
inline std::vector<std::pair<double, double>> default_weight_grid()
{
    std::vector<std::pair<double, double>> grid;
    for (int k1 = 1; k1 <= 6; ++k1)
        for (int k2 = 1; k2 <= 6; ++k2) grid.emplace_back(k1, k2);
    return grid;
}

/**
 * For each (k1, k2) the composer runs without the model constraint under
 * `runs` consecutive seeds; the grid point with the smallest mean delta is
 * selected and that mean becomes delta. Ties go to the smaller (k1, k2).
 */
inline TuningReport determine_weights_and_delta(const SeriesTable& t, double theta, std::size_t beta,
                                                const std::vector<std::pair<double, double>>& grid,
                                                Strategy strategy, std::uint64_t seed, std::size_t runs = 3)
{
    if (grid.empty()) throw config_error("weight grid is empty");
    if (runs == 0) throw config_error("need at least one run per grid point");
    ConstraintConfig cfg;
    cfg.theta = theta;
    cfg.beta = beta;
    cfg.delta = std::numeric_limits<double>::infinity();
    const auto rc = generate_candidates(t, cfg);

    TuningReport rep;
    rep.theta = theta;
    rep.beta = beta;
    std::optional<std::size_t> best;
    for (auto [k1, k2] : grid) {
        GridPoint gp{k1, k2};
        WeightParams w{k1, k2, 1.0, 1.0};
        try {
            double mean = 0.0;
            for (std::size_t r = 0; r < runs; ++r) {
                auto a = compose(strategy, rc, cfg, t, w, seed + r, 0);
                mean += (a.report.delta - mean) / static_cast<double>(r + 1);
            }
            gp.mean_delta = mean;
            gp.runs = runs;
        } catch (const size_error&) {
            gp.failed = true;
        }
        rep.grid.push_back(gp);
        if (gp.failed) continue;
        const auto& cur = rep.grid.back();
        if (!best) {
            best = rep.grid.size() - 1;
            continue;
        }
        const auto& b = rep.grid[*best];
        if (cur.mean_delta < b.mean_delta ||
            (cur.mean_delta == b.mean_delta && std::pair(cur.k1, cur.k2) < std::pair(b.k1, b.k2)))
            best = rep.grid.size() - 1;
    }
    if (!best) throw config_error("composer failed on every grid point");
    const auto& chosen = rep.grid[*best];
    rep.k1 = chosen.k1;
    rep.k2 = chosen.k2;
    rep.delta = chosen.mean_delta;
    return rep;
}

} // namespace tsalign

#endif // TSALIGN_TUNING_HPP
