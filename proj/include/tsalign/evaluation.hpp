#ifndef TSALIGN_EVALUATION_HPP
#define TSALIGN_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "composers.hpp"
#include "core.hpp"

namespace tsalign {

/**
 * Complete reference table plus the true correspondence: group[k][i] names
 * the simultaneous-observation group of cell (k, i), or nothing when the
 * cell is absent from the complete table.
 */
struct GroundTruth {
    SeriesTable complete;
    std::vector<std::vector<std::optional<std::size_t>>> group;
};

/// Truth where row i of every series belongs to group i.
inline GroundTruth row_aligned_truth(SeriesTable complete)
{
    GroundTruth truth;
    const std::size_t m = complete.series_count(), n = complete.row_count();
    truth.group.assign(m, std::vector<std::optional<std::size_t>>(n));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (complete.timestamp(k, i) || complete.value(k, i)) truth.group[k][i] = i;
    truth.complete = std::move(complete);
    return truth;
}

struct ScoreReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t aligned_tuple_count = 0;
    double total_weight = 0.0;
    double delta = 0.0;
};

namespace detail {

inline std::uint64_t pair_key(std::uint64_t a, std::uint64_t b) noexcept
{
    if (a > b) std::swap(a, b);
    return (a << 32) | b;
}

} // namespace detail

/// Pair-level precision, recall and F1 of an alignment against ground truth.
inline ScoreReport score(const Alignment& alignment, const GroundTruth& truth)
{
    const std::size_t m = truth.group.size();
    const std::size_t n = m > 0 ? truth.group.front().size() : 0;
    auto cell = [n](std::size_t k, std::size_t i) { return static_cast<std::uint64_t>(k * n + i); };

    // Unordered cell pairs sharing a truth group.
    std::unordered_set<std::uint64_t> truth_pairs;
    {
        std::vector<std::vector<std::uint64_t>> members;
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t i = 0; i < n; ++i)
                if (auto g = truth.group[k][i]) {
                    if (*g >= members.size()) members.resize(*g + 1);
                    members[*g].push_back(cell(k, i));
                }
        for (const auto& mem : members)
            for (std::size_t a = 0; a < mem.size(); ++a)
                for (std::size_t b = a + 1; b < mem.size(); ++b) truth_pairs.insert(detail::pair_key(mem[a], mem[b]));
    }

    std::unordered_set<std::uint64_t> aligned_pairs;
    for (const auto& r : alignment.tuples) {
        if (r.size() != m) throw structural_error("alignment width does not match ground truth");
        for (std::size_t a = 0; a < m; ++a) {
            if (r[a] >= n) throw structural_error("alignment row outside ground truth");
            for (std::size_t b = a + 1; b < m; ++b) aligned_pairs.insert(detail::pair_key(cell(a, r[a]), cell(b, r[b])));
        }
    }

    std::size_t hits = 0;
    for (auto p : aligned_pairs) hits += truth_pairs.count(p);

    ScoreReport rep;
    rep.precision = aligned_pairs.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(aligned_pairs.size());
    rep.recall = truth_pairs.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(truth_pairs.size());
    rep.f1 = rep.precision + rep.recall > 0.0 ? 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall) : 0.0;
    rep.aligned_tuple_count = alignment.size();
    rep.total_weight = alignment.total_weight;
    rep.delta = alignment.report.delta;
    return rep;
}

enum class MaskTarget { values, timestamps, both };

inline MaskTarget parse_mask_target(std::string_view s)
{
    if (s == "values") return MaskTarget::values;
    if (s == "timestamps") return MaskTarget::timestamps;
    if (s == "both") return MaskTarget::both;
    throw config_error("unknown missing target '" + std::string(s) + "'");
}

/// Missing-completely-at-random masking of targeted present cells.
inline SeriesTable inject_mcar(const SeriesTable& t, double rate, std::uint64_t seed, MaskTarget target)
{
    if (!(rate >= 0.0 && rate <= 1.0)) throw config_error("missing rate must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t m = t.series_count(), n = t.row_count();
    std::vector<Column> ts(m), vs(m);
    for (std::size_t k = 0; k < m; ++k) {
        ts[k] = t.timestamps(k);
        vs[k] = t.values(k);
        for (std::size_t i = 0; i < n; ++i) {
            const bool has_t = ts[k][i].has_value(), has_v = vs[k][i].has_value();
            const bool eligible = (target == MaskTarget::values && has_v) ||
                                  (target == MaskTarget::timestamps && has_t) ||
                                  (target == MaskTarget::both && (has_t || has_v));
            if (!eligible || unit(rng) >= rate) continue;
            if (target != MaskTarget::timestamps) vs[k][i].reset();
            if (target != MaskTarget::values) ts[k][i].reset();
        }
    }
    return SeriesTable(std::move(ts), std::move(vs));
}

enum class ValueModel { ar1, sine, walk };

inline ValueModel parse_value_model(std::string_view s)
{
    if (s == "ar1") return ValueModel::ar1;
    if (s == "sine") return ValueModel::sine;
    if (s == "walk") return ValueModel::walk;
    throw config_error("unknown value model '" + std::string(s) + "'");
}

struct SyntheticData {
    SeriesTable table;
    GroundTruth truth;
    bool ambiguous_jitter = false;  // jitter >= tick / 2
};

/**
 * Synthetic benchmark: series k records row i at tick * i plus uniform
 * jitter, with values drawn from a shared latent process. The truth
 * correspondence is the base row.
 */
inline SyntheticData generate_synthetic(std::size_t n, std::size_t m, double jitter, ValueModel model,
                                        std::uint64_t seed, double tick = 1.0)
{
    if (n < 2 || m < 2) throw config_error("synthetic data needs n >= 2 and m >= 2");
    if (!(jitter >= 0.0) || !(tick > 0.0)) throw config_error("jitter must be >= 0 and tick > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jit(-jitter, jitter);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> gain(m), offset(m), phase(m);
    for (std::size_t k = 0; k < m; ++k) {
        gain[k] = 0.5 + unit(rng);
        offset[k] = 10.0 * static_cast<double>(k);
        phase[k] = 2.0 * std::numbers::pi * unit(rng);
    }

    std::vector<Column> ts(m, Column(n)), vs(m, Column(n));
    double latent = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        switch (model) {
        case ValueModel::ar1: latent = 0.9 * latent + gauss(rng); break;
        case ValueModel::walk: latent += gauss(rng); break;
        case ValueModel::sine: latent = static_cast<double>(i); break;
        }
        for (std::size_t k = 0; k < m; ++k) {
            double v = 0.0;
            if (model == ValueModel::sine)
                v = gain[k] * std::sin(2.0 * std::numbers::pi * latent / 50.0 + phase[k]) + offset[k] + 0.05 * gauss(rng);
            else
                v = gain[k] * latent + offset[k] + 0.1 * gauss(rng);
            vs[k][i] = v;
            ts[k][i] = tick * static_cast<double>(i) + (jitter > 0.0 ? jit(rng) : 0.0);
        }
    }

    SyntheticData out;
    out.ambiguous_jitter = jitter >= tick / 2.0;
    if (out.ambiguous_jitter) {
        for (auto& col : ts) {
            std::sort(col.begin(), col.end());
            for (std::size_t i = 1; i < n; ++i)
                if (!(*col[i] > *col[i - 1])) col[i] = std::nextafter(*col[i - 1], INFINITY);
        }
    }
    out.table = SeriesTable(std::move(ts), std::move(vs));
    out.truth = row_aligned_truth(out.table);
    return out;
}

} // namespace tsalign

#endif // TSALIGN_EVALUATION_HPP
