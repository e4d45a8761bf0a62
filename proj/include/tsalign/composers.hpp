#ifndef TSALIGN_COMPOSERS_HPP
#define TSALIGN_COMPOSERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "candidate.hpp"
#include "consistency.hpp"
#include "core.hpp"

namespace tsalign {

enum class Strategy { exact, setpack, greedy, expect };

inline std::string_view to_string(Strategy s) noexcept
{
    switch (s) {
    case Strategy::exact: return "exact";
    case Strategy::setpack: return "setpack";
    case Strategy::greedy: return "greedy";
    case Strategy::expect: return "expect";
    }
    return "unknown";
}

inline Strategy parse_strategy(std::string_view s)
{
    if (s == "exact") return Strategy::exact;
    if (s == "setpack") return Strategy::setpack;
    if (s == "greedy") return Strategy::greedy;
    if (s == "expect") return Strategy::expect;
    throw config_error("unknown strategy '" + std::string(s) + "'");
}

/// A pairwise non-conflicting subset of the candidate set.
struct Alignment {
    std::vector<AlignedTuple> tuples;  // ascending lexicographic
    double total_weight = 0.0;
    ConsistencyReport report;
    Strategy strategy = Strategy::greedy;
    std::size_t retries_used = 0;
    bool exhausted = false;
    bool truncated = false;  // set-packing branch cap reached

    std::size_t size() const noexcept { return tuples.size(); }
};

inline constexpr std::size_t exact_candidate_limit = 24;
inline constexpr std::size_t setpack_branch_cap = 64;
inline constexpr std::size_t default_max_retries = 16;

namespace detail {

inline std::vector<double> candidate_weights(const CandidateSet& rc, const SeriesTable& t, const WeightParams& w)
{
    std::vector<double> out;
    out.reserve(rc.size());
    for (const auto& r : rc) out.push_back(weight(r, t, w));
    return out;
}

inline void check_candidates(const CandidateSet& rc, const SeriesTable& t)
{
    if (rc.empty()) return;
    if (rc.series_count != t.series_count() || rc.row_count != t.row_count())
        throw structural_error("candidate set was built for a different table");
}

inline bool close_enough(double a, double b) noexcept
{
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

/// For each (series, row) the candidate indices that use that row.
class ConflictIndex {
public:
    explicit ConflictIndex(const CandidateSet& rc) : m_(rc.series_count), by_slot_(rc.series_count)
    {
        for (auto& v : by_slot_) v.resize(rc.row_count);
        for (std::size_t i = 0; i < rc.size(); ++i)
            for (std::size_t k = 0; k < m_; ++k) by_slot_[k][rc[i][k]].push_back(i);
    }

    /// Candidates conflicting with candidate i, excluding i, ascending.
    std::vector<std::size_t> neighbours(const CandidateSet& rc, std::size_t i) const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < m_; ++k)
            for (std::size_t j : by_slot_[k][rc[i][k]])
                if (j != i) out.push_back(j);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    std::size_t m_;
    std::vector<std::vector<std::vector<std::size_t>>> by_slot_;
};

/// Slot occupancy of a partial result.
class Occupancy {
public:
    Occupancy(std::size_t m, std::size_t n) : used_(m, std::vector<std::size_t>(n, npos)) {}

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    bool blocked(const AlignedTuple& r) const noexcept
    {
        for (std::size_t k = 0; k < r.size(); ++k)
            if (used_[k][r[k]] != npos) return true;
        return false;
    }

    std::size_t owner(std::size_t series, std::size_t row) const noexcept { return used_[series][row]; }

    void take(const AlignedTuple& r, std::size_t id) noexcept
    {
        for (std::size_t k = 0; k < r.size(); ++k) used_[k][r[k]] = id;
    }

private:
    std::vector<std::vector<std::size_t>> used_;
};

template <Predictor P>
Alignment make_alignment(std::vector<std::size_t> chosen, const CandidateSet& rc, const SeriesTable& t,
                         const std::vector<double>& weights, Strategy s, const P& predictor)
{
    std::sort(chosen.begin(), chosen.end());
    Alignment a;
    a.strategy = s;
    a.tuples.reserve(chosen.size());
    for (std::size_t i : chosen) {
        a.tuples.push_back(rc[i]);
        a.total_weight += weights[i];
    }
    a.report = evaluate_alignment(std::span<const AlignedTuple>(a.tuples), t, predictor);
    return a;
}

} // namespace detail

/**
 * Exhaustive composer. Enumerates every pairwise non-conflicting subset of
 * the candidate set and keeps the heaviest one whose consistency score is
 * within delta. Equal weights resolve to the lexicographically smallest
 * index list. Throws size_error above 24 candidates.
 */
template <Predictor P = Ar1Predictor>
Alignment compose_exact(const CandidateSet& rc, const ConstraintConfig& cfg, const SeriesTable& t,
                        const WeightParams& w, const P& predictor = {})
{
    cfg.validate();
    w.validate();
    detail::check_candidates(rc, t);
    if (rc.size() > exact_candidate_limit)
        throw size_error("exact composer supports at most 24 candidates, got " + std::to_string(rc.size()) +
                         "; use an approximation strategy");
    const auto weights = detail::candidate_weights(rc, t, w);
    const std::size_t k = rc.size();
    std::vector<std::uint32_t> adj(k, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j && conflicts(rc[i], rc[j])) adj[i] |= std::uint32_t{1} << j;

    const bool unconstrained = std::isinf(cfg.delta);
    std::vector<std::size_t> best;  // empty set always qualifies (delta of nothing is 0)
    double best_weight = 0.0;
    std::vector<std::size_t> current;
    std::vector<AlignedTuple> scratch;

    auto consider = [&](double wsum) {
        if (wsum < best_weight && !detail::close_enough(wsum, best_weight)) return;
        const bool tie = detail::close_enough(wsum, best_weight);
        if (tie && !std::lexicographical_compare(current.begin(), current.end(), best.begin(), best.end())) return;
        if (!unconstrained) {
            scratch.clear();
            for (std::size_t i : current) scratch.push_back(rc[i]);
            auto rep = evaluate_alignment(std::span<const AlignedTuple>(scratch), t, predictor);
            if (!satisfies_model_constraint(rep, cfg)) return;
        }
        best = current;
        best_weight = wsum;
    };

    // Include-first DFS over candidates in index order; blocked marks conflicts with the chosen prefix.
    auto dfs = [&](auto&& self, std::size_t i, std::uint32_t blocked, double wsum) -> void {
        if (i == k) {
            consider(wsum);
            return;
        }
        if (!(blocked & (std::uint32_t{1} << i))) {
            current.push_back(i);
            self(self, i + 1, blocked | adj[i], wsum + weights[i]);
            current.pop_back();
        }
        self(self, i + 1, blocked, wsum);
    };
    dfs(dfs, 0, 0, 0.0);

    return detail::make_alignment(best, rc, t, weights, Strategy::exact, predictor);
}

/**
 * Weighted set-packing local search.
 *
 * Starts from a greedy maximal packing R_f. Each round looks, for every
 * x in R_f, at independent sets Q of candidates that all conflict with x
 * (so |Q| <= m), and the set I of R_f members that Q displaces. The swaps
 * with the best W(Q)/W(I) are applied while they increase the packing
 * weight. Equal-ratio swaps fork branches, breadth first, up to
 * setpack_branch_cap. The heaviest terminal branch within delta wins.
 */
template <Predictor P = Ar1Predictor>
Alignment compose_setpacking(const CandidateSet& rc, const ConstraintConfig& cfg, const SeriesTable& t,
                             const WeightParams& w, const P& predictor = {})
{
    cfg.validate();
    w.validate();
    detail::check_candidates(rc, t);
    const auto weights = detail::candidate_weights(rc, t, w);
    const std::size_t m = t.series_count();
    const std::size_t n = t.row_count();
    if (rc.empty()) return detail::make_alignment({}, rc, t, weights, Strategy::setpack, predictor);

    const detail::ConflictIndex index(rc);
    std::vector<std::vector<std::size_t>> nbrs(rc.size());
    for (std::size_t i = 0; i < rc.size(); ++i) nbrs[i] = index.neighbours(rc, i);

    using State = std::vector<std::size_t>;  // sorted candidate indices

    State initial;
    {
        detail::Occupancy occ(m, n);
        for (std::size_t i = 0; i < rc.size(); ++i)
            if (!occ.blocked(rc[i])) {
                occ.take(rc[i], i);
                initial.push_back(i);
            }
    }

    struct Move {
        State removed;
        State added;
    };

    // Best-ratio improving swaps for one packing state.
    auto improving_moves = [&](const State& state) {
        detail::Occupancy occ(m, n);
        for (std::size_t i : state) occ.take(rc[i], i);

        std::vector<Move> moves;
        double best_ratio = 1.0;
        std::vector<std::size_t> q;
        for (std::size_t x : state) {
            const auto& pool = nbrs[x];
            auto visit = [&](auto&& self, std::size_t from) -> void {
                if (!q.empty()) {
                    State removed;
                    double wq = 0.0;
                    for (std::size_t qi : q) {
                        wq += weights[qi];
                        for (std::size_t s = 0; s < m; ++s) {
                            std::size_t o = occ.owner(s, rc[qi][s]);
                            if (o != detail::Occupancy::npos) removed.push_back(o);
                        }
                    }
                    std::sort(removed.begin(), removed.end());
                    removed.erase(std::unique(removed.begin(), removed.end()), removed.end());
                    double wi = 0.0;
                    for (std::size_t r : removed) wi += weights[r];
                    const double ratio = wq / wi;
                    if (wq > wi && !detail::close_enough(wq, wi)) {
                        if (detail::close_enough(ratio, best_ratio)) {
                            moves.push_back({std::move(removed), q});
                        } else if (ratio > best_ratio) {
                            best_ratio = ratio;
                            moves.clear();
                            moves.push_back({std::move(removed), q});
                        }
                    }
                }
                if (q.size() == m) return;
                for (std::size_t p = from; p < pool.size(); ++p) {
                    const std::size_t cand = pool[p];
                    bool ok = true;
                    for (std::size_t qi : q)
                        if (conflicts(rc[qi], rc[cand])) {
                            ok = false;
                            break;
                        }
                    if (!ok) continue;
                    q.push_back(cand);
                    self(self, p + 1);
                    q.pop_back();
                }
            };
            visit(visit, 0);
        }
        return moves;
    };

    auto apply = [](const State& state, const Move& mv) {
        State next;
        std::set_difference(state.begin(), state.end(), mv.removed.begin(), mv.removed.end(),
                            std::back_inserter(next));
        next.insert(next.end(), mv.added.begin(), mv.added.end());
        std::sort(next.begin(), next.end());
        return next;
    };

    std::deque<State> frontier{initial};
    std::set<State> seen{initial};
    std::vector<State> terminals;
    std::size_t branches = 1;
    bool truncated = false;

    while (!frontier.empty()) {
        State state = std::move(frontier.front());
        frontier.pop_front();
        auto moves = improving_moves(state);
        if (moves.empty()) {
            terminals.push_back(std::move(state));
            continue;
        }
        bool continued = false;
        for (const auto& mv : moves) {
            State next = apply(state, mv);
            if (seen.count(next)) {
                continued = true;
                continue;
            }
            if (continued) {
                if (branches >= setpack_branch_cap) {
                    truncated = true;
                    break;
                }
                ++branches;
            }
            seen.insert(next);
            frontier.push_back(std::move(next));
            continued = true;
        }
    }

    std::optional<Alignment> best_ok;
    std::optional<Alignment> best_delta;
    for (auto& state : terminals) {
        Alignment a = detail::make_alignment(state, rc, t, weights, Strategy::setpack, predictor);
        if (satisfies_model_constraint(a.report, cfg)) {
            if (!best_ok || a.total_weight > best_ok->total_weight + 1e-12 * std::max(1.0, best_ok->total_weight) ||
                (detail::close_enough(a.total_weight, best_ok->total_weight) && a.tuples < best_ok->tuples))
                best_ok = std::move(a);
        } else if (!best_delta || a.report.delta < best_delta->report.delta) {
            best_delta = std::move(a);
        }
    }
    Alignment out = best_ok ? std::move(*best_ok) : std::move(*best_delta);
    out.exhausted = !best_ok.has_value();
    out.truncated = truncated;
    return out;
}

namespace detail {

// Scans candidates in order, grouping runs of mutually conflicting tuples
// that are free of the partial result. Each closed group contributes its
// best-scoring member; equal scores are broken with the generator.
template <class Score>
std::vector<std::size_t> group_scan(const CandidateSet& rc, std::size_t m, std::size_t n, Score&& score,
                                    std::mt19937_64& rng, bool& tie_seen)
{
    Occupancy taken(m, n);
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> group;
    std::vector<double> scores;
    std::vector<std::size_t> top;

    auto emit = [&] {
        if (group.empty()) return;
        scores.clear();
        for (std::size_t g : group) scores.push_back(score(g, std::span<const std::size_t>(group)));
        const double best = *std::max_element(scores.begin(), scores.end());
        top.clear();
        for (std::size_t i = 0; i < group.size(); ++i)
            if (scores[i] == best) top.push_back(group[i]);
        std::size_t pick = top.front();
        if (top.size() > 1) {
            tie_seen = true;
            pick = top[rng() % top.size()];
        }
        taken.take(rc[pick], pick);
        chosen.push_back(pick);
        group.clear();
    };

    for (std::size_t i = 0; i < rc.size(); ++i) {
        if (taken.blocked(rc[i])) continue;
        bool joins = std::all_of(group.begin(), group.end(), [&](std::size_t g) { return conflicts(rc[g], rc[i]); });
        if (!joins) {
            emit();
            if (taken.blocked(rc[i])) continue;
        }
        group.push_back(i);
    }
    emit();
    return chosen;
}

template <Predictor P, class Scan>
Alignment retry_loop(const CandidateSet& rc, const ConstraintConfig& cfg, const SeriesTable& t,
                     const std::vector<double>& weights, Strategy s, std::uint64_t seed, std::size_t max_retries,
                     const P& predictor, Scan&& scan)
{
    std::optional<Alignment> best;
    for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
        std::mt19937_64 rng(seed + attempt);
        bool tie_seen = false;
        auto chosen = scan(rng, tie_seen);
        Alignment a = make_alignment(std::move(chosen), rc, t, weights, s, predictor);
        a.retries_used = attempt;
        if (satisfies_model_constraint(a.report, cfg)) return a;
        if (!best || a.report.delta < best->report.delta) best = std::move(a);
        // Without random tie-breaks every further attempt reproduces this one.
        if (!tie_seen) {
            best->retries_used = attempt;
            break;
        }
        best->retries_used = attempt;
    }
    best->exhausted = true;
    return std::move(*best);
}

} // namespace detail

/// Group-wise greedy composer: each group of mutually conflicting candidates yields its heaviest member.
template <Predictor P = Ar1Predictor>
Alignment compose_greedy(const CandidateSet& rc, const ConstraintConfig& cfg, const SeriesTable& t,
                         const WeightParams& w, std::uint64_t seed = 0,
                         std::size_t max_retries = default_max_retries, const P& predictor = {})
{
    cfg.validate();
    w.validate();
    detail::check_candidates(rc, t);
    const auto weights = detail::candidate_weights(rc, t, w);
    const std::size_t m = t.series_count(), n = t.row_count();
    auto score = [&](std::size_t g, std::span<const std::size_t>) { return weights[g]; };
    return detail::retry_loop(rc, cfg, t, weights, Strategy::greedy, seed, max_retries, predictor,
                              [&](std::mt19937_64& rng, bool& tie) {
                                  return detail::group_scan(rc, m, n, score, rng, tie);
                              });
}

/**
 * Bonus weight of candidate g within its group: the summed weight of later
 * candidates that do not conflict with g but conflict with at least one
 * group member. With prune set, only candidates whose slots all lie at or
 * below (largest group slot + beta) are visited; no other candidate can
 * conflict with the group.
 */
inline double expectation_bonus(const CandidateSet& rc, const std::vector<double>& weights, std::size_t g,
                                std::span<const std::size_t> group, bool prune)
{
    std::size_t end = rc.size();
    std::size_t limit = std::numeric_limits<std::size_t>::max();
    if (prune) {
        std::size_t top = 0;
        for (std::size_t member : group)
            for (std::size_t s : rc[member].slots) top = std::max(top, s);
        limit = top + rc.config.beta;
        end = static_cast<std::size_t>(
            std::upper_bound(rc.begin() + static_cast<std::ptrdiff_t>(g), rc.end(), limit,
                             [](std::size_t lim, const AlignedTuple& r) { return lim < r[0]; }) -
            rc.begin());
    }
    double bonus = 0.0;
    for (std::size_t r = g + 1; r < end; ++r) {
        const auto& cand = rc[r];
        if (prune && std::any_of(cand.slots.begin(), cand.slots.end(), [&](std::size_t s) { return s > limit; }))
            continue;
        if (conflicts(cand, rc[g])) continue;
        bool touches = false;
        for (std::size_t member : group)
            if (conflicts(cand, rc[member])) {
                touches = true;
                break;
            }
        if (touches) bonus += weights[r];
    }
    return bonus;
}

/// Like compose_greedy, but group members are ranked by weight plus expectation_bonus.
template <Predictor P = Ar1Predictor>
Alignment compose_expectation(const CandidateSet& rc, const ConstraintConfig& cfg, const SeriesTable& t,
                              const WeightParams& w, std::uint64_t seed = 0,
                              std::size_t max_retries = default_max_retries, bool prune = true,
                              const P& predictor = {})
{
    cfg.validate();
    w.validate();
    detail::check_candidates(rc, t);
    const auto weights = detail::candidate_weights(rc, t, w);
    const std::size_t m = t.series_count(), n = t.row_count();
    auto score = [&](std::size_t g, std::span<const std::size_t> group) {
        return weights[g] + expectation_bonus(rc, weights, g, group, prune);
    };
    return detail::retry_loop(rc, cfg, t, weights, Strategy::expect, seed, max_retries, predictor,
                              [&](std::mt19937_64& rng, bool& tie) {
                                  return detail::group_scan(rc, m, n, score, rng, tie);
                              });
}

template <Predictor P = Ar1Predictor>
Alignment compose(Strategy s, const CandidateSet& rc, const ConstraintConfig& cfg, const SeriesTable& t,
                  const WeightParams& w, std::uint64_t seed = 0, std::size_t max_retries = default_max_retries,
                  const P& predictor = {})
{
    switch (s) {
    case Strategy::exact: return compose_exact(rc, cfg, t, w, predictor);
    case Strategy::setpack: return compose_setpacking(rc, cfg, t, w, predictor);
    case Strategy::greedy: return compose_greedy(rc, cfg, t, w, seed, max_retries, predictor);
    case Strategy::expect: return compose_expectation(rc, cfg, t, w, seed, max_retries, true, predictor);
    }
    throw config_error("unknown strategy");
}

/// Structural validity: pairwise non-conflicting and drawn from the candidate set.
inline bool is_valid_packing(const Alignment& a, const CandidateSet& rc)
{
    for (std::size_t i = 0; i < a.tuples.size(); ++i) {
        if (!std::binary_search(rc.begin(), rc.end(), a.tuples[i])) return false;
        for (std::size_t j = i + 1; j < a.tuples.size(); ++j)
            if (conflicts(a.tuples[i], a.tuples[j])) return false;
    }
    return true;
}

} // namespace tsalign

#endif // TSALIGN_COMPOSERS_HPP
