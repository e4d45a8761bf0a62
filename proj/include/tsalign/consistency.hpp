#ifndef TSALIGN_CONSISTENCY_HPP
#define TSALIGN_CONSISTENCY_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"

namespace tsalign {

/// Row-major values of a composed alignment: one row per tuple, one column per series.
using ValueMatrix = std::vector<std::vector<Cell>>;

/// Values referenced by each tuple, in the order given.
inline ValueMatrix aligned_values(std::span<const AlignedTuple> tuples, const SeriesTable& t)
{
    ValueMatrix out;
    out.reserve(tuples.size());
    for (const auto& r : tuples) {
        check_tuple(r, t);
        std::vector<Cell> row(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) row[k] = t.value(k, r[k]);
        out.push_back(std::move(row));
    }
    return out;
}

/**
 * Vector AR(1) predictor: V[i] ~ coeff * V[i-1] + intercept, fitted one
 * equation per series by masked least squares. Series without enough
 * complete row pairs fall back to their observed mean.
 */
struct ConsistencyModel {
    Eigen::MatrixXd coeff;
    Eigen::VectorXd intercept;
    Eigen::VectorXd means;          // per-series observed mean, 0 when all missing
    std::vector<bool> fallback;     // per-series: mean predictor in use
    bool fitted = false;

    std::size_t series_count() const noexcept { return static_cast<std::size_t>(intercept.size()); }
    bool any_fallback() const noexcept { return std::find(fallback.begin(), fallback.end(), true) != fallback.end(); }

    /// Predictions for every cell. Missing predictors are replaced by series means;
    /// row 0 is predicted from the means.
    std::vector<std::vector<double>> predict(const ValueMatrix& values) const
    {
        const auto m = static_cast<Eigen::Index>(series_count());
        std::vector<std::vector<double>> out(values.size(), std::vector<double>(series_count()));
        Eigen::VectorXd prev = means;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (static_cast<Eigen::Index>(values[i].size()) != m)
                throw structural_error("value row width does not match model");
            Eigen::VectorXd pred = coeff * prev + intercept;
            for (Eigen::Index j = 0; j < m; ++j) out[i][j] = pred[j];
            for (Eigen::Index j = 0; j < m; ++j) {
                const auto& v = values[i][j];
                prev[j] = v ? *v : means[j];
            }
        }
        return out;
    }
};

inline constexpr double ridge_damping = 1e-6;

inline ConsistencyModel mean_model(std::size_t m, const Eigen::VectorXd& means)
{
    ConsistencyModel model;
    const auto mm = static_cast<Eigen::Index>(m);
    model.coeff = Eigen::MatrixXd::Zero(mm, mm);
    model.intercept = means;
    model.means = means;
    model.fallback.assign(m, true);
    model.fitted = true;
    return model;
}

/// Masked least-squares AR(1) fit over consecutive aligned rows.
inline ConsistencyModel fit_model(const ValueMatrix& values, std::size_t m)
{
    const auto mm = static_cast<Eigen::Index>(m);
    Eigen::VectorXd means = Eigen::VectorXd::Zero(mm);
    std::vector<std::size_t> observed(m, 0);
    for (const auto& row : values) {
        if (row.size() != m) throw structural_error("value row width does not match series count");
        for (std::size_t j = 0; j < m; ++j)
            if (row[j]) {
                means[static_cast<Eigen::Index>(j)] += *row[j];
                ++observed[j];
            }
    }
    for (std::size_t j = 0; j < m; ++j)
        if (observed[j] > 0) means[static_cast<Eigen::Index>(j)] /= static_cast<double>(observed[j]);

    ConsistencyModel model = mean_model(m, means);
    if (values.size() < m + 2) return model;

    // Row pairs whose predecessor row is fully observed.
    std::vector<std::size_t> complete_pred;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (std::all_of(values[i - 1].begin(), values[i - 1].end(), [](const Cell& c) { return c.has_value(); }))
            complete_pred.push_back(i);

    const Eigen::Index p = mm + 1;
    for (std::size_t j = 0; j < m; ++j) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd x(p);
        std::size_t used = 0;
        for (std::size_t i : complete_pred) {
            const auto& y = values[i][j];
            if (!y) continue;
            for (Eigen::Index k = 0; k < mm; ++k) x[k] = *values[i - 1][static_cast<std::size_t>(k)];
            x[mm] = 1.0;
            gram.noalias() += x * x.transpose();
            rhs += *y * x;
            ++used;
        }
        if (used < m + 2) continue;
        for (Eigen::Index k = 0; k < mm; ++k) gram(k, k) += ridge_damping;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        if (ldlt.info() != Eigen::Success) continue;
        Eigen::VectorXd sol = ldlt.solve(rhs);
        if (ldlt.info() != Eigen::Success || !sol.allFinite()) continue;
        model.coeff.row(static_cast<Eigen::Index>(j)) = sol.head(mm).transpose();
        model.intercept[static_cast<Eigen::Index>(j)] = sol[mm];
        model.fallback[j] = false;
    }
    return model;
}

struct ConsistencyReport {
    std::vector<double> losses;       // L_j
    std::vector<double> normalizers;  // mu_j
    std::vector<std::vector<double>> abs_errors;  // A, row-major
    std::vector<bool> degenerate;     // mu_j == 0
    double delta = 0.0;
    bool all_missing = true;
    bool model_fallback = false;
};

/// Normalized absolute prediction error against explicit predictions.
inline ConsistencyReport consistency_from_predictions(const ValueMatrix& values,
                                                      const std::vector<std::vector<double>>& predictions,
                                                      std::size_t m)
{
    if (predictions.size() != values.size()) throw structural_error("prediction row count mismatch");
    ConsistencyReport rep;
    rep.losses.assign(m, 0.0);
    rep.normalizers.assign(m, 0.0);
    rep.degenerate.assign(m, false);
    rep.abs_errors.assign(values.size(), std::vector<double>(m, 0.0));

    for (std::size_t j = 0; j < m; ++j) {
        std::size_t count = 0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        double err = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i].size() != m || predictions[i].size() != m)
                throw structural_error("value row width mismatch");
            const auto& v = values[i][j];
            if (!v) continue;
            ++count;
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
            const double a = std::abs(predictions[i][j] - *v);
            rep.abs_errors[i][j] = a;
            err += a;
        }
        if (count > 0) rep.all_missing = false;
        const double mu = count > 0 ? static_cast<double>(count) * (hi - lo) : 0.0;
        rep.normalizers[j] = mu;
        if (mu > 0.0) {
            rep.losses[j] = err / mu;
        } else {
            rep.degenerate[j] = true;
        }
    }
    double sum = 0.0;
    for (double l : rep.losses) sum += l;
    rep.delta = m > 0 ? sum / static_cast<double>(m) : 0.0;
    return rep;
}

inline ConsistencyReport consistency_delta(const ValueMatrix& values, const ConsistencyModel& model)
{
    auto rep = consistency_from_predictions(values, model.predict(values), model.series_count());
    rep.model_fallback = model.any_fallback();
    return rep;
}

inline bool satisfies_model_constraint(const ConsistencyReport& report, const ConstraintConfig& cfg) noexcept
{
    return std::isinf(cfg.delta) || report.delta <= cfg.delta;
}

/// A pluggable consistency predictor: fit on aligned values, then score them.
template <class P>
concept Predictor = requires(const P& p, const ValueMatrix& v, std::size_t m) {
    { p.evaluate(v, m) } -> std::convertible_to<ConsistencyReport>;
};

/// Default predictor backed by the masked AR(1) fit.
struct Ar1Predictor {
    ConsistencyReport evaluate(const ValueMatrix& values, std::size_t m) const
    {
        return consistency_delta(values, fit_model(values, m));
    }
};

/// Consistency of an alignment given as tuples (evaluated in the order given).
template <Predictor P = Ar1Predictor>
ConsistencyReport evaluate_alignment(std::span<const AlignedTuple> tuples, const SeriesTable& t, const P& predictor = {})
{
    return predictor.evaluate(aligned_values(tuples, t), t.series_count());
}

} // namespace tsalign

#endif // TSALIGN_CONSISTENCY_HPP
