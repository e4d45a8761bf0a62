#ifndef TSALIGN_PIPELINE_HPP
#define TSALIGN_PIPELINE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "candidate.hpp"
#include "composers.hpp"
#include "evaluation.hpp"
#include "io.hpp"
#include "tuning.hpp"

namespace tsalign {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_data = 3,
    exit_size = 4,
    exit_exhausted = 5,
};

struct RunConfig {
    std::string input;
    std::string truth;   // optional complete table, row-aligned
    std::string out;     // aligned CSV
    std::string report;  // metrics JSON

    std::optional<double> theta;
    bool tune_theta = false;
    double theta_percentile = 95.0;

    std::optional<std::size_t> beta;
    bool tune_beta = false;
    std::size_t beta_lower = 0;

    std::optional<double> delta;
    bool tune_delta = false;

    WeightParams weights;
    Strategy strategy = Strategy::expect;
    std::uint64_t seed = 0;
    std::size_t max_retries = default_max_retries;

    void validate() const
    {
        if (theta && tune_theta) throw config_error("give either --theta or --tune-theta, not both");
        if (!theta && !tune_theta) throw config_error("one of --theta or --tune-theta is required");
        if (beta && tune_beta) throw config_error("give either --beta or --tune-beta, not both");
        if (!beta && !tune_beta) throw config_error("one of --beta or --tune-beta is required");
        if (delta && tune_delta) throw config_error("give either --delta or --tune-delta, not both");
        weights.validate();
    }
};

struct RunResult {
    int exit_code = exit_ok;
    std::string message;
    std::string aligned_csv;
    nlohmann::ordered_json metrics;
};

inline nlohmann::ordered_json number_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

/// Full pipeline on an in-memory table. Throws the library error types.
inline RunResult run_on_table(const RunConfig& cfg, const SeriesTable& table, const GroundTruth* truth = nullptr)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    ConstraintConfig cc;
    cc.theta = cfg.tune_theta ? determine_theta(table, cfg.theta_percentile) : *cfg.theta;
    cc.beta = cfg.tune_beta ? determine_beta(table, cc.theta, cfg.beta_lower).beta : *cfg.beta;
    cc.delta = cfg.delta.value_or(std::numeric_limits<double>::infinity());
    WeightParams w = cfg.weights;
    if (cfg.tune_delta) {
        auto tuned = determine_weights_and_delta(table, cc.theta, cc.beta, default_weight_grid(), cfg.strategy,
                                                 cfg.seed);
        cc.delta = tuned.delta;
        w = WeightParams{tuned.k1, tuned.k2, tuned.b, tuned.c};
    }
    cc.validate();

    const auto rc = generate_candidates(table, cc);
    const auto alignment = compose(cfg.strategy, rc, cc, table, w, cfg.seed, cfg.max_retries);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);

    RunResult res;
    res.aligned_csv = format_alignment(alignment, table, w);
    auto& j = res.metrics;
    j["strategy"] = std::string(to_string(cfg.strategy));
    j["theta"] = cc.theta;
    j["beta"] = cc.beta;
    j["delta"] = number_or_null(cc.delta);
    j["k1"] = w.k1;
    j["k2"] = w.k2;
    j["b"] = w.b;
    j["c"] = w.c;
    j["seed"] = cfg.seed;
    j["candidate_count"] = rc.size();
    j["aligned_tuple_count"] = alignment.size();
    j["total_weight"] = alignment.total_weight;
    j["delta_score"] = alignment.report.delta;
    j["retries_used"] = alignment.retries_used;
    j["exhausted"] = alignment.exhausted;
    j["wall_time_ms"] = elapsed.count();
    if (truth) {
        auto s = score(alignment, *truth);
        j["precision"] = s.precision;
        j["recall"] = s.recall;
        j["f1"] = s.f1;
    }
    if (alignment.exhausted) {
        res.exit_code = exit_exhausted;
        res.message = "no alignment satisfied the model constraint; best attempt written";
    }
    return res;
}

/// File-level pipeline; maps failures to exit codes and writes whatever artifacts exist.
inline RunResult run(const RunConfig& cfg)
{
    RunResult res;
    try {
        cfg.validate();
        const auto table = ingest(cfg.input);
        std::optional<GroundTruth> truth;
        if (!cfg.truth.empty()) {
            truth = row_aligned_truth(ingest(cfg.truth));
            if (truth->complete.series_count() != table.series_count() ||
                truth->complete.row_count() != table.row_count())
                throw data_error("ground truth shape does not match input table");
        }
        res = run_on_table(cfg, table, truth ? &*truth : nullptr);
    } catch (const config_error& e) {
        res.exit_code = exit_config;
        res.message = e.what();
        return res;
    } catch (const size_error& e) {
        res.exit_code = exit_size;
        res.message = e.what();
        return res;
    } catch (const data_error& e) {
        res.exit_code = exit_data;
        res.message = e.what();
        return res;
    } catch (const structural_error& e) {
        res.exit_code = exit_data;
        res.message = e.what();
        return res;
    }
    try {
        if (!cfg.out.empty()) write_file(cfg.out, res.aligned_csv);
        if (!cfg.report.empty()) write_file(cfg.report, res.metrics.dump(2) + "\n");
    } catch (const data_error& e) {
        res.exit_code = exit_data;
        res.message = e.what();
    }
    return res;
}

} // namespace tsalign

#endif // TSALIGN_PIPELINE_HPP
