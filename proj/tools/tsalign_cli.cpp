// Command-line front end: align, tune, synth, score, bench.

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <tsalign/tsalign.hpp>

namespace {

using nlohmann::ordered_json;
using namespace tsalign;

void add_weight_flags(CLI::App* cmd, WeightParams& w)
{
    cmd->add_option("--k1", w.k1, "importance of value completeness")->capture_default_str();
    cmd->add_option("--k2", w.k2, "importance of positional compactness")->capture_default_str();
    cmd->add_option("--b", w.b, "numerator bias (> 0)")->capture_default_str();
    cmd->add_option("--c", w.c, "denominator bias (> 0)")->capture_default_str();
}

int report_error(const std::string& what, int code)
{
    std::cerr << "error: " << what << "\n";
    return code;
}

template <class F>
int guarded(F&& f)
{
    try {
        return f();
    } catch (const config_error& e) {
        return report_error(e.what(), exit_config);
    } catch (const size_error& e) {
        return report_error(e.what(), exit_size);
    } catch (const data_error& e) {
        return report_error(e.what(), exit_data);
    } catch (const structural_error& e) {
        return report_error(e.what(), exit_data);
    }
}

void emit_json(const ordered_json& j, const std::string& path)
{
    if (path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_file(path, j.dump(2) + "\n");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Constraint-based alignment of incomplete multivariate time series"};
    app.require_subcommand(1);

    // align
    RunConfig run_cfg;
    std::string delta_text;
    std::string strategy_text = "expect";
    double theta_value = 0.0;
    std::size_t beta_value = 0;
    auto* align = app.add_subcommand("align", "align the series of a wide CSV file");
    align->add_option("input", run_cfg.input, "wide CSV (t_1,v_1,...,t_m,v_m)")->required();
    auto* theta_opt = align->add_option("--theta", theta_value, "time constraint");
    align->add_flag("--tune-theta", run_cfg.tune_theta, "determine theta from same-row timestamp gaps");
    align->add_option("--theta-percentile", run_cfg.theta_percentile, "percentile for --tune-theta")
        ->capture_default_str();
    auto* beta_opt = align->add_option("--beta", beta_value, "position constraint");
    align->add_flag("--tune-beta", run_cfg.tune_beta, "determine beta from candidate index spreads");
    align->add_option("--beta-lower", run_cfg.beta_lower, "lower bound for --tune-beta")->capture_default_str();
    align->add_option("--delta", delta_text, "model constraint (number or 'inf'; default inf)");
    align->add_flag("--tune-delta", run_cfg.tune_delta, "determine delta, k1, k2 over the default grid");
    add_weight_flags(align, run_cfg.weights);
    align->add_option("--strategy", strategy_text, "exact | setpack | greedy | expect")->capture_default_str();
    align->add_option("--seed", run_cfg.seed, "tie-break seed")->capture_default_str();
    align->add_option("--max-retries", run_cfg.max_retries, "reseeded retries on delta failure")
        ->capture_default_str();
    align->add_option("--truth", run_cfg.truth, "complete table, row-aligned with the input");
    align->add_option("--out", run_cfg.out, "aligned CSV output");
    align->add_option("--report", run_cfg.report, "metrics JSON output");

    // tune
    std::string tune_input, tune_report, tune_strategy = "expect";
    double tune_pct = 95.0;
    std::size_t tune_beta_lower = 0, tune_runs = 3;
    std::uint64_t tune_seed = 0;
    auto* tune = app.add_subcommand("tune", "determine theta, beta, delta and weight factors");
    tune->add_option("input", tune_input, "wide CSV")->required();
    tune->add_option("--theta-percentile", tune_pct)->capture_default_str();
    tune->add_option("--beta-lower", tune_beta_lower)->capture_default_str();
    tune->add_option("--strategy", tune_strategy)->capture_default_str();
    tune->add_option("--seed", tune_seed)->capture_default_str();
    tune->add_option("--runs", tune_runs, "seeds per grid point")->capture_default_str();
    tune->add_option("--report", tune_report, "JSON output (stdout if omitted)");

    // synth
    std::size_t syn_n = 1000, syn_m = 4;
    std::uint64_t syn_seed = 0;
    double syn_jitter = 0.25, syn_tick = 1.0, syn_rate = 0.0;
    std::string syn_model = "ar1", syn_target = "values", syn_out, syn_truth;
    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark table");
    synth->add_option("--n", syn_n, "rows")->capture_default_str();
    synth->add_option("--m", syn_m, "series")->capture_default_str();
    synth->add_option("--seed", syn_seed)->capture_default_str();
    synth->add_option("--jitter", syn_jitter, "uniform timestamp jitter half-width")->capture_default_str();
    synth->add_option("--tick", syn_tick, "base sampling interval")->capture_default_str();
    synth->add_option("--model", syn_model, "ar1 | sine | walk")->capture_default_str();
    synth->add_option("--missing-rate", syn_rate, "MCAR rate")->capture_default_str();
    synth->add_option("--missing-target", syn_target, "values | timestamps | both")->capture_default_str();
    synth->add_option("--out", syn_out, "table CSV (with missing cells)")->required();
    synth->add_option("--truth", syn_truth, "complete table CSV");

    // score
    std::string score_aligned, score_truth, score_input, score_report;
    WeightParams score_w;
    auto* scorecmd = app.add_subcommand("score", "score an aligned CSV against a complete table");
    scorecmd->add_option("--aligned", score_aligned)->required();
    scorecmd->add_option("--truth", score_truth)->required();
    scorecmd->add_option("--input", score_input, "aligned input table, for weight and delta");
    add_weight_flags(scorecmd, score_w);
    scorecmd->add_option("--report", score_report);

    // bench
    std::size_t bench_n = 2000, bench_m = 4, bench_seeds = 5;
    double bench_jitter = 0.35, bench_pct = 100.0;
    std::vector<double> bench_rates{0.1, 0.2, 0.3, 0.4};
    std::vector<std::string> bench_strategies{"greedy", "expect"};
    WeightParams bench_w;
    std::string bench_report;
    auto* bench = app.add_subcommand("bench", "strategies x missing rates on synthetic data");
    bench->add_option("--n", bench_n)->capture_default_str();
    bench->add_option("--m", bench_m)->capture_default_str();
    bench->add_option("--seeds", bench_seeds)->capture_default_str();
    bench->add_option("--jitter", bench_jitter)->capture_default_str();
    bench->add_option("--theta-percentile", bench_pct)->capture_default_str();
    bench->add_option("--rates", bench_rates)->capture_default_str();
    bench->add_option("--strategies", bench_strategies)->capture_default_str();
    add_weight_flags(bench, bench_w);
    bench->add_option("--report", bench_report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version requests exit 0; every other usage error is a configuration error.
        const int code = app.exit(e);
        return code == 0 ? 0 : tsalign::exit_config;
    }

    if (*align) {
        return guarded([&] {
            if (*theta_opt) run_cfg.theta = theta_value;
            if (*beta_opt) run_cfg.beta = beta_value;
            if (!delta_text.empty()) {
                if (delta_text == "inf")
                    run_cfg.delta = std::numeric_limits<double>::infinity();
                else
                    try {
                        run_cfg.delta = std::stod(delta_text);
                    } catch (const std::exception&) {
                        throw config_error("--delta must be a number or 'inf'");
                    }
            }
            run_cfg.strategy = parse_strategy(strategy_text);
            auto res = run(run_cfg);
            if (res.exit_code != exit_ok) std::cerr << (res.exit_code == exit_exhausted ? "warning: " : "error: ")
                                                    << res.message << "\n";
            if (run_cfg.report.empty() && !res.metrics.empty()) std::cout << res.metrics.dump(2) << "\n";
            return res.exit_code;
        });
    }

    if (*tune) {
        return guarded([&] {
            const auto table = ingest(tune_input);
            const auto strategy = parse_strategy(tune_strategy);
            const double theta = determine_theta(table, tune_pct);
            const auto beta = determine_beta(table, theta, tune_beta_lower);
            auto rep = determine_weights_and_delta(table, theta, beta.beta, default_weight_grid(), strategy,
                                                   tune_seed, tune_runs);
            ordered_json j;
            j["theta"] = rep.theta;
            j["beta"] = rep.beta;
            j["beta_flagged"] = beta.no_candidates;
            j["delta"] = rep.delta;
            j["k1"] = rep.k1;
            j["k2"] = rep.k2;
            j["b"] = rep.b;
            j["c"] = rep.c;
            j["grid"] = ordered_json::array();
            for (const auto& g : rep.grid)
                j["grid"].push_back(ordered_json{{"k1", g.k1}, {"k2", g.k2}, {"mean_delta", number_or_null(g.mean_delta)},
                                                 {"failed", g.failed}});
            emit_json(j, tune_report);
            return int{exit_ok};
        });
    }

    if (*synth) {
        return guarded([&] {
            auto data = generate_synthetic(syn_n, syn_m, syn_jitter, parse_value_model(syn_model), syn_seed, syn_tick);
            if (data.ambiguous_jitter) std::cerr << "warning: jitter >= tick/2, row correspondence is ambiguous\n";
            auto masked = inject_mcar(data.table, syn_rate, syn_seed + 1, parse_mask_target(syn_target));
            write_file(syn_out, format_table(masked));
            if (!syn_truth.empty()) write_file(syn_truth, format_table(data.table));
            return int{exit_ok};
        });
    }

    if (*scorecmd) {
        return guarded([&] {
            auto truth = row_aligned_truth(ingest(score_truth));
            Alignment a;
            a.tuples = parse_alignment(read_file(score_aligned));
            if (!score_input.empty()) {
                auto table = ingest(score_input);
                for (const auto& r : a.tuples) a.total_weight += weight(r, table, score_w);
                a.report = evaluate_alignment(std::span<const AlignedTuple>(a.tuples), table);
            }
            auto s = score(a, truth);
            ordered_json j;
            j["precision"] = s.precision;
            j["recall"] = s.recall;
            j["f1"] = s.f1;
            j["aligned_tuple_count"] = s.aligned_tuple_count;
            j["total_weight"] = s.total_weight;
            j["delta_score"] = s.delta;
            emit_json(j, score_report);
            return int{exit_ok};
        });
    }

    if (*bench) {
        return guarded([&] {
            ordered_json rows = ordered_json::array();
            for (double rate : bench_rates)
                for (std::size_t s = 0; s < bench_seeds; ++s) {
                    auto data = generate_synthetic(bench_n, bench_m, bench_jitter, ValueModel::ar1, s);
                    auto table = inject_mcar(data.table, rate, 1000 + s, MaskTarget::values);
                    ConstraintConfig cc;
                    cc.theta = determine_theta(table, bench_pct);
                    cc.beta = determine_beta(table, cc.theta, 0).beta;
                    const auto rc = generate_candidates(table, cc);
                    for (const auto& name : bench_strategies) {
                        const auto strategy = parse_strategy(name);
                        const auto t0 = std::chrono::steady_clock::now();
                        auto a = compose(strategy, rc, cc, table, bench_w, s);
                        const double ms =
                            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                        auto sc = score(a, data.truth);
                        rows.push_back(ordered_json{{"strategy", name},
                                                    {"missing_rate", rate},
                                                    {"seed", s},
                                                    {"theta", cc.theta},
                                                    {"beta", cc.beta},
                                                    {"candidate_count", rc.size()},
                                                    {"aligned_tuple_count", a.size()},
                                                    {"f1", sc.f1},
                                                    {"precision", sc.precision},
                                                    {"recall", sc.recall},
                                                    {"delta_score", a.report.delta},
                                                    {"wall_time_ms", ms}});
                    }
                }
            emit_json(rows, bench_report);
            return int{exit_ok};
        });
    }
    return exit_ok;
}
