// Command-line front end: Monte Carlo experiments, critical-value table
// generation, and empirical CSV runs.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 replication
// abort threshold exceeded.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "scct/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitAbort = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 42;
    std::size_t reps = 0;     // 0 = keep config/preset default
    double alpha = 0.05;
    bool alpha_set = false;
    std::vector<std::string> procedures;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON experiment configuration file");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--reps", o.reps, "Monte Carlo replications");
    cmd->add_option("--alpha", o.alpha, "nominal significance level")
        ->check(CLI::Range(1e-6, 1.0 - 1e-6))
        ->each([&o](const std::string&) { o.alpha_set = true; });
    cmd->add_option("--procedures", o.procedures, "procedures to run")->delimiter(',');
    cmd->add_option("--out", o.out_path, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "output format: csv, json, markdown")
        ->check(CLI::IsMember({"csv", "json", "markdown"}));
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
}

nlohmann::json load_config(const CommonOpts& o, const std::string& default_kind) {
    nlohmann::json j;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw scct::ConfigError("cannot open config file: " + o.config_path);
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw scct::ConfigError("config parse error: " + std::string(e.what()));
        }
    }
    if (!j.contains("kind")) j["kind"] = default_kind;
    if (j.at("kind").get<std::string>() != default_kind)
        throw scct::ConfigError("config kind does not match subcommand");
    return j;
}

scct::ExperimentConfig make_config(const CommonOpts& o, const std::string& kind) {
    nlohmann::json j = load_config(o, kind);
    // CLI flags override the file
    j["seed"] = o.seed;
    if (o.reps > 0) j["replications"] = o.reps;
    if (o.alpha_set || !j.contains("alpha")) j["alpha"] = o.alpha;
    if (!o.procedures.empty()) j["procedures"] = o.procedures;
    j["threads"] = o.threads;
    return scct::parse_experiment_config(j);
}

void write_result(const scct::ExperimentResult& result, const CommonOpts& o) {
    if (o.out_path.empty()) {
        scct::emit_tables(result, o.format, std::cout);
        return;
    }
    std::ofstream out(o.out_path);
    if (!out) throw scct::DataError("cannot write output file: " + o.out_path);
    scct::emit_tables(result, o.format, out);
}

int run_guarded(const std::function<void()>& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const scct::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const scct::AbortThresholdError& e) {
        std::cerr << "aborted replications: " << e.what() << "\n";
        return kExitAbort;
    } catch (const scct::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential Cauchy combination multiple-testing toolkit"};
    app.require_subcommand(1);

    CommonOpts stat_o, db_o, alpha_o, cv_o, det_o, ta_o, cal_o;
    std::string det_csv, ta_csv, cal_csv, cal_out = "calibrated_dgp.json";

    auto* mc_stats = app.add_subcommand("mc-stats", "statistic-vector Monte Carlo");
    add_common(mc_stats, stat_o);
    auto* mc_db = app.add_subcommand("mc-driftburst", "drift-burst Monte Carlo");
    add_common(mc_db, db_o);
    auto* mc_alpha = app.add_subcommand("mc-alpha", "factor-alpha Monte Carlo");
    add_common(mc_alpha, alpha_o);
    auto* cv_table = app.add_subcommand("cv-table", "resampling critical-value table");
    add_common(cv_table, cv_o);

    auto* detect = app.add_subcommand("detect-driftburst", "drift-burst test on a tick CSV");
    detect->add_option("csv", det_csv, "tick file: epoch-seconds, log-price")->required();
    add_common(detect, det_o);

    auto* test_alphas = app.add_subcommand("test-alphas", "alpha tests on a factor panel CSV");
    test_alphas->add_option("csv", ta_csv, "French-style monthly panel")->required();
    add_common(test_alphas, ta_o);

    auto* calibrate = app.add_subcommand("calibrate-dgp", "calibrate a DGP from a panel CSV");
    calibrate->add_option("csv", cal_csv, "French-style monthly panel")->required();
    calibrate->add_option("--out", cal_out, "output JSON parameter file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (mc_stats->parsed())
        return run_guarded([&] {
            write_result(scct::run_experiment(make_config(stat_o, "stat-mc")), stat_o);
        });

    if (mc_db->parsed())
        return run_guarded([&] {
            write_result(scct::run_experiment(make_config(db_o, "driftburst-mc")), db_o);
        });

    if (mc_alpha->parsed())
        return run_guarded([&] {
            write_result(scct::run_experiment(make_config(alpha_o, "alpha-mc")), alpha_o);
        });

    if (cv_table->parsed())
        return run_guarded([&] {
            const scct::ExperimentConfig cfg = make_config(cv_o, "cv-table");
            const scct::CvTable table =
                scct::build_cv_table(cfg.cv_theta_grid, cfg.cv_d_grid, cfg.cv_alphas,
                                     cfg.cv_R, cfg.cv_burn_in, cfg.seed);
            const nlohmann::json j = scct::cv_table_to_json(table);
            if (cv_o.out_path.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                std::ofstream out(cv_o.out_path);
                if (!out) throw scct::DataError("cannot write output file: " + cv_o.out_path);
                out << j.dump(2) << "\n";
            }
        });

    if (detect->parsed())
        return run_guarded([&] {
            scct::CleaningLog log;
            const scct::PricePath path =
                scct::ingest_tick_csv(det_csv, scct::CleaningRules{}, &log);
            std::cerr << "cleaning: read " << log.rows_read << ", dropped "
                      << log.dropped_session << " off-session, " << log.dropped_duplicates
                      << " duplicates, " << log.dropped_outliers << " outliers; filled "
                      << log.filled_gaps << " gaps\n";
            const scct::DriftBurstConfig cfg;
            const auto days = scct::db_sequence(path, cfg);
            const double alpha = det_o.alpha_set ? det_o.alpha : 0.05;
            std::ostream* out = &std::cout;
            std::ofstream file;
            if (!det_o.out_path.empty()) {
                file.open(det_o.out_path);
                if (!file) throw scct::DataError("cannot write output file: " + det_o.out_path);
                out = &file;
            }
            *out << "day,grid_seconds,statistic,rejected_scc\n";
            for (std::size_t day = 0; day < days.size(); ++day) {
                const auto& seq = days[day];
                const scct::PValueSet pv = scct::two_sided_pvalues(
                    seq.stats, scct::DistributionKind::normal());
                const scct::RejectionReport rep = scct::scc_procedure(
                    pv, scct::CauchyWeights::uniform(pv.size()), alpha);
                for (std::size_t g = 0; g < seq.stats.size(); ++g)
                    *out << (day + 1) << "," << seq.grid_seconds[g] << "," << seq.stats[g]
                         << "," << static_cast<int>(rep.rejected[g]) << "\n";
            }
        });

    if (test_alphas->parsed())
        return run_guarded([&] {
            const scct::FactorPanel panel = scct::ingest_panel_csv(ta_csv);
            const scct::AlphaFit fit = scct::fit_alphas(panel);
            const scct::PValueSet pv = scct::alpha_pvalues(fit);
            const double alpha = ta_o.alpha_set ? ta_o.alpha : 0.05;
            const scct::RejectionReport rep =
                scct::scc_procedure(pv, scct::CauchyWeights::uniform(pv.size()), alpha);
            const auto screening =
                scct::screening_procedure(fit, 1.06, panel.T(), panel.d());
            std::ostream* out = &std::cout;
            std::ofstream file;
            if (!ta_o.out_path.empty()) {
                file.open(ta_o.out_path);
                if (!file) throw scct::DataError("cannot write output file: " + ta_o.out_path);
                out = &file;
            }
            *out << "asset,alpha_hat,se,tstat,pvalue,rejected_scc,screened\n";
            for (std::size_t j = 0; j < panel.d(); ++j) {
                const std::string label =
                    j < panel.asset_labels.size() ? panel.asset_labels[j] : std::to_string(j);
                const double t = fit.degenerate[j] ? 0.0 : fit.a_hat[j] / fit.se_a[j];
                *out << label << "," << fit.a_hat[j] << "," << fit.se_a[j] << "," << t << ","
                     << pv.raw[j] << "," << static_cast<int>(rep.rejected[j]) << ","
                     << static_cast<int>(screening.report.rejected[j]) << "\n";
            }
            std::cerr << "screening J0 = " << screening.J0 << "\n";
        });

    if (calibrate->parsed())
        return run_guarded([&] {
            const scct::FactorPanel panel = scct::ingest_panel_csv(cal_csv);
            const scct::CalibratedDgp dgp = scct::calibrate_dgp(panel, cal_csv);
            std::ofstream out(cal_out);
            if (!out) throw scct::DataError("cannot write output file: " + cal_out);
            out << scct::dgp_to_json(dgp).dump(2) << "\n";
            std::cerr << "calibrated DGP written to " << cal_out << "\n";
        });

    return kExitConfig;
}
