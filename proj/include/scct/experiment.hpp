#pragma once
// Monte Carlo experiment orchestration: replication engine with per-replication
// random streams (results independent of thread count), metric aggregation
// (FWER, global power, successful detection rate), and table emission.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "scct/alphatest.hpp"
#include "scct/ar1.hpp"
#include "scct/driftburst.hpp"
#include "scct/heston.hpp"
#include "scct/io.hpp"
#include "scct/procedures.hpp"
#include "scct/resampling.hpp"
#include "scct/statgen.hpp"

namespace scct {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AbortThresholdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------- scoring ----------

struct ReplicationScore {
    bool any_false_rejection = false;
    bool any_rejection = false;
    std::size_t true_detections = 0;   // |F ∩ R|
    std::size_t false_detections = 0;  // |T ∩ R|
    std::size_t n_false_hypotheses = 0;  // |F|
};

inline ReplicationScore score_replication(const RejectionReport& report,
                                          const std::vector<char>& truth) {
    if (report.rejected.size() != truth.size())
        throw std::invalid_argument("score_replication: length mismatch");
    ReplicationScore s;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) ++s.n_false_hypotheses;
        if (!report.rejected[i]) continue;
        s.any_rejection = true;
        if (truth[i])
            ++s.true_detections;
        else {
            ++s.false_detections;
            s.any_false_rejection = true;
        }
    }
    return s;
}

// ---------- aggregated metrics ----------

struct ProcMetrics {
    std::size_t n = 0;
    std::size_t any_false = 0;
    std::size_t any_rejection = 0;
    double detection_sum = 0.0;       // sum of |F∩R|/|F| where |F| > 0
    std::size_t detection_n = 0;
    double false_det_sum = 0.0;       // sum of |T∩R|

    void add(const ReplicationScore& s) {
        ++n;
        any_false += s.any_false_rejection;
        any_rejection += s.any_rejection;
        if (s.n_false_hypotheses > 0) {
            detection_sum += static_cast<double>(s.true_detections) /
                             static_cast<double>(s.n_false_hypotheses);
            ++detection_n;
        }
        false_det_sum += static_cast<double>(s.false_detections);
    }
    void merge(const ProcMetrics& o) {
        n += o.n;
        any_false += o.any_false;
        any_rejection += o.any_rejection;
        detection_sum += o.detection_sum;
        detection_n += o.detection_n;
        false_det_sum += o.false_det_sum;
    }
    double fwer_pct() const { return n ? 100.0 * any_false / static_cast<double>(n) : 0.0; }
    double power_pct() const { return n ? 100.0 * any_rejection / static_cast<double>(n) : 0.0; }
    double detection_pct() const {
        return detection_n ? 100.0 * detection_sum / static_cast<double>(detection_n) : 0.0;
    }
    double avg_false_detections() const {
        return n ? false_det_sum / static_cast<double>(n) : 0.0;
    }
};

struct ResultRow {
    std::string label;      // DGP / scenario / day identifier
    std::string procedure;
    ProcMetrics metrics;
    double mean_theta = std::nan("");  // mean fitted AR(1) of the statistic sequence
};

struct ExperimentResult {
    std::string kind;
    std::vector<ResultRow> rows;
    std::size_t replications = 0;
    std::size_t aborted = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    double runtime_seconds = 0.0;
};

// ---------- configuration ----------

struct ExperimentConfig {
    std::string kind;  // stat-mc | driftburst-mc | alpha-mc | cv-table
    std::vector<std::string> procedures;
    std::size_t replications = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0 = hardware concurrency

    // stat-mc
    CorrelationSpec corr = CorrelationSpec::exponential(100, 0.2);
    SignalSpec signal;

    // driftburst-mc
    std::string db_scenario = "null";  // null | flash-crash | expansion
    std::size_t cv_replications = 100000;

    // alpha-mc
    std::string dgp_file;
    bool with_signals = false;
    std::size_t panel_T = 240;
    std::size_t panel_d = 100;

    // cv-table
    std::size_t cv_R = 100000;
    std::size_t cv_burn_in = 0;
    std::vector<double> cv_alphas = {0.10, 0.05, 0.01};
    std::vector<double> cv_theta_grid = CvTable::default_theta_grid();
    std::vector<std::size_t> cv_d_grid = CvTable::default_d_grid();

    nlohmann::json raw;  // original JSON for hashing
};

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    ExperimentConfig c;
    c.raw = j;
    try {
        if (!j.contains("kind")) throw ConfigError("config: missing 'kind'");
        c.kind = j.at("kind").get<std::string>();
        if (c.kind != "stat-mc" && c.kind != "driftburst-mc" && c.kind != "alpha-mc" &&
            c.kind != "cv-table")
            throw ConfigError("config: unknown kind '" + c.kind + "'");
        c.replications = j.value("replications", c.replications);
        if (c.replications < 1) throw ConfigError("config: replications >= 1 required");
        c.alpha = j.value("alpha", c.alpha);
        if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("config: alpha in (0,1)");
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
        if (j.contains("procedures")) j.at("procedures").get_to(c.procedures);

        if (j.contains("stat")) {
            const auto& s = j.at("stat");
            const std::string model = s.value("model", "exponential");
            const std::size_t d = s.value("d", std::size_t{100});
            const double theta = s.value("theta", 0.2);
            if (model == "exponential")
                c.corr = CorrelationSpec::exponential(d, theta);
            else if (model == "polynomial")
                c.corr = CorrelationSpec::polynomial(d, theta);
            else if (model == "mixture")
                c.corr = CorrelationSpec::mixture(d, theta, s.value("theta2", 0.0));
            else if (model == "block-diagonal")
                c.corr = CorrelationSpec::block_diagonal(d, theta,
                                                         s.value("block", std::size_t{10}));
            else
                throw ConfigError("config: unknown correlation model '" + model + "'");
            c.signal.count = s.value("signals", std::size_t{0});
            c.signal.strength = s.value("strength", 0.0);
            if (c.signal.count > 0 && c.signal.strength == 0.0)
                c.signal.strength = default_signal_strength(d, c.signal.count);
            c.signal.placement = (s.value("placement", std::string("random")) == "first-k")
                                     ? SignalPlacement::FirstK
                                     : SignalPlacement::Random;
        }
        if (j.contains("driftburst")) {
            const auto& s = j.at("driftburst");
            c.db_scenario = s.value("scenario", c.db_scenario);
            if (c.db_scenario != "null" && c.db_scenario != "flash-crash" &&
                c.db_scenario != "expansion")
                throw ConfigError("config: unknown drift-burst scenario '" + c.db_scenario + "'");
            c.cv_replications = s.value("cv_replications", c.cv_replications);
        }
        if (j.contains("alpha_dgp")) {
            const auto& s = j.at("alpha_dgp");
            c.dgp_file = s.value("file", c.dgp_file);
            c.with_signals = s.value("with_signals", c.with_signals);
            c.panel_T = s.value("T", c.panel_T);
            c.panel_d = s.value("d", c.panel_d);
        }
        if (j.contains("cv")) {
            const auto& s = j.at("cv");
            c.cv_R = s.value("R", c.cv_R);
            c.cv_burn_in = s.value("burn_in", c.cv_burn_in);
            if (s.contains("alphas")) s.at("alphas").get_to(c.cv_alphas);
            if (s.contains("theta_grid")) s.at("theta_grid").get_to(c.cv_theta_grid);
            if (s.contains("d_grid")) s.at("d_grid").get_to(c.cv_d_grid);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: malformed JSON value: ") + e.what());
    }
    return c;
}

inline std::string config_hash(const ExperimentConfig& c) {
    return fnv1a_hex(c.raw.is_null() ? c.kind : c.raw.dump());
}

// ---------- replication engine ----------

namespace detail {

template <typename Fn>
inline void parallel_for(std::size_t n, unsigned threads, Fn&& body) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned use = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    pool.reserve(use);
    for (unsigned t = 0; t < use; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

inline void check_abort_threshold(std::size_t aborted, std::size_t S) {
    if (aborted > 0 && static_cast<double>(aborted) > 0.001 * static_cast<double>(S))
        throw AbortThresholdError("replication abort threshold exceeded: " +
                                  std::to_string(aborted) + " of " + std::to_string(S));
}

}  // namespace detail

// Dispatch a procedure by name on a statistic vector with a given null law.
// Procedures that need raw statistics (gumbel, resampling) get them directly.
inline RejectionReport run_procedure(const std::string& name, const std::vector<double>& stats,
                                     const PValueSet& pvals, double alpha,
                                     const CvTable* cv_table, RngStream& rng) {
    if (name == "scc")
        return scc_procedure(pvals, CauchyWeights::uniform(pvals.size()), alpha);
    if (name == "bonferroni") return bonferroni(pvals, alpha);
    if (name == "holm") return holm(pvals, alpha);
    if (name == "hochberg") return hochberg(pvals, alpha);
    if (name == "hommel") return hommel(pvals, alpha);
    if (name == "gumbel") return gumbel_procedure(stats, alpha);
    if (name == "resampling") return resampling_procedure(stats, alpha, cv_table, rng);
    throw ConfigError("unknown procedure '" + name + "'");
}

inline std::vector<std::string> default_stat_procedures() {
    return {"bonferroni", "holm", "hochberg", "hommel", "gumbel", "scc"};
}

inline std::vector<std::string> default_driftburst_procedures() {
    return {"bonferroni", "holm", "hochberg", "hommel", "gumbel", "resampling", "scc"};
}

inline std::vector<std::string> default_alpha_procedures() {
    return {"bonferroni", "holm", "hochberg", "hommel", "gumbel", "screening", "scc"};
}

// ----- stat-mc -----

inline ExperimentResult run_stat_experiment(const ExperimentConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    auto procs = cfg.procedures.empty() ? default_stat_procedures() : cfg.procedures;
    const Matrix chol = correlation_cholesky(cfg.corr);
    const std::size_t S = cfg.replications;

    struct RepOut {
        std::vector<ReplicationScore> scores;
        bool aborted = false;
    };
    std::vector<RepOut> reps(S);
    detail::parallel_for(S, cfg.threads, [&](std::size_t r) {
        try {
            RngStream rng(cfg.seed, r);
            const GeneratedStats g = gen_statistics_chol(chol, cfg.signal, rng);
            const PValueSet pv = two_sided_pvalues(g.stats, DistributionKind::normal());
            reps[r].scores.reserve(procs.size());
            for (const auto& name : procs) {
                const RejectionReport rep = run_procedure(name, g.stats, pv, cfg.alpha,
                                                          nullptr, rng);
                reps[r].scores.push_back(score_replication(rep, g.truth));
            }
        } catch (const std::exception&) {
            reps[r].aborted = true;
        }
    });

    ExperimentResult result;
    result.kind = "stat-mc";
    result.replications = S;
    result.seed = cfg.seed;
    result.config_hash = config_hash(cfg);
    std::vector<ProcMetrics> metrics(procs.size());
    for (std::size_t r = 0; r < S; ++r) {
        if (reps[r].aborted) {
            ++result.aborted;
            continue;
        }
        for (std::size_t p = 0; p < procs.size(); ++p) metrics[p].add(reps[r].scores[p]);
    }
    detail::check_abort_threshold(result.aborted, S);

    std::ostringstream label;
    label << corr_model_name(cfg.corr.model) << " theta=" << cfg.corr.theta;
    if (cfg.corr.model == CorrModel::Mixture) label << "," << cfg.corr.theta2;
    for (std::size_t p = 0; p < procs.size(); ++p)
        result.rows.push_back({label.str(), procs[p], metrics[p], std::nan("")});
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

// ----- driftburst-mc -----

inline CvTable build_driftburst_cv_table(const ExperimentConfig& cfg, std::size_t d) {
    return build_cv_table(CvTable::default_theta_grid(), {d}, {cfg.alpha},
                          cfg.cv_replications, 0, cfg.seed ^ 0x5cc7ab1eULL);
}

inline ExperimentResult run_driftburst_experiment(const ExperimentConfig& cfg,
                                                  const CvTable* cv_table_in = nullptr) {
    const auto t_start = std::chrono::steady_clock::now();
    auto procs = cfg.procedures.empty() ? default_driftburst_procedures() : cfg.procedures;
    const std::size_t S = cfg.replications;
    const bool expansion = (cfg.db_scenario == "expansion");
    const std::size_t n_days = expansion ? 3 : 1;
    const HestonParams params;
    const DriftBurstConfig db_cfg;

    const bool needs_cv =
        std::find(procs.begin(), procs.end(), std::string("resampling")) != procs.end();
    CvTable local_table;
    const CvTable* cv_table = cv_table_in;
    if (needs_cv && cv_table == nullptr) {
        local_table = build_driftburst_cv_table(cfg, 341);
        cv_table = &local_table;
    }

    BurstSpec burst = BurstSpec::none();
    if (cfg.db_scenario == "flash-crash") burst = BurstSpec::flash_crash();
    if (expansion) burst = BurstSpec::persistent_expansion();

    struct RepOut {
        // [day][procedure]
        std::vector<std::vector<ReplicationScore>> scores;
        std::vector<double> theta;  // fitted AR(1) per day
        bool aborted = false;
    };
    std::vector<RepOut> reps(S);
    detail::parallel_for(S, cfg.threads, [&](std::size_t r) {
        try {
            RngStream rng(cfg.seed, r);
            const PricePath path = simulate_price_path(params, burst, 0.5, n_days, rng);
            reps[r].scores.resize(n_days);
            reps[r].theta.resize(n_days);
            for (std::size_t day = 0; day < n_days; ++day) {
                const DbStatSequence seq =
                    db_sequence_day(day_slice(path.noisy, day), db_cfg);
                const std::vector<char> truth = truth_on_grid(path, day, seq);
                reps[r].theta[day] = acf1(seq.stats);
                const PValueSet pv =
                    two_sided_pvalues(seq.stats, DistributionKind::normal());
                reps[r].scores[day].reserve(procs.size());
                for (const auto& name : procs) {
                    const RejectionReport rep =
                        run_procedure(name, seq.stats, pv, cfg.alpha, cv_table, rng);
                    reps[r].scores[day].push_back(score_replication(rep, truth));
                }
            }
        } catch (const std::exception&) {
            reps[r].aborted = true;
        }
    });

    ExperimentResult result;
    result.kind = "driftburst-mc";
    result.replications = S;
    result.seed = cfg.seed;
    result.config_hash = config_hash(cfg);
    std::vector<std::vector<ProcMetrics>> metrics(n_days,
                                                  std::vector<ProcMetrics>(procs.size()));
    std::vector<double> theta_sum(n_days, 0.0);
    std::size_t ok = 0;
    for (std::size_t r = 0; r < S; ++r) {
        if (reps[r].aborted) {
            ++result.aborted;
            continue;
        }
        ++ok;
        for (std::size_t day = 0; day < n_days; ++day) {
            theta_sum[day] += reps[r].theta[day];
            for (std::size_t p = 0; p < procs.size(); ++p)
                metrics[day][p].add(reps[r].scores[day][p]);
        }
    }
    detail::check_abort_threshold(result.aborted, S);

    for (std::size_t day = 0; day < n_days; ++day) {
        std::string label = cfg.db_scenario;
        if (expansion) label += "/day" + std::to_string(day + 1);
        const double mean_theta = ok ? theta_sum[day] / static_cast<double>(ok) : std::nan("");
        for (std::size_t p = 0; p < procs.size(); ++p)
            result.rows.push_back({label, procs[p], metrics[day][p], mean_theta});
    }
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

// ----- alpha-mc -----

inline ExperimentResult run_alpha_experiment(const ExperimentConfig& cfg,
                                             const CalibratedDgp& dgp) {
    const auto t_start = std::chrono::steady_clock::now();
    auto procs = cfg.procedures.empty() ? default_alpha_procedures() : cfg.procedures;
    const std::size_t S = cfg.replications;
    const std::size_t T = cfg.panel_T, d = cfg.panel_d;

    struct RepOut {
        std::vector<ReplicationScore> scores;
        bool aborted = false;
    };
    std::vector<RepOut> reps(S);
    detail::parallel_for(S, cfg.threads, [&](std::size_t r) {
        try {
            RngStream rng(cfg.seed, r);
            const SimulatedPanel sp = simulate_panel(dgp, T, d, cfg.with_signals, rng);
            const AlphaFit fit = fit_alphas(sp.panel);
            const std::vector<double> tstats = alpha_tstats(fit);
            const PValueSet pv = alpha_pvalues(fit);
            reps[r].scores.reserve(procs.size());
            for (const auto& name : procs) {
                RejectionReport rep;
                if (name == "screening")
                    rep = screening_procedure(fit, 1.06, T, d).report;
                else
                    rep = run_procedure(name, tstats, pv, cfg.alpha, nullptr, rng);
                reps[r].scores.push_back(score_replication(rep, sp.truth));
            }
        } catch (const std::exception&) {
            reps[r].aborted = true;
        }
    });

    ExperimentResult result;
    result.kind = "alpha-mc";
    result.replications = S;
    result.seed = cfg.seed;
    result.config_hash = config_hash(cfg);
    std::vector<ProcMetrics> metrics(procs.size());
    for (std::size_t r = 0; r < S; ++r) {
        if (reps[r].aborted) {
            ++result.aborted;
            continue;
        }
        for (std::size_t p = 0; p < procs.size(); ++p) metrics[p].add(reps[r].scores[p]);
    }
    detail::check_abort_threshold(result.aborted, S);

    const std::string label =
        (dgp.name.empty() ? "alpha" : dgp.name) + (cfg.with_signals ? "/alt" : "/null");
    for (std::size_t p = 0; p < procs.size(); ++p)
        result.rows.push_back({label, procs[p], metrics[p], std::nan("")});
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.kind == "stat-mc") return run_stat_experiment(cfg);
    if (cfg.kind == "driftburst-mc") return run_driftburst_experiment(cfg);
    if (cfg.kind == "alpha-mc") {
        if (cfg.dgp_file.empty()) throw ConfigError("alpha-mc requires alpha_dgp.file");
        std::ifstream in(cfg.dgp_file);
        if (!in) throw ConfigError("cannot open DGP file: " + cfg.dgp_file);
        nlohmann::json j;
        in >> j;
        return run_alpha_experiment(cfg, dgp_from_json(j));
    }
    throw ConfigError("run_experiment: unsupported kind '" + cfg.kind + "'");
}

// ---------- table emission ----------

namespace detail {

inline std::string fmt2(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

}  // namespace detail

inline void emit_tables(const ExperimentResult& result, const std::string& format,
                        std::ostream& out) {
    if (format == "json") {
        nlohmann::json j;
        j["kind"] = result.kind;
        j["replications"] = result.replications;
        j["aborted"] = result.aborted;
        j["seed"] = result.seed;
        j["config_hash"] = result.config_hash;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : result.rows) {
            nlohmann::json row;
            row["label"] = r.label;
            row["procedure"] = r.procedure;
            row["fwer_pct"] = r.metrics.fwer_pct();
            row["power_pct"] = r.metrics.power_pct();
            row["detection_pct"] = r.metrics.detection_pct();
            row["avg_false_detections"] = r.metrics.avg_false_detections();
            if (!std::isnan(r.mean_theta)) row["mean_theta"] = r.mean_theta;
            rows.push_back(row);
        }
        j["rows"] = rows;
        out << j.dump(2) << "\n";
        return;
    }
    const bool markdown = (format == "markdown");
    if (format != "csv" && !markdown)
        throw ConfigError("emit_tables: unknown format '" + format + "'");
    const char* sep = markdown ? " | " : ",";
    if (markdown) out << "| ";
    out << "label" << sep << "procedure" << sep << "fwer_pct" << sep << "power_pct" << sep
        << "detection_pct" << sep << "avg_false_detections" << sep << "mean_theta";
    if (markdown) out << " |";
    out << "\n";
    if (markdown) out << "|---|---|---|---|---|---|---|\n";
    for (const auto& r : result.rows) {
        if (markdown) out << "| ";
        out << r.label << sep << r.procedure << sep << detail::fmt2(r.metrics.fwer_pct())
            << sep << detail::fmt2(r.metrics.power_pct()) << sep
            << detail::fmt2(r.metrics.detection_pct()) << sep
            << detail::fmt2(r.metrics.avg_false_detections()) << sep
            << detail::fmt2(r.mean_theta);
        if (markdown) out << " |";
        out << "\n";
    }
    out << (markdown ? "\n| config_hash " : "# config_hash,") << (markdown ? "| " : "")
        << result.config_hash << (markdown ? " |" : "") << "\n";
}

}  // namespace scct
