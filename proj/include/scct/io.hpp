#pragma once
// CSV ingestion for empirical runs: tick files (epoch-seconds, log-price) with
// a cleaning pass, and Kenneth-French-style monthly panels; plus PricePath
// export in the same tick format.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scct/alphatest.hpp"
#include "scct/heston.hpp"

namespace scct {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CleaningRules {
    bool session_filter = true;
    double session_open = 34200.0;   // seconds into the day (09:30)
    double session_close = 57600.0;  // 16:00
    bool dedupe_timestamps = true;   // aggregate duplicates by median
    bool mad_outlier_filter = true;  // drop |p - median| > 10 * MAD
    double mad_multiplier = 10.0;
    bool forward_fill = true;        // force onto the 1-second grid
};

struct CleaningLog {
    std::size_t rows_read = 0;
    std::size_t dropped_session = 0;
    std::size_t dropped_duplicates = 0;
    std::size_t dropped_outliers = 0;
    std::size_t filled_gaps = 0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::logic_error("median of empty vector");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

}  // namespace detail

inline PricePath ingest_tick_csv(const std::string& path, const CleaningRules& rules,
                                 CleaningLog* log_out = nullptr) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tick file: " + path);
    CleaningLog log;
    std::vector<std::pair<double, double>> ticks;  // (epoch-seconds, log-price)
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() < 2)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected two columns");
        // tolerate one header row
        if (lineno == 1 && cells[0].find_first_not_of("0123456789.+-eE") != std::string::npos)
            continue;
        try {
            ticks.emplace_back(std::stod(cells[0]), std::stod(cells[1]));
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": unparseable row");
        }
        ++log.rows_read;
    }
    if (ticks.empty()) throw DataError(path + ": no data rows");
    std::stable_sort(ticks.begin(), ticks.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    if (rules.session_filter) {
        std::vector<std::pair<double, double>> kept;
        kept.reserve(ticks.size());
        for (const auto& t : ticks) {
            const double tod = std::fmod(t.first, 86400.0);
            if (tod >= rules.session_open && tod <= rules.session_close)
                kept.push_back(t);
            else
                ++log.dropped_session;
        }
        ticks.swap(kept);
        if (ticks.empty()) throw DataError(path + ": empty session after filtering");
    }

    if (rules.dedupe_timestamps) {
        std::vector<std::pair<double, double>> kept;
        std::size_t i = 0;
        while (i < ticks.size()) {
            std::size_t j = i;
            while (j < ticks.size() && ticks[j].first == ticks[i].first) ++j;
            if (j - i > 1) {
                std::vector<double> dup;
                for (std::size_t k = i; k < j; ++k) dup.push_back(ticks[k].second);
                kept.emplace_back(ticks[i].first, detail::median_of(dup));
                log.dropped_duplicates += (j - i - 1);
            } else {
                kept.push_back(ticks[i]);
            }
            i = j;
        }
        ticks.swap(kept);
    }

    if (rules.mad_outlier_filter && ticks.size() >= 5) {
        std::vector<double> prices;
        prices.reserve(ticks.size());
        for (const auto& t : ticks) prices.push_back(t.second);
        const double med = detail::median_of(prices);
        std::vector<double> absdev;
        absdev.reserve(prices.size());
        for (double p : prices) absdev.push_back(std::fabs(p - med));
        const double mad = detail::median_of(absdev);
        if (mad > 0.0) {
            std::vector<std::pair<double, double>> kept;
            kept.reserve(ticks.size());
            for (const auto& t : ticks) {
                if (std::fabs(t.second - med) <= rules.mad_multiplier * mad)
                    kept.push_back(t);
                else
                    ++log.dropped_outliers;
            }
            ticks.swap(kept);
            if (ticks.empty()) throw DataError(path + ": empty session after outlier filter");
        }
    }

    PricePath out;
    out.spacing_seconds = 1.0;
    out.t0_epoch = std::floor(ticks.front().first);
    if (rules.forward_fill) {
        const double t_end = ticks.back().first;
        const std::size_t n =
            static_cast<std::size_t>(std::floor(t_end - out.t0_epoch)) + 1;
        out.noisy.resize(n);
        std::size_t next = 0;
        double last = ticks.front().second;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = out.t0_epoch + static_cast<double>(i);
            bool advanced = false;
            while (next < ticks.size() && ticks[next].first <= t) {
                last = ticks[next].second;
                ++next;
                advanced = true;
            }
            if (!advanced) ++log.filled_gaps;
            out.noisy[i] = last;
        }
    } else {
        out.noisy.reserve(ticks.size());
        for (const auto& t : ticks) out.noisy.push_back(t.second);
    }
    out.latent = out.noisy;
    out.spot_vol.assign(out.noisy.size(), 0.0);
    out.n_days = std::max<std::size_t>(1, out.noisy.size() / (kSecondsPerDay + 1));
    out.truth_minutes.assign(out.n_days * kMinutesPerDay, 0);
    if (log_out) *log_out = log;
    return out;
}

inline void export_tick_csv(const PricePath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write tick file: " + file);
    out.precision(12);
    for (std::size_t i = 0; i < path.noisy.size(); ++i)
        out << static_cast<long long>(path.t0_epoch + static_cast<double>(i) *
                                                         path.spacing_seconds)
            << "," << path.noisy[i] << "\n";
}

// Kenneth-French-style monthly panel: header row, YYYYMM period column, then
// portfolio columns in percent; factor columns recognized by name; the RF
// column is subtracted from every portfolio column to form excess returns
inline FactorPanel ingest_panel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open panel file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const auto header = detail::split_csv_line(line);
    if (header.size() < 3) throw DataError(path + ": header too short");

    const std::vector<std::string> factor_names = {"Mkt-RF", "SMB", "HML", "RMW", "CMA"};
    std::vector<std::size_t> factor_cols, asset_cols;
    std::size_t rf_col = header.size();
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c] == "RF") {
            rf_col = c;
        } else if (std::find(factor_names.begin(), factor_names.end(), header[c]) !=
                   factor_names.end()) {
            factor_cols.push_back(c);
        } else {
            asset_cols.push_back(c);
        }
    }
    if (factor_cols.empty()) throw DataError(path + ": no recognized factor columns");
    if (rf_col == header.size()) throw DataError(path + ": missing RF column");
    if (asset_cols.empty()) throw DataError(path + ": no portfolio columns");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> periods;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": column count mismatch");
        std::vector<double> vals(cells.size());
        try {
            for (std::size_t c = 1; c < cells.size(); ++c) vals[c] = std::stod(cells[c]);
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": unparseable row");
        }
        periods.push_back(cells[0]);
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw DataError(path + ": no data rows");

    FactorPanel panel;
    panel.period_labels = std::move(periods);
    panel.y = Matrix(rows.size(), asset_cols.size());
    panel.f = Matrix(rows.size(), factor_cols.size());
    for (std::size_t c = 0; c < asset_cols.size(); ++c)
        panel.asset_labels.push_back(header[asset_cols[c]]);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const double rf = rows[t][rf_col];
        for (std::size_t c = 0; c < asset_cols.size(); ++c)
            panel.y(t, c) = rows[t][asset_cols[c]] - rf;
        for (std::size_t c = 0; c < factor_cols.size(); ++c)
            panel.f(t, c) = rows[t][factor_cols[c]];
    }
    panel.validate();
    return panel;
}

}  // namespace scct
