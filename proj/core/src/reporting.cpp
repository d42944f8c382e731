// SPDX-License-Identifier: Apache-2.0
#include "passevo/reporting.hpp"

#include "passevo/csv.hpp"
#include "passevo/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace passevo {

using csv::fmt_double;
using csv::join_record;
using csv::parse_double;
using csv::parse_long;
using csv::split_record;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError(path, "cannot open for writing");
    return out;
}

std::vector<std::string> split_tokens(const std::string& joined) {
    std::vector<std::string> tokens;
    std::istringstream in(joined);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

std::string stats_row(const GenerationStats& s) {
    std::string seq;
    for (std::size_t i = 0; i < s.best_sequence.size(); ++i) {
        if (i > 0) seq.push_back(' ');
        seq += s.best_sequence[i];
    }
    return join_record({std::to_string(s.generation), fmt_double(s.best_fitness),
                        fmt_double(s.mean_fitness), std::to_string(s.evaluations),
                        std::to_string(s.cache_hits), seq});
}

constexpr const char* generations_header =
    "generation,best_fitness_s,mean_fitness_s,evaluations,cache_hits,best_sequence";

} // namespace

double percent_improvement(double baseline_s, double evolved_s) {
    if (!(baseline_s > 0.0))
        throw std::invalid_argument("percent_improvement: baseline must be > 0");
    return 100.0 * (baseline_s - evolved_s) / baseline_s;
}

ImprovementReport
improvement_report(const std::vector<std::pair<std::string, double>>& baselines,
                   double evolved_s) {
    ImprovementReport report;
    report.entries.reserve(baselines.size());
    for (const auto& [label, baseline_s] : baselines) {
        ImprovementEntry e;
        e.label = label;
        e.baseline_s = baseline_s;
        e.evolved_s = evolved_s;
        e.percent = percent_improvement(baseline_s, evolved_s);
        report.entries.push_back(std::move(e));
    }
    return report;
}

RobustnessSummary robustness_summary(const std::vector<double>& improvements_pct) {
    if (improvements_pct.empty())
        throw std::invalid_argument("robustness_summary: empty input");

    const double n = static_cast<double>(improvements_pct.size());
    double mean = 0.0;
    for (double x : improvements_pct) mean += x;
    mean /= n;

    double ss = 0.0;
    for (double x : improvements_pct) ss += (x - mean) * (x - mean);
    const double sigma = improvements_pct.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    RobustnessSummary out;
    double kept_sum = 0.0;
    std::size_t kept = 0;
    std::size_t improved = 0;
    for (double x : improvements_pct) {
        if (std::fabs(x - mean) > 3.0 * sigma) {
            ++out.outliers_removed;
            continue;
        }
        ++kept;
        kept_sum += x;
        if (x > 0.0) ++improved;
    }

    out.n_runs = improvements_pct.size();
    out.mean_improvement_pct = kept > 0 ? kept_sum / static_cast<double>(kept) : 0.0;
    out.fraction_improved_pct =
        kept > 0 ? 100.0 * static_cast<double>(improved) / static_cast<double>(kept) : 0.0;
    return out;
}

std::vector<PlanRow> experiment_plan_fixed_budget(std::uint64_t budget,
                                                  const std::vector<PlanRow>& settings) {
    if (settings.empty()) throw ConfigError("experiment_plan", "empty plan");
    for (std::size_t i = 0; i < settings.size(); ++i) {
        const std::uint64_t product =
            static_cast<std::uint64_t>(settings[i].generations) * settings[i].population;
        if (product != budget)
            throw ConfigError("experiment_plan",
                              "row " + std::to_string(i + 1) + " (" +
                                  std::to_string(settings[i].generations) + " x " +
                                  std::to_string(settings[i].population) + " = " +
                                  std::to_string(product) + ") does not match budget " +
                                  std::to_string(budget));
    }
    return settings;
}

CsvStatsSink::CsvStatsSink(const std::string& path) : path_(path) {
    out_.open(path, std::ios::trunc);
    if (!out_) throw ConfigError(path, "cannot open for writing");
    out_ << generations_header << '\n';
    out_.flush();
}

void CsvStatsSink::on_generation(const GenerationStats& stats) {
    out_ << stats_row(stats) << '\n';
    out_.flush();
    if (!out_) throw ConfigError(path_, "write failed");
}

void write_generations_csv(const std::string& path,
                           const std::vector<GenerationStats>& history) {
    std::ofstream out = open_out(path);
    out << generations_header << '\n';
    for (const GenerationStats& s : history) out << stats_row(s) << '\n';
    if (!out) throw ConfigError(path, "write failed");
}

std::vector<GenerationStats> read_generations_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open");

    std::vector<GenerationStats> history;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != generations_header)
                throw ConfigError(path + ":1", "unexpected header");
            continue;
        }
        const std::string where = path + ":" + std::to_string(lineno);
        const std::vector<std::string> fields = split_record(line);
        if (fields.size() != 6) throw ConfigError(where, "expected 6 fields");

        GenerationStats s;
        s.generation = static_cast<std::uint32_t>(parse_long(fields[0], where));
        s.best_fitness = parse_double(fields[1], where);
        s.mean_fitness = parse_double(fields[2], where);
        s.evaluations = static_cast<std::uint64_t>(parse_long(fields[3], where));
        s.cache_hits = static_cast<std::uint64_t>(parse_long(fields[4], where));
        s.best_sequence = split_tokens(fields[5]);
        history.push_back(std::move(s));
    }
    return history;
}

void write_improvement_csv(const std::string& path, const ImprovementReport& report) {
    std::ofstream out = open_out(path);
    out << "label,baseline_s,evolved_s,percent_improvement\n";
    for (const ImprovementEntry& e : report.entries)
        out << join_record({e.label, fmt_double(e.baseline_s), fmt_double(e.evolved_s),
                            fmt_double(e.percent)})
            << '\n';
    if (!out) throw ConfigError(path, "write failed");
}

ImprovementReport read_improvement_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open");

    ImprovementReport report;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const std::vector<std::string> fields = split_record(line);
        if (fields.size() != 4) throw ConfigError(where, "expected 4 fields");
        ImprovementEntry e;
        e.label = fields[0];
        e.baseline_s = parse_double(fields[1], where);
        e.evolved_s = parse_double(fields[2], where);
        e.percent = parse_double(fields[3], where);
        report.entries.push_back(std::move(e));
    }
    return report;
}

void write_baselines_csv(const std::string& path, const BaselineReport& report) {
    std::ofstream out = open_out(path);
    out << "label,mean_s,variance,status\n";
    for (const BaselineEntry& e : report.entries)
        out << join_record({e.label, fmt_double(e.record.mean_runtime),
                            fmt_double(e.record.variance), to_string(e.record.status)})
            << '\n';
    if (!out) throw ConfigError(path, "write failed");
}

void write_robustness_csv(const std::string& path, const RobustnessSummary& summary) {
    std::ofstream out = open_out(path);
    out << "n_runs,mean_improvement_pct,fraction_improved_pct,outliers_removed\n";
    out << join_record({std::to_string(summary.n_runs),
                        fmt_double(summary.mean_improvement_pct),
                        fmt_double(summary.fraction_improved_pct),
                        std::to_string(summary.outliers_removed)})
        << '\n';
    if (!out) throw ConfigError(path, "write failed");
}

void write_best_sequence(const std::string& path, const std::vector<std::string>& tokens) {
    std::ofstream out = open_out(path);
    for (const std::string& tok : tokens) out << tok << '\n';
    if (!out) throw ConfigError(path, "write failed");
}

void write_taguchi_plan_csv(const std::string& path, const TaguchiDesign& design) {
    std::ofstream out = open_out(path);
    out << join_record({"experiment", design.factors[0].name, design.factors[1].name,
                        design.factors[2].name})
        << '\n';
    for (const TaguchiRow& row : design.rows) {
        out << join_record({std::to_string(row.row_id),
                            fmt_double(design.level_value(row, 0)),
                            fmt_double(design.level_value(row, 1)),
                            fmt_double(design.level_value(row, 2))})
            << '\n';
    }
    if (!out) throw ConfigError(path, "write failed");
}

void write_sn_csv(const std::string& path, const SnAnalysis& analysis) {
    std::ofstream out = open_out(path);
    out << "factor,L1,L2,L3,L4,delta,rank\n";
    for (const FactorAnalysis& fa : analysis.factors) {
        out << join_record({fa.factor, fmt_double(fa.level_sn[0]),
                            fmt_double(fa.level_sn[1]), fmt_double(fa.level_sn[2]),
                            fmt_double(fa.level_sn[3]), fmt_double(fa.delta),
                            std::to_string(fa.rank)})
            << '\n';
    }
    if (!out) throw ConfigError(path, "write failed");
}

} // namespace passevo
