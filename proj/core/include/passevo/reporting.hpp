// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "passevo/evolution.hpp"
#include "passevo/llvm_backend.hpp"
#include "passevo/taguchi.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace passevo {

// 100 * (baseline - evolved) / baseline; negative when evolved is slower.
// Throws on baseline <= 0.
double percent_improvement(double baseline_s, double evolved_s);

struct ImprovementEntry {
    std::string label;
    double baseline_s = 0.0;
    double evolved_s = 0.0;
    double percent = 0.0;
};

struct ImprovementReport {
    std::vector<ImprovementEntry> entries;
};

ImprovementReport
improvement_report(const std::vector<std::pair<std::string, double>>& baselines,
                   double evolved_s);

struct RobustnessSummary {
    std::size_t n_runs = 0;
    double mean_improvement_pct = 0.0;
    double fraction_improved_pct = 0.0; // share strictly > 0, in percent
    std::size_t outliers_removed = 0;
};

// Single-pass 3-sigma filter: mean and sample standard deviation come from
// the full input, values beyond |x - mean| > 3*sigma are dropped, and the
// summary covers the remainder.
RobustnessSummary robustness_summary(const std::vector<double>& improvements_pct);

struct PlanRow {
    std::uint32_t generations = 0;
    std::size_t population = 0;
};

// Validates that every generations*population product equals budget; throws
// ConfigError naming the offending row.
std::vector<PlanRow> experiment_plan_fixed_budget(std::uint64_t budget,
                                                  const std::vector<PlanRow>& settings);

// Streams generation rows to a CSV file, flushing after each row so an
// aborted run keeps its partial history. Header:
// generation,best_fitness_s,mean_fitness_s,evaluations,cache_hits,best_sequence
class CsvStatsSink final : public StatsSink {
public:
    explicit CsvStatsSink(const std::string& path);
    void on_generation(const GenerationStats& stats) override;

private:
    std::ofstream out_;
    std::string path_;
};

void write_generations_csv(const std::string& path,
                           const std::vector<GenerationStats>& history);
std::vector<GenerationStats> read_generations_csv(const std::string& path);

void write_improvement_csv(const std::string& path, const ImprovementReport& report);
ImprovementReport read_improvement_csv(const std::string& path);

void write_baselines_csv(const std::string& path, const BaselineReport& report);

void write_robustness_csv(const std::string& path, const RobustnessSummary& summary);

void write_best_sequence(const std::string& path, const std::vector<std::string>& tokens);

void write_taguchi_plan_csv(const std::string& path, const TaguchiDesign& design);

// Header: factor,L1,L2,L3,L4,delta,rank
void write_sn_csv(const std::string& path, const SnAnalysis& analysis);

} // namespace passevo
