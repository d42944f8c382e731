// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace passevo {

struct FactorSpec {
    std::string name;
    std::array<double, 4> levels{};
};

struct TaguchiRow {
    int row_id = 0;
    std::array<int, 3> level_index{}; // one per factor, each in 0..3
};

// L16(4^3) orthogonal array: every factor level appears in 4 rows and every
// factor-pair level combination in exactly one.
struct TaguchiDesign {
    std::array<FactorSpec, 3> factors;
    std::vector<TaguchiRow> rows; // 16, experiment ids 9..24

    double level_value(const TaguchiRow& row, std::size_t factor) const {
        return factors[factor].levels[static_cast<std::size_t>(row.level_index[factor])];
    }
};

// Tuning defaults: crossover {20,40,60,80}, mutation {20,40,60,80},
// tournament {2,4,6,8}.
std::array<FactorSpec, 3> default_tuning_factors();

// Emits the fixed L16 array for 3 four-level factors. Throws ConfigError on
// duplicate levels within a factor.
TaguchiDesign l16_design(const std::array<FactorSpec, 3>& factors);

enum class SnObjective : std::uint8_t { LargerIsBetter, SmallerIsBetter };

// Taguchi signal-to-noise ratio in decibels.
// LargerIsBetter: -10*log10(mean(1/y^2)); SmallerIsBetter: -10*log10(mean(y^2)).
// Throws on empty input or non-positive samples.
double sn_ratio(const std::vector<double>& samples, SnObjective objective);

struct FactorAnalysis {
    std::string factor;
    std::array<double, 4> level_sn{}; // L1..L4: mean S/N of rows at that level
    double delta = 0.0;               // max - min over level_sn
    int rank = 0;                     // 1 = largest delta
};

struct SnAnalysis {
    std::array<FactorAnalysis, 3> factors;
    SnObjective objective = SnObjective::LargerIsBetter;
    // Affine shift applied to every response before S/N when any response
    // was <= 0 (|min| + 0.01); zero when untouched.
    double offset_applied = 0.0;
};

// Per-row S/N over each row's response samples, averaged into per-level
// means per factor. responses must hold 16 non-empty sample sets, row order
// matching design.rows.
SnAnalysis analyze(const TaguchiDesign& design,
                   const std::vector<std::vector<double>>& responses,
                   SnObjective objective);

} // namespace passevo
