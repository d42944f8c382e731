// SPDX-License-Identifier: Apache-2.0
#include "passevo/taguchi.hpp"

#include "passevo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace passevo {

std::array<FactorSpec, 3> default_tuning_factors() {
    return {FactorSpec{"crossover", {20, 40, 60, 80}},
            FactorSpec{"mutation", {20, 40, 60, 80}},
            FactorSpec{"tournament", {2, 4, 6, 8}}};
}

TaguchiDesign l16_design(const std::array<FactorSpec, 3>& factors) {
    for (const FactorSpec& f : factors) {
        if (f.name.empty()) throw ConfigError("taguchi", "factor with empty name");
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                if (f.levels[i] == f.levels[j])
                    throw ConfigError("taguchi", "factor '" + f.name +
                                                     "' has duplicate levels");
    }

    TaguchiDesign design;
    design.factors = factors;
    design.rows.reserve(16);
    // Third column pairs the first two through XOR over GF(4) indices, which
    // keeps every column pair orthogonal.
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            design.rows.push_back(TaguchiRow{9 + 4 * a + b, {a, b, a ^ b}});
    return design;
}

double sn_ratio(const std::vector<double>& samples, SnObjective objective) {
    if (samples.empty()) throw std::invalid_argument("sn_ratio: empty sample set");
    double acc = 0.0;
    for (double y : samples) {
        if (!(y > 0.0))
            throw std::invalid_argument("sn_ratio: samples must be positive");
        acc += objective == SnObjective::LargerIsBetter ? 1.0 / (y * y) : y * y;
    }
    return -10.0 * std::log10(acc / static_cast<double>(samples.size()));
}

SnAnalysis analyze(const TaguchiDesign& design,
                   const std::vector<std::vector<double>>& responses,
                   SnObjective objective) {
    if (design.rows.size() != 16)
        throw std::invalid_argument("analyze: design must have 16 rows");
    if (responses.size() != design.rows.size())
        throw std::invalid_argument("analyze: one response set per design row required");
    for (const auto& r : responses)
        if (r.empty()) throw std::invalid_argument("analyze: empty response set");

    SnAnalysis out;
    out.objective = objective;

    double min_response = responses[0][0];
    for (const auto& r : responses)
        for (double y : r) min_response = std::min(min_response, y);
    if (min_response <= 0.0) out.offset_applied = std::fabs(min_response) + 0.01;

    std::vector<double> row_sn;
    row_sn.reserve(responses.size());
    for (const auto& r : responses) {
        if (out.offset_applied == 0.0) {
            row_sn.push_back(sn_ratio(r, objective));
        } else {
            std::vector<double> shifted(r);
            for (double& y : shifted) y += out.offset_applied;
            row_sn.push_back(sn_ratio(shifted, objective));
        }
    }

    for (std::size_t f = 0; f < 3; ++f) {
        FactorAnalysis& fa = out.factors[f];
        fa.factor = design.factors[f].name;
        std::array<double, 4> sum{};
        std::array<int, 4> count{};
        for (std::size_t row = 0; row < design.rows.size(); ++row) {
            const auto level = static_cast<std::size_t>(design.rows[row].level_index[f]);
            sum[level] += row_sn[row];
            ++count[level];
        }
        for (std::size_t level = 0; level < 4; ++level) {
            if (count[level] == 0)
                throw std::logic_error("analyze: level missing from design");
            fa.level_sn[level] = sum[level] / count[level];
        }
        const auto [lo, hi] = std::minmax_element(fa.level_sn.begin(), fa.level_sn.end());
        fa.delta = *hi - *lo;
    }

    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (out.factors[a].delta != out.factors[b].delta)
            return out.factors[a].delta > out.factors[b].delta;
        return a < b;
    });
    for (std::size_t pos = 0; pos < 3; ++pos)
        out.factors[order[pos]].rank = static_cast<int>(pos) + 1;

    return out;
}

} // namespace passevo
