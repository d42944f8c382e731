// SPDX-License-Identifier: Apache-2.0
#include "passevo/fitness.hpp"

#include "passevo/csv.hpp"
#include "passevo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace passevo {

using csv::fmt_double;
using csv::parse_double;
using csv::parse_long;

namespace {

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;
};

Moments moments_of(const FitnessRecord& r) {
    Moments m;
    m.n = r.n;
    if (r.n == 0) return m;
    if (r.samples.size() == r.n) {
        for (double s : r.samples) {
            m.sum += s;
            m.sum_sq += s * s;
        }
    } else {
        const double n = static_cast<double>(r.n);
        m.sum = r.mean_runtime * n;
        m.sum_sq = r.variance * (n - 1.0) + n * r.mean_runtime * r.mean_runtime;
    }
    return m;
}

void set_from_moments(FitnessRecord& r, const Moments& m) {
    r.n = m.n;
    if (m.n == 0) {
        r.mean_runtime = 0.0;
        r.variance = 0.0;
        return;
    }
    const double n = static_cast<double>(m.n);
    r.mean_runtime = m.sum / n;
    if (m.n > 1) {
        const double ss = m.sum_sq - n * r.mean_runtime * r.mean_runtime;
        r.variance = std::max(0.0, ss / (n - 1.0));
    } else {
        r.variance = 0.0;
    }
}

} // namespace

const char* to_string(MeasureStatus status) {
    switch (status) {
    case MeasureStatus::Ok: return "Ok";
    case MeasureStatus::CompileFailed: return "CompileFailed";
    case MeasureStatus::RunFailed: return "RunFailed";
    case MeasureStatus::TimedOut: return "TimedOut";
    }
    return "Unknown";
}

FitnessRecord record_from_measurement(const Measurement& m) {
    FitnessRecord r;
    r.status = m.status;
    r.eval_count = 1;
    r.detail = m.detail;
    if (m.status != MeasureStatus::Ok) return r;

    r.samples = m.samples;
    Moments mo;
    mo.n = r.samples.size();
    for (double s : r.samples) {
        mo.sum += s;
        mo.sum_sq += s * s;
    }
    set_from_moments(r, mo);
    return r;
}

FitnessRecord merge_records(const FitnessRecord& a, const FitnessRecord& b) {
    // A failure poisons the running record: the earliest failure's status and
    // detail are kept and only eval_count keeps counting.
    if (!a.ok() || !b.ok()) {
        FitnessRecord r = a.ok() ? b : a;
        r.eval_count = a.eval_count + b.eval_count;
        return r;
    }

    FitnessRecord r;
    r.status = MeasureStatus::Ok;
    r.eval_count = a.eval_count + b.eval_count;

    Moments ma = moments_of(a);
    Moments mb = moments_of(b);
    Moments m;
    m.n = ma.n + mb.n;
    m.sum = ma.sum + mb.sum;
    m.sum_sq = ma.sum_sq + mb.sum_sq;
    set_from_moments(r, m);

    // Raw samples survive only while both sides carry their full history.
    if (a.samples.size() == a.n && b.samples.size() == b.n) {
        r.samples.reserve(a.samples.size() + b.samples.size());
        r.samples.insert(r.samples.end(), a.samples.begin(), a.samples.end());
        r.samples.insert(r.samples.end(), b.samples.begin(), b.samples.end());
    }
    return r;
}

double fitness_of(const FitnessRecord& record, FitnessMode mode) {
    if (!record.ok()) return penalty_fitness;
    switch (mode) {
    case FitnessMode::MeanRuntime: return record.mean_runtime;
    case FitnessMode::MeanPlusVariance: return record.mean_runtime + record.variance;
    }
    return penalty_fitness;
}

std::shared_ptr<const FitnessRecord> FitnessCache::find(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : it->second;
}

void FitnessCache::store(const std::string& key, FitnessRecord record) {
    auto snap = std::make_shared<const FitnessRecord>(std::move(record));
    std::lock_guard<std::mutex> lock(mu_);
    map_[key] = std::move(snap);
}

std::shared_ptr<const FitnessRecord> FitnessCache::merge(const std::string& key,
                                                         const Measurement& m) {
    FitnessRecord fresh = record_from_measurement(m);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    std::shared_ptr<const FitnessRecord> snap;
    if (it == map_.end()) {
        snap = std::make_shared<const FitnessRecord>(std::move(fresh));
        map_.emplace(key, snap);
    } else {
        snap = std::make_shared<const FitnessRecord>(merge_records(*it->second, fresh));
        it->second = snap;
    }
    return snap;
}

std::size_t FitnessCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return map_.size();
}

void FitnessCache::clear() {
    std::lock_guard<std::mutex> lock(mu_);
    map_.clear();
}

void FitnessCache::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open cache file");

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const std::string where = path + ":" + std::to_string(lineno);
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 4) throw ConfigError(where, "expected 4 tab-separated fields");
        if (fields[0].empty()) throw ConfigError(where, "empty cache key");

        FitnessRecord r;
        r.status = MeasureStatus::Ok;
        r.mean_runtime = parse_double(fields[1], where);
        r.variance = parse_double(fields[2], where);
        long n = parse_long(fields[3], where);
        if (n < 1) throw ConfigError(where, "sample count must be >= 1");
        if (!(r.mean_runtime >= 0.0) || !(r.variance >= 0.0))
            throw ConfigError(where, "mean and variance must be finite and >= 0");
        r.n = static_cast<std::uint64_t>(n);
        r.eval_count = 1;

        store(fields[0], std::move(r));
    }
}

void FitnessCache::save_file(const std::string& path) const {
    std::vector<std::pair<std::string, std::shared_ptr<const FitnessRecord>>> rows;
    {
        std::lock_guard<std::mutex> lock(mu_);
        rows.assign(map_.begin(), map_.end());
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError(path, "cannot write cache file");
    for (const auto& [key, rec] : rows) {
        if (!rec->ok()) continue;
        out << key << '\t' << fmt_double(rec->mean_runtime) << '\t'
            << fmt_double(rec->variance) << '\t' << rec->n << '\n';
    }
    if (!out) throw ConfigError(path, "write failed");
}

FitnessEvaluator::FitnessEvaluator(Backend& backend, EvaluatorOptions options)
    : backend_(backend), options_(options) {
    if (options_.runs_per_eval == 0)
        throw ConfigError("runs_per_eval", "must be >= 1");
}

double FitnessEvaluator::evaluate(Individual& ind) {
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    const std::string key = ind.key();

    std::shared_ptr<const FitnessRecord> rec;
    if (options_.memoize) {
        rec = cache_.find(key);
        if (rec) {
            cache_hits_.fetch_add(1, std::memory_order_relaxed);
        } else {
            Measurement m = backend_.measure(ind.tokens(), options_.runs_per_eval);
            measurements_.fetch_add(1, std::memory_order_relaxed);
            rec = cache_.merge(key, m);
        }
    } else {
        Measurement m = backend_.measure(ind.tokens(), options_.runs_per_eval);
        measurements_.fetch_add(1, std::memory_order_relaxed);
        rec = cache_.merge(key, m);
    }

    ind.record = rec;
    ind.fitness = fitness_of(*rec, options_.mode);
    return *ind.fitness;
}

} // namespace passevo
